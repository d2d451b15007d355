#include "hokcm/annotation.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hokcm/errors.hpp"

namespace hokcm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_range(const std::optional<int>& value, const char* field, int lo, int hi) {
  if (value && (*value < lo || *value > hi)) {
    throw ValidationError(field, "must be between " + std::to_string(lo) + " and " +
                                     std::to_string(hi) + ", got " +
                                     std::to_string(*value));
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void validate(const AnnotationRecord& r) {
  if (r.annotator_id.empty()) throw ValidationError("annotator_id", "must not be empty");
  if (r.task_id <= 0) throw ValidationError("task_id", "must be positive");
  if (r.phase == 1) {
    if (!r.overall) throw ValidationError("overall", "required in phase 1");
    check_range(r.overall, "overall", 1, 5);
    if (r.colloquialism) throw ValidationError("colloquialism", "not allowed in phase 1");
    if (r.intelligibility) throw ValidationError("intelligibility", "not allowed in phase 1");
    if (r.coherence) throw ValidationError("coherence", "not allowed in phase 1");
  } else if (r.phase == 2) {
    if (r.overall) throw ValidationError("overall", "not allowed in phase 2");
    if (!r.colloquialism) throw ValidationError("colloquialism", "required in phase 2");
    if (!r.intelligibility) throw ValidationError("intelligibility", "required in phase 2");
    if (!r.coherence) throw ValidationError("coherence", "required in phase 2");
    check_range(r.colloquialism, "colloquialism", 1, 3);
    check_range(r.intelligibility, "intelligibility", 1, 3);
    check_range(r.coherence, "coherence", 1, 3);
  } else {
    throw ValidationError("phase", "must be 1 or 2");
  }
}

std::string to_json(const AnnotationRecord& r, bool replaced) {
  ordered_json j;
  j["task_id"] = r.task_id;
  j["annotator_id"] = r.annotator_id;
  j["phase"] = r.phase;
  if (r.overall) j["overall"] = *r.overall;
  if (r.colloquialism) j["colloquialism"] = *r.colloquialism;
  if (r.intelligibility) j["intelligibility"] = *r.intelligibility;
  if (r.coherence) j["coherence"] = *r.coherence;
  j["timestamp"] = r.timestamp;
  if (replaced) j["replaced"] = true;
  return j.dump();
}

AnnotationRecord record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("body", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("body", "expected a JSON object");

  auto get_int = [&](const char* field) -> std::optional<int> {
    if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
    if (!j.at(field).is_number_integer()) {
      throw ValidationError(field, "must be an integer");
    }
    return j.at(field).get<int>();
  };
  AnnotationRecord r;
  if (!j.contains("task_id") || !j.at("task_id").is_number_integer()) {
    throw ValidationError("task_id", "required integer");
  }
  r.task_id = j.at("task_id").get<std::int64_t>();
  if (!j.contains("annotator_id") || !j.at("annotator_id").is_string()) {
    throw ValidationError("annotator_id", "required string");
  }
  r.annotator_id = j.at("annotator_id").get<std::string>();
  const auto phase = get_int("phase");
  if (!phase) throw ValidationError("phase", "required");
  r.phase = *phase;
  r.overall = get_int("overall");
  r.colloquialism = get_int("colloquialism");
  r.intelligibility = get_int("intelligibility");
  r.coherence = get_int("coherence");
  if (j.contains("timestamp") && j.at("timestamp").is_string()) {
    r.timestamp = j.at("timestamp").get<std::string>();
  }
  validate(r);
  return r;
}

std::optional<double> mean_of_means(std::span<const std::optional<double>> means) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : means) {
    if (!m) continue;
    sum += *m;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

ScoreSummary aggregate_scores(std::span<const AnnotationRecord> records) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    void add(const std::optional<int>& v) {
      if (!v) return;
      sum += *v;
      ++n;
    }
    std::optional<double> mean() const {
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    }
  };
  struct PerAnnotator {
    Acc overall, colloquialism, intelligibility, coherence;
    std::size_t records = 0;
  };
  std::map<std::string, PerAnnotator> acc;
  for (const auto& r : records) {
    auto& a = acc[r.annotator_id];
    a.overall.add(r.overall);
    a.colloquialism.add(r.colloquialism);
    a.intelligibility.add(r.intelligibility);
    a.coherence.add(r.coherence);
    ++a.records;
  }

  ScoreSummary summary;
  std::vector<std::optional<double>> overall, colloquialism, intelligibility, coherence;
  for (const auto& [id, a] : acc) {
    MetricMeans m{a.overall.mean(), a.colloquialism.mean(), a.intelligibility.mean(),
                  a.coherence.mean(), a.records};
    overall.push_back(m.overall);
    colloquialism.push_back(m.colloquialism);
    intelligibility.push_back(m.intelligibility);
    coherence.push_back(m.coherence);
    summary.per_annotator.emplace(id, m);
    summary.grand.records += a.records;
  }
  summary.grand.overall = mean_of_means(overall);
  summary.grand.colloquialism = mean_of_means(colloquialism);
  summary.grand.intelligibility = mean_of_means(intelligibility);
  summary.grand.coherence = mean_of_means(coherence);
  return summary;
}

namespace {

ordered_json means_json(const MetricMeans& m) {
  ordered_json j = ordered_json::object();
  if (m.colloquialism) j["colloquialism"] = *m.colloquialism;
  if (m.intelligibility) j["intelligibility"] = *m.intelligibility;
  if (m.coherence) j["coherence"] = *m.coherence;
  if (m.overall) j["total"] = *m.overall;
  j["records"] = m.records;
  return j;
}

}  // namespace

std::string ScoreSummary::to_json() const {
  ordered_json j;
  ordered_json annotators = ordered_json::object();
  for (const auto& [id, m] : per_annotator) annotators[id] = means_json(m);
  j["annotators"] = std::move(annotators);
  j["average"] = means_json(grand);
  return j.dump();
}

std::optional<AgreementLabel> parse_agreement_label(std::string_view text) {
  if (text == "TOTALLY_AGREE") return AgreementLabel::TotallyAgree;
  if (text == "FAIR_AGREE") return AgreementLabel::FairAgree;
  if (text == "DISAGREE") return AgreementLabel::Disagree;
  return std::nullopt;
}

namespace {

template <class A, class B>
double kappa_impl(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw ValidationError("labels", "label lists differ in length (" +
                                        std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ValidationError("labels", "need at least one label pair");
  const double n = static_cast<double>(a.size());
  std::size_t agree = 0, a_true = 0, b_true = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i], y = b[i];
    agree += x == y;
    a_true += x;
    b_true += y;
  }
  const double p_o = static_cast<double>(agree) / n;
  const double pa = static_cast<double>(a_true) / n;
  const double pb = static_cast<double>(b_true) / n;
  const double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
  if (p_e == 1.0) {
    if (p_o == 1.0) return 1.0;
    throw DomainError("kappa undefined: chance agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

}  // namespace

double cohen_kappa(std::span<const bool> a, std::span<const bool> b) {
  return kappa_impl(a, b);
}

double cohen_kappa(std::span<const AgreementLabel> a, std::span<const AgreementLabel> b) {
  std::vector<char> ba, bb;
  for (auto l : a) ba.push_back(binarize(l));
  for (auto l : b) bb.push_back(binarize(l));
  return kappa_impl(ba, bb);
}

std::vector<Task> sample_pool(std::span<const std::string> sentences, std::size_t size,
                              std::uint64_t seed) {
  std::vector<std::size_t> idx(sentences.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t k = std::min(size, idx.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t span = idx.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<Task> pool;
  pool.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    pool.push_back({static_cast<std::int64_t>(i + 1), sentences[idx[i]]});
  }
  return pool;
}

AnnotationStore::AnnotationStore(std::vector<Task> tasks, std::set<std::string> annotators,
                                 std::filesystem::path log_path, QueuePolicy policy)
    : tasks_(std::move(tasks)),
      annotators_(std::move(annotators)),
      log_path_(std::move(log_path)),
      policy_(policy) {
  std::sort(tasks_.begin(), tasks_.end(),
            [](const Task& a, const Task& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < tasks_.size(); ++i) task_index_[tasks_[i].id] = i;

  if (std::filesystem::exists(log_path_)) {
    std::ifstream in(log_path_, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      AnnotationRecord r;
      try {
        r = record_from_json(line);
      } catch (const ValidationError& e) {
        // A torn final line is what an interrupted append leaves behind.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw ParseError(log_path_.string(), line_no, e.what());
      }
      bool replaced = false;
      apply(std::move(r), replaced);
    }
  }
  log_ = std::fopen(log_path_.c_str(), "ab");
  if (log_ == nullptr) throw Error("cannot open annotation log " + log_path_.string());
}

AnnotationStore::~AnnotationStore() {
  if (log_ != nullptr) std::fclose(log_);
}

void AnnotationStore::apply(AnnotationRecord record, bool& replaced) {
  Key key{record.task_id, record.annotator_id, record.phase};
  const auto it = index_.find(key);
  if (it != index_.end()) {
    records_[it->second] = std::move(record);
    replaced_[it->second] = true;
    replaced = true;
    return;
  }
  index_.emplace(std::move(key), records_.size());
  records_.push_back(std::move(record));
  replaced_.push_back(false);
  replaced = false;
}

bool AnnotationStore::completed(const std::string& annotator, std::int64_t task,
                                int phase) const {
  return index_.count(Key{task, annotator, phase}) != 0;
}

std::optional<TaskAssignment> AnnotationStore::next_task(const std::string& annotator) const {
  if (!annotators_.count(annotator)) {
    throw ValidationError("annotator", "unknown annotator '" + annotator + "'");
  }
  std::shared_lock lock(mutex_);
  auto assign = [](const Task& t, int phase) {
    return TaskAssignment{t.id, phase, t.sentence};
  };
  if (policy_ == QueuePolicy::PhaseOneFirst) {
    for (const auto& t : tasks_) {
      if (!completed(annotator, t.id, 1)) return assign(t, 1);
    }
    for (const auto& t : tasks_) {
      if (!completed(annotator, t.id, 2)) return assign(t, 2);
    }
    return std::nullopt;
  }
  for (const auto& t : tasks_) {
    if (!completed(annotator, t.id, 1)) return assign(t, 1);
    if (!completed(annotator, t.id, 2)) return assign(t, 2);
  }
  return std::nullopt;
}

RecordOutcome AnnotationStore::record_score(AnnotationRecord record) {
  validate(record);
  if (!annotators_.count(record.annotator_id)) {
    throw ValidationError("annotator_id", "unknown annotator '" + record.annotator_id + "'");
  }
  if (!task_index_.count(record.task_id)) {
    throw ValidationError("task_id", "unknown task " + std::to_string(record.task_id));
  }
  if (record.timestamp.empty()) record.timestamp = utc_now();

  std::unique_lock lock(mutex_);
  if (record.phase == 2 && !completed(record.annotator_id, record.task_id, 1)) {
    throw ValidationError("phase", "phase 2 of task " + std::to_string(record.task_id) +
                                       " requires this annotator's phase 1");
  }
  const std::string line = to_json(record) + "\n";
  if (std::fputs(line.c_str(), log_) < 0 || std::fflush(log_) != 0 ||
      ::fsync(::fileno(log_)) != 0) {
    throw Error("failed to append to annotation log " + log_path_.string());
  }
  RecordOutcome outcome;
  apply(std::move(record), outcome.replaced);
  return outcome;
}

std::vector<AnnotationRecord> AnnotationStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return records_;
}

ScoreSummary AnnotationStore::stats() const {
  const auto records = snapshot();
  return aggregate_scores(records);
}

std::string AnnotationStore::export_jsonl() const {
  std::shared_lock lock(mutex_);
  std::string out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    out += to_json(records_[i], replaced_[i]);
    out += '\n';
  }
  return out;
}

}  // namespace hokcm
