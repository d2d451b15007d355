#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "hokcm/annotation.hpp"
#include "hokcm/errors.hpp"

using namespace hokcm;
namespace fs = std::filesystem;

namespace {

struct TempLog {
  explicit TempLog(const std::string& name)
      : path(fs::temp_directory_path() / ("hokcm_" + name + ".jsonl")) {
    fs::remove(path);
  }
  ~TempLog() { fs::remove(path); }
  fs::path path;
};

std::vector<Task> tasks(std::size_t n) {
  std::vector<Task> out;
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back({static_cast<std::int64_t>(i), "句 " + std::to_string(i)});
  }
  return out;
}

AnnotationRecord phase1(std::int64_t task, const std::string& who, int overall) {
  AnnotationRecord r;
  r.task_id = task;
  r.annotator_id = who;
  r.phase = 1;
  r.overall = overall;
  return r;
}

AnnotationRecord phase2(std::int64_t task, const std::string& who, int c, int i, int h) {
  AnnotationRecord r;
  r.task_id = task;
  r.annotator_id = who;
  r.phase = 2;
  r.colloquialism = c;
  r.intelligibility = i;
  r.coherence = h;
  return r;
}

// Closed form on the 2x2 contingency table.
double oracle_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  double tt = 0, tf = 0, ft = 0, ff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++tt;
    else if (a[i]) ++tf;
    else if (b[i]) ++ft;
    else ++ff;
  }
  const double n = tt + tf + ft + ff;
  const double po = (tt + ff) / n;
  const double pe = ((tt + tf) * (tt + ft) + (ft + ff) * (tf + ff)) / (n * n);
  return (po - pe) / (1 - pe);
}

double kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  // std::vector<bool> is packed, so copy into contiguous storage.
  std::unique_ptr<bool[]> pa(new bool[a.size()]), pb(new bool[b.size()]);
  std::copy(a.begin(), a.end(), pa.get());
  std::copy(b.begin(), b.end(), pb.get());
  return cohen_kappa(std::span<const bool>(pa.get(), a.size()),
                     std::span<const bool>(pb.get(), b.size()));
}

}  // namespace

TEST_CASE("record validation") {
  CHECK_NOTHROW(validate(phase1(1, "a", 5)));
  CHECK_NOTHROW(validate(phase2(1, "a", 2, 3, 2)));
  auto mixed = phase1(1, "a", 3);
  mixed.colloquialism = 2;
  try {
    validate(mixed);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "colloquialism");
  }
  try {
    validate(phase1(1, "a", 6));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "overall");
  }
  try {
    validate(phase2(1, "a", 2, 4, 2));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "intelligibility");
  }
  auto bad_phase = phase1(1, "a", 3);
  bad_phase.phase = 3;
  CHECK_THROWS_AS(validate(bad_phase), ValidationError);
}

TEST_CASE("record JSON round-trip") {
  auto r = phase2(4, "ann", 1, 2, 3);
  r.timestamp = "2026-10-17T00:00:00Z";
  CHECK(record_from_json(to_json(r)) == r);
  CHECK(to_json(phase1(1, "a", 4), true).find("\"replaced\":true") != std::string::npos);
  CHECK_THROWS_AS(record_from_json("not json"), ValidationError);
  CHECK_THROWS_AS(record_from_json(R"({"task_id":"x","annotator_id":"a","phase":1,"overall":3})"),
                  ValidationError);
}

TEST_CASE("aggregation") {
  SUBCASE("single record") {
    const std::vector<AnnotationRecord> recs{phase1(1, "a", 4)};
    const auto s = aggregate_scores(recs);
    CHECK(s.per_annotator.at("a").overall == 4.0);
    CHECK_FALSE(s.per_annotator.at("a").colloquialism.has_value());
    CHECK_FALSE(s.grand.coherence.has_value());
  }
  SUBCASE("mean of two") {
    const std::vector<AnnotationRecord> recs{phase1(1, "a", 1), phase1(2, "a", 5)};
    CHECK(aggregate_scores(recs).per_annotator.at("a").overall == 3.0);
  }
  SUBCASE("order independence") {
    std::vector<AnnotationRecord> recs;
    std::mt19937_64 rng(3);
    for (int i = 1; i <= 40; ++i) {
      const std::string who = "a" + std::to_string(i % 3);
      recs.push_back(phase1(i, who, 1 + static_cast<int>(rng() % 5)));
      recs.push_back(phase2(i, who, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3),
                            1 + static_cast<int>(rng() % 3)));
    }
    const auto before = aggregate_scores(recs).to_json();
    std::shuffle(recs.begin(), recs.end(), rng);
    CHECK(aggregate_scores(recs).to_json() == before);
  }
}

TEST_CASE("grand mean of three annotator totals") {
  const std::vector<std::optional<double>> totals{3.608, 3.949, 3.537};
  const auto grand = mean_of_means(totals);
  REQUIRE(grand.has_value());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", *grand);
  CHECK(std::string(buf) == "3.70");

  // The same through records: 1000 phase-1 scores per annotator summing to
  // 3608, 3949 and 3537.
  std::vector<AnnotationRecord> recs;
  const std::vector<std::pair<std::string, int>> sums{{"A", 3608}, {"B", 3949}, {"C", 3537}};
  for (const auto& [who, sum] : sums) {
    const int fours = sum - 3000;
    for (int i = 0; i < 1000; ++i) recs.push_back(phase1(i + 1, who, i < fours ? 4 : 3));
  }
  const auto s = aggregate_scores(recs);
  CHECK(*s.per_annotator.at("A").overall == doctest::Approx(3.608).epsilon(1e-12));
  CHECK(*s.per_annotator.at("B").overall == doctest::Approx(3.949).epsilon(1e-12));
  CHECK(*s.per_annotator.at("C").overall == doctest::Approx(3.537).epsilon(1e-12));
  std::snprintf(buf, sizeof buf, "%.2f", *s.grand.overall);
  CHECK(std::string(buf) == "3.70");
}

TEST_CASE("kappa cases") {
  const std::vector<bool> same{true, false, true, true, false};
  CHECK(kappa(same, same) == 1.0);
  CHECK(std::abs(kappa({true, true, false, false}, {true, false, true, false}) - 0.0) <= 1e-9);
  CHECK(std::abs(kappa({true, true, true, false}, {true, true, false, false}) - 0.5) <= 1e-9);
  CHECK(kappa({true, true}, {true, true}) == 1.0);
  CHECK(kappa({true, true}, {true, false}) == 0.0);
  CHECK(kappa({false, false}, {false, false}) == 1.0);
  CHECK_THROWS_AS(kappa({true}, {true, false}), ValidationError);
  CHECK_THROWS_AS(kappa({}, {}), ValidationError);

  const std::vector<AgreementLabel> la{AgreementLabel::TotallyAgree, AgreementLabel::FairAgree,
                                       AgreementLabel::Disagree, AgreementLabel::Disagree};
  const std::vector<AgreementLabel> lb{AgreementLabel::FairAgree, AgreementLabel::Disagree,
                                       AgreementLabel::FairAgree, AgreementLabel::Disagree};
  CHECK(std::abs(cohen_kappa(std::span<const AgreementLabel>(la), std::span<const AgreementLabel>(lb))) <=
        1e-12);
  CHECK(parse_agreement_label("FAIR_AGREE") == AgreementLabel::FairAgree);
  CHECK_FALSE(parse_agreement_label("MAYBE").has_value());
}

TEST_CASE("kappa matches the closed form and is symmetric") {
  std::mt19937_64 rng(1234);
  int checked = 0;
  while (checked < 10) {
    const std::size_t n = 5 + rng() % 40;
    std::vector<bool> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(rng() % 2);
      b.push_back(rng() % 3 != 0 ? a.back() : !a.back());
    }
    const double k = kappa(a, b);
    CHECK(std::abs(k - oracle_kappa(a, b)) <= 1e-9);
    CHECK(std::abs(k - kappa(b, a)) <= 1e-12);
    ++checked;
  }
}

TEST_CASE("pool sampling") {
  std::vector<std::string> sentences;
  for (int i = 0; i < 50; ++i) sentences.push_back("s" + std::to_string(i));
  const auto a = sample_pool(sentences, 10, 5);
  const auto b = sample_pool(sentences, 10, 5);
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == static_cast<std::int64_t>(i + 1));
    CHECK(a[i].sentence == b[i].sentence);
  }
  CHECK(sample_pool(sentences, 100, 5).size() == 50);
}

TEST_CASE("task queue") {
  TempLog log("queue");
  AnnotationStore store(tasks(3), {"a", "b"}, log.path);
  CHECK(store.next_task("a") == TaskAssignment{1, 1, "句 1"});
  store.record_score(phase1(1, "a", 4));
  CHECK(store.next_task("a") == TaskAssignment{2, 1, "句 2"});
  CHECK(store.next_task("b") == TaskAssignment{1, 1, "句 1"});
  CHECK_THROWS_AS(store.next_task("zed"), ValidationError);

  store.record_score(phase1(2, "a", 4));
  store.record_score(phase1(3, "a", 4));
  CHECK(store.next_task("a") == TaskAssignment{1, 2, "句 1"});
  for (int t = 1; t <= 3; ++t) store.record_score(phase2(t, "a", 2, 2, 2));
  CHECK_FALSE(store.next_task("a").has_value());
}

TEST_CASE("interleaved queue") {
  TempLog log("interleaved");
  AnnotationStore store(tasks(3), {"a"}, log.path, QueuePolicy::Interleaved);
  store.record_score(phase1(1, "a", 4));
  CHECK(store.next_task("a") == TaskAssignment{1, 2, "句 1"});
}

TEST_CASE("score recording rules") {
  TempLog log("rules");
  AnnotationStore store(tasks(2), {"a"}, log.path);
  try {
    store.record_score(phase2(1, "a", 2, 3, 2));
    FAIL("phase 2 before phase 1 must fail");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "phase");
  }
  CHECK_THROWS_AS(store.record_score(phase1(9, "a", 4)), ValidationError);
  CHECK_THROWS_AS(store.record_score(phase1(1, "x", 4)), ValidationError);
  CHECK_FALSE(store.record_score(phase1(1, "a", 5)).replaced);
  CHECK_FALSE(store.record_score(phase2(1, "a", 2, 3, 2)).replaced);
  CHECK(store.record_score(phase1(1, "a", 2)).replaced);

  const auto snap = store.snapshot();
  REQUIRE(snap.size() == 2);
  CHECK(snap[0].overall == 2);
  CHECK_FALSE(snap[0].timestamp.empty());

  std::istringstream lines(store.export_jsonl());
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(nlohmann::json::parse(first).value("replaced", false));
  CHECK_FALSE(nlohmann::json::parse(second).value("replaced", false));
}

TEST_CASE("replaying the log restores the same state") {
  TempLog log("replay");
  std::string stats, exported;
  {
    AnnotationStore store(tasks(4), {"a", "b"}, log.path);
    store.record_score(phase1(1, "a", 3));
    store.record_score(phase1(1, "b", 5));
    store.record_score(phase1(1, "a", 4));
    store.record_score(phase2(1, "a", 1, 2, 3));
    stats = store.stats().to_json();
    exported = store.export_jsonl();
  }
  AnnotationStore again(tasks(4), {"a", "b"}, log.path);
  CHECK(again.stats().to_json() == stats);
  CHECK(again.export_jsonl() == exported);
  CHECK(again.next_task("a") == TaskAssignment{2, 1, "句 2"});

  // A torn final line from a crash mid-write is ignored.
  {
    std::ofstream f(log.path, std::ios::app | std::ios::binary);
    f << R"({"task_id":2,"annotator_id":"a","pha)";
  }
  AnnotationStore torn(tasks(4), {"a", "b"}, log.path);
  CHECK(torn.stats().to_json() == stats);
}

TEST_CASE("concurrent writers keep every record") {
  TempLog log("concurrent");
  const std::set<std::string> who{"a", "b", "c", "d"};
  AnnotationStore store(tasks(25), who, log.path);
  std::vector<std::jthread> workers;
  for (const auto& w : who) {
    workers.emplace_back([&store, w] {
      for (int t = 1; t <= 25; ++t) {
        store.record_score(phase1(t, w, 1 + t % 5));
        (void)store.stats();
      }
    });
  }
  workers.clear();
  CHECK(store.snapshot().size() == 100);
  AnnotationStore replay(tasks(25), who, log.path);
  CHECK(replay.stats().to_json() == store.stats().to_json());
}
