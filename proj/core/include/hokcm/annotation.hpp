#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hokcm {

/// One annotator's judgment of one sentence in one phase.
///
/// Phase 1 carries `overall` (1-5) only; phase 2 carries the three 1-3
/// scores only.
struct AnnotationRecord {
  std::int64_t task_id = 0;
  std::string annotator_id;
  int phase = 1;
  std::optional<int> overall;
  std::optional<int> colloquialism;
  std::optional<int> intelligibility;
  std::optional<int> coherence;
  std::string timestamp;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

/// Throws ValidationError naming the first bad field.
void validate(const AnnotationRecord& record);

std::string to_json(const AnnotationRecord& record, bool replaced = false);
/// Parses and validates. Throws ValidationError.
AnnotationRecord record_from_json(std::string_view text);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

struct MetricMeans {
  std::optional<double> overall;
  std::optional<double> colloquialism;
  std::optional<double> intelligibility;
  std::optional<double> coherence;
  std::size_t records = 0;
};

struct ScoreSummary {
  std::map<std::string, MetricMeans> per_annotator;
  /// Mean of annotator means; a metric is absent when no annotator has it.
  MetricMeans grand;

  std::string to_json() const;
};

/// Per-annotator arithmetic means per metric plus the mean of those means.
ScoreSummary aggregate_scores(std::span<const AnnotationRecord> records);

/// Mean of the present values; nullopt when none are present.
std::optional<double> mean_of_means(std::span<const std::optional<double>> means);

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

enum class AgreementLabel : std::uint8_t { TotallyAgree, FairAgree, Disagree };

std::optional<AgreementLabel> parse_agreement_label(std::string_view text);

/// TotallyAgree and FairAgree are agreement (true); Disagree is false.
inline bool binarize(AgreementLabel label) { return label != AgreementLabel::Disagree; }

/// Cohen's kappa for two binary raters. Throws ValidationError on a length
/// mismatch or empty input, DomainError when chance agreement is 1 but the
/// raters disagree somewhere.
double cohen_kappa(std::span<const bool> a, std::span<const bool> b);
double cohen_kappa(std::span<const AgreementLabel> a,
                   std::span<const AgreementLabel> b);

// ---------------------------------------------------------------------------
// Task pool and store
// ---------------------------------------------------------------------------

struct Task {
  std::int64_t id = 0;
  std::string sentence;
};

/// Uniform sample (without replacement) of `size` sentences, ids 1..size in
/// sampled order.
std::vector<Task> sample_pool(std::span<const std::string> sentences,
                              std::size_t size, std::uint64_t seed);

struct TaskAssignment {
  std::int64_t task_id = 0;
  int phase = 1;
  std::string sentence;

  friend bool operator==(const TaskAssignment&, const TaskAssignment&) = default;
};

enum class QueuePolicy : std::uint8_t {
  /// Every phase-1 task before any phase-2 task.
  PhaseOneFirst,
  /// Phase 2 of a task right after its phase 1.
  Interleaved,
};

struct RecordOutcome {
  bool replaced = false;
};

/// Thread-safe task queue and append-only score log.
///
/// Every accepted record is appended to the log and flushed to disk before
/// record_score returns. Construction replays an existing log, so a
/// restarted store holds the same state as before the restart.
class AnnotationStore {
 public:
  AnnotationStore(std::vector<Task> tasks, std::set<std::string> annotators,
                  std::filesystem::path log_path,
                  QueuePolicy policy = QueuePolicy::PhaseOneFirst);
  ~AnnotationStore();

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Throws ValidationError("annotator") for an unregistered annotator.
  std::optional<TaskAssignment> next_task(const std::string& annotator) const;

  /// Validates, appends and applies. A repeat of (task, annotator, phase)
  /// replaces the earlier judgment.
  RecordOutcome record_score(AnnotationRecord record);

  /// Current (deduplicated) records in log order of first appearance.
  std::vector<AnnotationRecord> snapshot() const;
  ScoreSummary stats() const;
  /// JSONL; records that replaced an earlier one carry `"replaced": true`.
  std::string export_jsonl() const;

  std::size_t task_count() const { return tasks_.size(); }
  const std::set<std::string>& annotators() const { return annotators_; }

 private:
  using Key = std::tuple<std::int64_t, std::string, int>;

  void apply(AnnotationRecord record, bool& replaced);
  bool completed(const std::string& annotator, std::int64_t task, int phase) const;

  std::vector<Task> tasks_;
  std::map<std::int64_t, std::size_t> task_index_;
  std::set<std::string> annotators_;
  std::filesystem::path log_path_;
  QueuePolicy policy_;

  mutable std::shared_mutex mutex_;
  std::FILE* log_ = nullptr;
  std::vector<AnnotationRecord> records_;
  std::vector<bool> replaced_;
  std::map<Key, std::size_t> index_;
};

}  // namespace hokcm
