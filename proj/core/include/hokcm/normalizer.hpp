#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hokcm/lexicon.hpp"

namespace hokcm {

/// Literary/colloquial reading rewrites, applied longest key first.
///
/// Construction rejects rules that could chain: a key mapping to itself,
/// or a replacement containing any key. Applying the map is therefore
/// idempotent on its own output.
class ReadingMap {
 public:
  ReadingMap() = default;
  explicit ReadingMap(std::vector<std::pair<std::string, std::string>> rules);

  /// TSV `from<TAB>to`, `#` comments.
  static ReadingMap load(const std::filesystem::path& path);

  std::string apply(std::string_view text) const;
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

 private:
  // Sorted by decreasing key length (code points), then key bytes.
  std::vector<std::pair<std::u32string, std::u32string>> rules_;
};

/// Characters accepted by filter_sentence.
class Charset {
 public:
  Charset() = default;
  explicit Charset(std::unordered_set<char32_t> chars) : chars_(std::move(chars)) {}

  /// One character per line; blank lines ignored.
  static Charset load(const std::filesystem::path& path);

  bool contains(char32_t cp) const { return chars_.count(cp) != 0; }
  void insert(char32_t cp) { chars_.insert(cp); }
  std::size_t size() const { return chars_.size(); }

 private:
  std::unordered_set<char32_t> chars_;
};

struct NormalizedSentence {
  std::string text;
  /// False when a romanized run had no lexicon headword.
  bool convertible = true;
  std::size_t tailo_converted = 0;
  std::vector<std::string> unresolved;
};

/// Replaces romanized runs through the lexicon's romanization index, then
/// applies the reading map. Other characters pass through unchanged.
NormalizedSentence normalize_sentence(std::string_view sentence,
                                      const ReadingMap& readings,
                                      const Lexicon& lexicon);

enum class RejectReason { Hanlo, Unknown };

std::string_view to_string(RejectReason reason);

struct FilterOutcome {
  bool keep = true;
  std::optional<RejectReason> reason;
};

/// Rejects sentences with leftover Latin letters (Han-lo) or characters
/// outside `charset`. A null charset disables the unknown-character check.
FilterOutcome filter_sentence(std::string_view sentence, const Charset* charset);

struct NormalizationReport {
  std::size_t input_count = 0;
  std::size_t kept = 0;
  std::size_t rejected_hanlo = 0;
  std::size_t rejected_unknown = 0;
  std::size_t tailo_converted = 0;

  bool reconciles() const {
    return kept + rejected_hanlo + rejected_unknown == input_count;
  }
  friend bool operator==(const NormalizationReport&,
                         const NormalizationReport&) = default;
};

/// Outcome of normalize + filter for one sentence, folded into `report`.
struct CleanedSentence {
  std::string text;
  bool keep = false;
  std::optional<RejectReason> reason;
};

CleanedSentence clean_sentence(std::string_view raw, const ReadingMap& readings,
                               const Lexicon& lexicon, const Charset* charset,
                               NormalizationReport& report);

}  // namespace hokcm
