#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hokcm {

/// Fixed part-of-speech tagset shared by the lexicon, segmenter and
/// synthesizer.
enum class Pos : std::uint8_t {
  N,
  V,
  ADJ,
  ADV,
  PREP,
  PRON,
  DET,
  NUM,
  CLF,
  AUX,
  CONJ,
  PART,
  PUNCT,
  PROPER_PERSON,
  PROPER_LOC,
  UNK,
};

std::string_view to_string(Pos pos);
std::optional<Pos> parse_pos(std::string_view text);

inline bool is_proper(Pos pos) {
  return pos == Pos::PROPER_PERSON || pos == Pos::PROPER_LOC;
}
inline bool is_nominal_head(Pos pos) { return pos == Pos::N || is_proper(pos); }
/// Closed-class categories that never switch on their own.
bool is_function_pos(Pos pos);

enum class Flag : std::uint8_t {
  Idiom = 1 << 0,
  Proverb = 1 << 1,
  Person = 1 << 2,
  Location = 1 << 3,
  Function = 1 << 4,
  Identity = 1 << 5,
};

std::string_view to_string(Flag flag);
std::optional<Flag> parse_flag(std::string_view text);

class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr FlagSet(std::initializer_list<Flag> flags) {
    for (Flag f : flags) set(f);
  }

  constexpr bool has(Flag f) const {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  constexpr void set(Flag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  friend constexpr bool operator==(FlagSet, FlagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// One headword sense.
struct LexiconEntry {
  std::string headword;
  Pos pos = Pos::UNK;
  std::string romanization;
  std::vector<std::string> translations;
  FlagSet flags;

  /// Function-flagged or closed-class POS.
  bool is_function_unit() const;
  /// Exactly one translation, or an identity sense.
  bool is_precise() const;
  bool is_identity() const { return flags.has(Flag::Identity); }

  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

/// Throws ValidationError when an entry breaks a field invariant.
void validate(const LexiconEntry& entry);

/// Immutable headword -> senses dictionary with a romanization index.
///
/// Senses of one headword keep insertion order; the first sense is the
/// default reading used by the segmenter. Safe to share between threads
/// once built.
class Lexicon {
 public:
  Lexicon() = default;
  /// Builds from entries in order; every entry is validated and kept.
  explicit Lexicon(std::vector<LexiconEntry> entries);

  /// Reads the five-column TSV format. Throws ParseError on bad rows;
  /// identical duplicate rows are dropped.
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon parse(std::istream& in, const std::string& source_name);

  /// All senses of `surface` in stored order; empty when absent.
  std::span<const LexiconEntry> lookup(std::string_view surface) const;
  bool contains(std::string_view surface) const;

  /// Headwords whose romanization equals `romanization` exactly.
  std::span<const std::string> by_romanization(
      std::string_view romanization) const;

  std::size_t max_headword_len() const { return max_headword_len_; }
  std::size_t entry_count() const { return entry_count_; }
  std::size_t headword_count() const { return order_.size(); }
  /// Headwords in first-insertion order.
  const std::vector<std::string>& headwords() const { return order_; }

  /// Writes the TSV format (comment header included); load(serialize(x)) == x.
  std::string serialize() const;

  friend bool operator==(const Lexicon& a, const Lexicon& b);

 private:
  void insert(LexiconEntry entry);

  std::map<std::string, std::vector<LexiconEntry>, std::less<>> entries_;
  std::map<std::string, std::vector<std::string>, std::less<>> romanization_index_;
  std::vector<std::string> order_;
  std::size_t max_headword_len_ = 1;
  std::size_t entry_count_ = 0;
};

/// Union of both lexicons; for shared headwords custom senses come first.
Lexicon merge_custom(const Lexicon& base, const Lexicon& custom);

}  // namespace hokcm
