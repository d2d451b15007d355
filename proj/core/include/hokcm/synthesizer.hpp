#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hokcm/lexicon.hpp"
#include "hokcm/normalizer.hpp"
#include "hokcm/segmenter.hpp"

namespace hokcm {

/// CM: every constraint holds and every switched word is precisely
/// translated. CMDA: relaxed constraints, first-sense translations.
enum class Mode : std::uint8_t { CM, CMDA };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Switch-point rules, in priority order.
enum class Rule : std::uint8_t {
  HEAD_NOUN = 1,
  IDIOM = 2,
  PERSON_LOC = 3,
  NP_VP = 4,
  NOUN_AFTER_PREP = 5,
};

std::string_view to_string(Rule rule);
std::optional<Rule> parse_rule(std::string_view text);

/// A token range [begin, end) replaced by Mandarin text.
struct SwitchPoint {
  std::size_t begin = 0;
  std::size_t end = 0;
  Rule rule = Rule::HEAD_NOUN;
  std::string replacement;
  bool precise = false;
  /// POS of the range's head token and of the sense chosen for it.
  Pos source_pos = Pos::UNK;
  Pos replacement_pos = Pos::UNK;

  friend bool operator==(const SwitchPoint&, const SwitchPoint&) = default;
};

struct EmittedChar {
  std::string ch;
  Lang lang = Lang::HOK;

  friend bool operator==(const EmittedChar&, const EmittedChar&) = default;
};

/// Suffix appended to every Hokkien character.
inline constexpr std::string_view kHokkienMark = "_@";

struct CodeMixedSentence {
  std::string source_id;
  Mode mode = Mode::CM;
  std::string source_hok;
  std::string source_zh;
  std::vector<EmittedChar> emitted;
  std::vector<SwitchPoint> switches;

  /// Space-joined characters, Hokkien ones suffixed with `_@`.
  std::string render() const;
};

/// Parses a rendered string back into emitted characters.
/// Throws ContractError on tokens that are not one character with an
/// optional `_@` suffix.
std::vector<EmittedChar> parse_rendered(std::string_view rendered);

/// Candidate collection (rules 1-5), filtering (function units, functional
/// heads, equivalence) and overlap resolution. `sentence` must be chunked.
std::vector<SwitchPoint> find_switch_points(const SegmentedSentence& sentence,
                                            const Lexicon& lexicon, Mode mode);

/// Emits the matrix (Hokkien) sentence with the switched ranges replaced.
/// Throws ContractError on overlapping or out-of-range switches.
CodeMixedSentence apply_switches(const SegmentedSentence& sentence,
                                 std::span<const SwitchPoint> switches,
                                 Mode mode);

struct ParallelPair {
  std::string id;
  std::string hokkien;
  std::string mandarin;
};

/// Reads `hokkien<TAB>mandarin` or `id<TAB>hokkien<TAB>mandarin` lines.
/// Ids default to the 1-based data line number.
std::vector<ParallelPair> load_parallel(const std::string& path);

struct SynthesisOptions {
  Mode mode = Mode::CM;
  bool keep_unswitched = false;
  unsigned jobs = 1;
  /// Optional whitelist for the unknown-character filter.
  const Charset* charset = nullptr;
};

struct SynthesisResult {
  std::vector<CodeMixedSentence> corpus;
  NormalizationReport report;
  std::size_t dropped_unswitched = 0;
};

/// normalize -> filter -> segment -> chunk -> find switches -> apply.
SynthesisResult synthesize_corpus(std::span<const ParallelPair> parallel,
                                  const Lexicon& lexicon,
                                  const ReadingMap& readings,
                                  const SynthesisOptions& options);

std::string to_json_line(const CodeMixedSentence& sentence);
CodeMixedSentence code_mixed_from_json(std::string_view line);

}  // namespace hokcm
