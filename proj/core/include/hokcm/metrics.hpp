#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hokcm/synthesizer.hpp"

namespace hokcm {

/// Per-token language class; OTHER covers punctuation and digits.
enum class Tag : std::uint8_t { HOK, ZH, OTHER };

using LangSeq = std::vector<Tag>;

/// One tag per emitted character.
LangSeq lang_seq(const CodeMixedSentence& sentence);

/// Code-Mixing Index as a fraction: 1 - max_lang / (n - other), 0 when all
/// tokens are OTHER. Throws DomainError on an empty sequence.
double compute_cmi(std::span<const Tag> tags);

/// Switch Point Fraction with OTHER tokens transparent: language changes
/// between consecutive language-bearing tokens over the number of such
/// adjacent pairs. 0 with fewer than two language-bearing tokens.
double compute_spf(std::span<const Tag> tags);

struct CorpusStats {
  std::size_t sentence_count = 0;
  double cmi_mean = 0.0;
  double spf_mean = 0.0;
  /// Unique switched (Mandarin) symbols over unique language-bearing
  /// symbols, `c` and `c_@` counted separately.
  double symbol_coverage = 0.0;
};

CorpusStats corpus_stats(std::span<const CodeMixedSentence> corpus);

}  // namespace hokcm
