#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hokcm/lexicon.hpp"

namespace hokcm {

enum class Lang : std::uint8_t { HOK, ZH };

std::string_view to_string(Lang lang);

/// One segmented unit. Offsets count code points; end is exclusive.
struct Token {
  std::string surface;
  std::size_t start = 0;
  std::size_t end = 0;
  Pos pos = Pos::UNK;
  Lang lang = Lang::HOK;
  bool in_lexicon = false;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class ChunkKind : std::uint8_t { NP, VP, PP };

std::string_view to_string(ChunkKind kind);

/// A flat phrase over tokens [begin, end).
struct Chunk {
  ChunkKind kind = ChunkKind::NP;
  std::size_t begin = 0;
  std::size_t end = 0;
  /// The phrase head: the final nominal of an NP, the V of a VP, the PREP of
  /// a PP.
  std::size_t head = 0;
  /// Head noun of the NP inside this phrase (the NP's own head for an NP).
  std::optional<std::size_t> noun_head;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct SegmentedSentence {
  std::string text;
  std::vector<Token> tokens;
  std::vector<Chunk> chunks;
};

/// An edge of the segmentation lattice.
struct Arc {
  std::size_t end = 0;
  /// Headword matched, or false for a single-character fallback.
  bool in_lexicon = false;
  Pos pos = Pos::UNK;
};

/// For every start offset, arcs ordered by increasing end offset. Each span
/// appears at most once; a single character that is itself a headword gets a
/// lexicon arc instead of a fallback arc.
struct Lattice {
  std::vector<std::string> chars;
  std::vector<std::vector<Arc>> arcs;

  std::size_t arc_count() const;
};

Lattice build_lattice(std::string_view sentence, const Lexicon& lexicon);

/// Shortest-path segmentation over the lattice: fewest tokens, then fewest
/// fallback tokens, then the longest arc at the earliest position.
SegmentedSentence segment(std::string_view sentence, const Lexicon& lexicon);

/// Head-driven flat chunking (NP, then VP/PP around each NP).
SegmentedSentence chunk_phrases(SegmentedSentence sentence);

struct FormatOptions {
  bool with_pos = false;
  /// Emit punctuation as its own field instead of gluing it to the
  /// preceding token.
  bool split_punct = false;
};

/// Comma-joined token line, e.g. `物件,毋通,掖,甲,一四界`.
std::string format_tokens(const SegmentedSentence& sentence,
                          const FormatOptions& options = {});

/// One JSON object (no trailing newline) with tokens and chunks.
std::string to_json_line(const SegmentedSentence& sentence);

}  // namespace hokcm
