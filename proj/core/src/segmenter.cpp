#include "hokcm/segmenter.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "hokcm/utf8.hpp"

namespace hokcm {

std::string_view to_string(Lang lang) { return lang == Lang::HOK ? "HOK" : "ZH"; }

std::string_view to_string(ChunkKind kind) {
  switch (kind) {
    case ChunkKind::NP:
      return "NP";
    case ChunkKind::VP:
      return "VP";
    case ChunkKind::PP:
      return "PP";
  }
  return "NP";
}

std::size_t Lattice::arc_count() const {
  std::size_t n = 0;
  for (const auto& a : arcs) n += a.size();
  return n;
}

namespace {

Pos fallback_pos(const std::string& ch) {
  const char32_t cp = utf8::first(ch);
  return (utf8::is_punct(cp) || utf8::is_space(cp)) ? Pos::PUNCT : Pos::UNK;
}

bool is_punct_surface(const std::string& surface) {
  for (char32_t cp : utf8::decode(surface)) {
    if (!utf8::is_punct(cp) && !utf8::is_space(cp)) return false;
  }
  return !surface.empty();
}

}  // namespace

Lattice build_lattice(std::string_view sentence, const Lexicon& lexicon) {
  Lattice lattice;
  lattice.chars = utf8::split_chars(sentence);
  const std::size_t n = lattice.chars.size();
  lattice.arcs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string span;
    for (std::size_t j = i; j < n && j - i < lexicon.max_headword_len(); ++j) {
      span += lattice.chars[j];
      const auto senses = lexicon.lookup(span);
      if (!senses.empty()) {
        Pos pos = senses.front().pos;
        if (is_punct_surface(span)) pos = Pos::PUNCT;
        lattice.arcs[i].push_back({j + 1, true, pos});
      } else if (j == i) {
        lattice.arcs[i].push_back({i + 1, false, fallback_pos(lattice.chars[i])});
      }
    }
  }
  return lattice;
}

SegmentedSentence segment(std::string_view sentence, const Lexicon& lexicon) {
  const Lattice lattice = build_lattice(sentence, lexicon);
  const std::size_t n = lattice.chars.size();

  struct Cost {
    std::size_t tokens = std::numeric_limits<std::size_t>::max();
    std::size_t fallbacks = 0;
  };
  // best[i]: cheapest tiling of the suffix starting at i.
  std::vector<Cost> best(n + 1);
  std::vector<std::size_t> choice(n + 1, 0);
  best[n] = {0, 0};
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = 0; k < lattice.arcs[i].size(); ++k) {
      const Arc& arc = lattice.arcs[i][k];
      const Cost& rest = best[arc.end];
      const Cost cand{rest.tokens + 1, rest.fallbacks + (arc.in_lexicon ? 0 : 1)};
      const Cost& cur = best[i];
      // Arcs are in increasing length, so `<=` on a tie keeps the longest.
      const bool better =
          cand.tokens < cur.tokens ||
          (cand.tokens == cur.tokens && cand.fallbacks <= cur.fallbacks);
      if (better) {
        best[i] = cand;
        choice[i] = k;
      }
    }
  }

  SegmentedSentence out;
  out.text = std::string(sentence);
  std::size_t i = 0;
  while (i < n) {
    const Arc& arc = lattice.arcs[i][choice[i]];
    Token tok;
    for (std::size_t j = i; j < arc.end; ++j) tok.surface += lattice.chars[j];
    tok.start = i;
    tok.end = arc.end;
    tok.pos = arc.pos;
    tok.in_lexicon = arc.in_lexicon;
    out.tokens.push_back(std::move(tok));
    i = arc.end;
  }
  return out;
}

namespace {

bool is_np_modifier(Pos pos) {
  return pos == Pos::DET || pos == Pos::NUM || pos == Pos::CLF ||
         pos == Pos::ADJ || pos == Pos::N;
}

}  // namespace

SegmentedSentence chunk_phrases(SegmentedSentence sentence) {
  const auto& toks = sentence.tokens;
  const std::size_t n = toks.size();
  std::vector<Chunk> nps;

  // Right to left: each nominal head projects an NP over its modifiers.
  std::size_t i = n;
  while (i-- > 0) {
    if (!is_nominal_head(toks[i].pos)) continue;
    std::size_t begin = i;
    while (begin > 0 && is_np_modifier(toks[begin - 1].pos)) --begin;
    nps.push_back({ChunkKind::NP, begin, i + 1, i, i});
    i = begin;
  }

  std::vector<Chunk> chunks;
  std::vector<bool> covered(n, false);
  // nps are right-to-left; build outer phrases in the same order.
  for (const Chunk& np : nps) {
    if (np.begin > 0 && toks[np.begin - 1].pos == Pos::PREP) {
      chunks.push_back({ChunkKind::PP, np.begin - 1, np.end, np.begin - 1, np.noun_head});
    } else if (np.begin > 0 && toks[np.begin - 1].pos == Pos::V) {
      chunks.push_back({ChunkKind::VP, np.begin - 1, np.end, np.begin - 1, np.noun_head});
    } else {
      chunks.push_back(np);
    }
    for (std::size_t k = chunks.back().begin; k < chunks.back().end; ++k) covered[k] = true;
  }
  // PREP + pronoun complement; bare verbs project a VP with no complement.
  for (std::size_t k = 0; k < n; ++k) {
    if (covered[k]) continue;
    if (toks[k].pos == Pos::PREP && k + 1 < n && !covered[k + 1] &&
        toks[k + 1].pos == Pos::PRON) {
      chunks.push_back({ChunkKind::PP, k, k + 2, k, std::nullopt});
      covered[k] = covered[k + 1] = true;
    } else if (toks[k].pos == Pos::V) {
      chunks.push_back({ChunkKind::VP, k, k + 1, k, std::nullopt});
      covered[k] = true;
    }
  }
  std::sort(chunks.begin(), chunks.end(),
            [](const Chunk& a, const Chunk& b) { return a.begin < b.begin; });
  sentence.chunks = std::move(chunks);
  return sentence;
}

std::string format_tokens(const SegmentedSentence& sentence,
                          const FormatOptions& options) {
  std::vector<std::string> fields;
  for (const auto& tok : sentence.tokens) {
    std::string text = tok.surface;
    if (options.with_pos) {
      text += "/";
      text += to_string(tok.pos);
    }
    if (!options.split_punct && tok.pos == Pos::PUNCT && !fields.empty()) {
      fields.back() += text;
    } else {
      fields.push_back(std::move(text));
    }
  }
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out += ',';
    out += fields[k];
  }
  return out;
}

std::string to_json_line(const SegmentedSentence& sentence) {
  nlohmann::ordered_json j;
  j["text"] = sentence.text;
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& tok : sentence.tokens) {
    tokens.push_back({{"surface", tok.surface},
                      {"start", tok.start},
                      {"end", tok.end},
                      {"pos", to_string(tok.pos)}});
  }
  j["tokens"] = std::move(tokens);
  auto chunks = nlohmann::ordered_json::array();
  for (const auto& c : sentence.chunks) {
    nlohmann::ordered_json cj{{"kind", to_string(c.kind)},
                              {"range", {c.begin, c.end}},
                              {"head", c.head}};
    if (c.noun_head) cj["noun_head"] = *c.noun_head;
    chunks.push_back(std::move(cj));
  }
  j["chunks"] = std::move(chunks);
  return j.dump();
}

}  // namespace hokcm
