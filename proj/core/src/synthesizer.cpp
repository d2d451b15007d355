#include "hokcm/synthesizer.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "hokcm/errors.hpp"
#include "hokcm/utf8.hpp"
#include "text_util.hpp"

namespace hokcm {

std::string_view to_string(Mode mode) { return mode == Mode::CM ? "CM" : "CMDA"; }

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "CM" || text == "cm") return Mode::CM;
  if (text == "CMDA" || text == "cmda") return Mode::CMDA;
  return std::nullopt;
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::HEAD_NOUN:
      return "HEAD_NOUN";
    case Rule::IDIOM:
      return "IDIOM";
    case Rule::PERSON_LOC:
      return "PERSON_LOC";
    case Rule::NP_VP:
      return "NP_VP";
    case Rule::NOUN_AFTER_PREP:
      return "NOUN_AFTER_PREP";
  }
  return "HEAD_NOUN";
}

std::optional<Rule> parse_rule(std::string_view text) {
  for (auto r : {Rule::HEAD_NOUN, Rule::IDIOM, Rule::PERSON_LOC, Rule::NP_VP,
                 Rule::NOUN_AFTER_PREP}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::string CodeMixedSentence::render() const {
  std::string out;
  for (std::size_t i = 0; i < emitted.size(); ++i) {
    if (i) out += ' ';
    out += emitted[i].ch;
    if (emitted[i].lang == Lang::HOK) out += kHokkienMark;
  }
  return out;
}

std::vector<EmittedChar> parse_rendered(std::string_view rendered) {
  std::vector<EmittedChar> out;
  for (const auto& piece : detail::split(rendered, ' ')) {
    if (piece.empty()) continue;
    std::string_view body = piece;
    Lang lang = Lang::ZH;
    if (body.size() > kHokkienMark.size() && body.ends_with(kHokkienMark)) {
      body.remove_suffix(kHokkienMark.size());
      lang = Lang::HOK;
    }
    if (utf8::length(body) != 1) {
      throw ContractError("rendered token '" + piece +
                          "' is not a single character with optional _@");
    }
    out.push_back({std::string(body), lang});
  }
  return out;
}

namespace {

struct Candidate {
  std::size_t begin;
  std::size_t end;
  std::size_t head;
  Rule rule;
};

struct SenseChoice {
  std::string replacement;
  bool precise;
  Pos pos;
};

// CM: a precise sense whose POS matches the token, preferring a real
// translation over an identity sense. CMDA: the first sense as stored.
std::optional<SenseChoice> choose_sense(std::string_view surface, Pos pos,
                                        const Lexicon& lexicon, Mode mode) {
  const auto senses = lexicon.lookup(surface);
  if (senses.empty()) return std::nullopt;
  if (mode == Mode::CMDA) {
    const LexiconEntry& s = senses.front();
    if (s.translations.empty()) return std::nullopt;
    return SenseChoice{s.is_identity() ? s.headword : s.translations.front(),
                       s.is_precise(), s.pos};
  }
  const LexiconEntry* identity = nullptr;
  for (const LexiconEntry& s : senses) {
    if (s.pos != pos || s.translations.empty() || !s.is_precise()) continue;
    if (s.is_identity()) {
      if (identity == nullptr) identity = &s;
      continue;
    }
    return SenseChoice{s.translations.front(), true, s.pos};
  }
  if (identity != nullptr) return SenseChoice{identity->headword, true, identity->pos};
  return std::nullopt;
}

std::optional<SwitchPoint> translate(const Candidate& c,
                                     const std::vector<Token>& toks,
                                     const Lexicon& lexicon, Mode mode) {
  SwitchPoint sp;
  sp.begin = c.begin;
  sp.end = c.end;
  sp.rule = c.rule;
  sp.source_pos = toks[c.head].pos;

  if (c.end - c.begin > 1) {
    std::string surface;
    for (std::size_t k = c.begin; k < c.end; ++k) surface += toks[k].surface;
    if (auto whole = choose_sense(surface, toks[c.head].pos, lexicon, mode)) {
      sp.replacement = std::move(whole->replacement);
      sp.precise = whole->precise;
      sp.replacement_pos = whole->pos;
      return sp;
    }
  }
  sp.precise = true;
  for (std::size_t k = c.begin; k < c.end; ++k) {
    auto part = choose_sense(toks[k].surface, toks[k].pos, lexicon, mode);
    if (!part) return std::nullopt;
    sp.replacement += part->replacement;
    sp.precise = sp.precise && part->precise;
    if (k == c.head) sp.replacement_pos = part->pos;
  }
  if (sp.replacement.empty()) return std::nullopt;
  return sp;
}

const LexiconEntry* first_sense(const Token& tok, const Lexicon& lexicon) {
  if (!tok.in_lexicon) return nullptr;
  const auto senses = lexicon.lookup(tok.surface);
  return senses.empty() ? nullptr : &senses.front();
}

bool is_function_token(const Token& tok, const Lexicon& lexicon) {
  if (tok.pos == Pos::PUNCT || is_function_pos(tok.pos)) return true;
  const LexiconEntry* e = first_sense(tok, lexicon);
  return e != nullptr && e->flags.has(Flag::Function);
}

// A PREP inside a switched range must bring its whole complement along.
bool respects_functional_heads(const Candidate& c,
                               const SegmentedSentence& sentence) {
  for (std::size_t k = c.begin; k < c.end; ++k) {
    if (sentence.tokens[k].pos != Pos::PREP) continue;
    std::size_t phrase_end = k + 1;
    for (const Chunk& ch : sentence.chunks) {
      if (ch.kind == ChunkKind::PP && ch.head == k) phrase_end = ch.end;
    }
    if (phrase_end > c.end) return false;
  }
  return true;
}

}  // namespace

std::vector<SwitchPoint> find_switch_points(const SegmentedSentence& sentence,
                                            const Lexicon& lexicon, Mode mode) {
  const auto& toks = sentence.tokens;
  std::vector<Candidate> candidates;

  for (const Chunk& ch : sentence.chunks) {
    if (ch.noun_head && toks[*ch.noun_head].pos == Pos::N) {
      candidates.push_back({*ch.noun_head, *ch.noun_head + 1, *ch.noun_head,
                            Rule::HEAD_NOUN});
    }
  }
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const LexiconEntry* e = first_sense(toks[k], lexicon);
    if (e && e->flags.has(Flag::Idiom) && !e->flags.has(Flag::Proverb)) {
      candidates.push_back({k, k + 1, k, Rule::IDIOM});
    }
  }
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const LexiconEntry* e = first_sense(toks[k], lexicon);
    if (e && (e->flags.has(Flag::Person) || e->flags.has(Flag::Location))) {
      candidates.push_back({k, k + 1, k, Rule::PERSON_LOC});
    }
  }
  for (const Chunk& ch : sentence.chunks) {
    if (ch.kind == ChunkKind::NP || ch.kind == ChunkKind::VP) {
      candidates.push_back({ch.begin, ch.end, ch.head, Rule::NP_VP});
    }
  }
  for (std::size_t k = 1; k < toks.size(); ++k) {
    if (toks[k - 1].pos == Pos::PREP && is_nominal_head(toks[k].pos)) {
      candidates.push_back({k, k + 1, k, Rule::NOUN_AFTER_PREP});
    }
  }

  std::vector<SwitchPoint> survivors;
  for (const Candidate& c : candidates) {
    if (c.end - c.begin == 1 && is_function_token(toks[c.begin], lexicon)) continue;
    if (mode == Mode::CM && !respects_functional_heads(c, sentence)) continue;
    if (auto sp = translate(c, toks, lexicon, mode)) survivors.push_back(std::move(*sp));
  }

  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const SwitchPoint& a, const SwitchPoint& b) {
                     if (a.rule != b.rule) return a.rule < b.rule;
                     const auto la = a.end - a.begin, lb = b.end - b.begin;
                     if (la != lb) return la > lb;
                     return a.begin < b.begin;
                   });
  std::vector<SwitchPoint> accepted;
  for (auto& sp : survivors) {
    const bool overlaps = std::any_of(
        accepted.begin(), accepted.end(), [&](const SwitchPoint& o) {
          return sp.begin < o.end && o.begin < sp.end;
        });
    if (!overlaps) accepted.push_back(std::move(sp));
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const SwitchPoint& a, const SwitchPoint& b) { return a.begin < b.begin; });
  return accepted;
}

CodeMixedSentence apply_switches(const SegmentedSentence& sentence,
                                 std::span<const SwitchPoint> switches,
                                 Mode mode) {
  std::vector<SwitchPoint> ordered(switches.begin(), switches.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const SwitchPoint& a, const SwitchPoint& b) { return a.begin < b.begin; });
  const std::size_t n = sentence.tokens.size();
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& sp = ordered[k];
    if (sp.begin >= sp.end || sp.end > n) {
      throw ContractError("switch range [" + std::to_string(sp.begin) + "," +
                          std::to_string(sp.end) + ") outside " +
                          std::to_string(n) + " tokens");
    }
    if (sp.replacement.empty()) throw ContractError("switch with empty replacement");
    if (k > 0 && ordered[k - 1].end > sp.begin) {
      throw ContractError("overlapping switches at token " + std::to_string(sp.begin));
    }
  }

  CodeMixedSentence out;
  out.mode = mode;
  out.source_hok = sentence.text;
  std::size_t next = 0;
  std::size_t t = 0;
  while (t < n) {
    if (next < ordered.size() && ordered[next].begin == t) {
      for (char32_t cp : utf8::decode(ordered[next].replacement)) {
        if (utf8::is_space(cp)) continue;
        out.emitted.push_back({utf8::encode(cp), Lang::ZH});
      }
      t = ordered[next].end;
      ++next;
      continue;
    }
    for (char32_t cp : utf8::decode(sentence.tokens[t].surface)) {
      if (utf8::is_space(cp)) continue;
      // Punctuation and digits belong to neither language and stay bare.
      const Lang lang = utf8::is_language_independent(cp) ? Lang::ZH : Lang::HOK;
      out.emitted.push_back({utf8::encode(cp), lang});
    }
    ++t;
  }
  out.switches = std::move(ordered);
  return out;
}

std::vector<ParallelPair> load_parallel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open parallel corpus " + path);
  std::vector<ParallelPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() == 2) {
      pairs.push_back({std::to_string(line_no), std::move(cols[0]), std::move(cols[1])});
    } else if (cols.size() == 3) {
      pairs.push_back({std::move(cols[0]), std::move(cols[1]), std::move(cols[2])});
    } else {
      throw ParseError(path, line_no,
                       "expected 2 or 3 tab-separated columns, got " +
                           std::to_string(cols.size()));
    }
    try {
      utf8::decode(pairs.back().hokkien);
      utf8::decode(pairs.back().mandarin);
    } catch (const Error& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return pairs;
}

namespace {

struct SentenceOutcome {
  std::optional<CodeMixedSentence> sentence;
  bool unswitched = false;
};

SentenceOutcome synthesize_one(const ParallelPair& pair, const Lexicon& lexicon,
                               const ReadingMap& readings,
                               const SynthesisOptions& options,
                               NormalizationReport& report) {
  SentenceOutcome out;
  auto cleaned = clean_sentence(pair.hokkien, readings, lexicon, options.charset, report);
  if (!cleaned.keep) return out;
  const auto seg = chunk_phrases(segment(cleaned.text, lexicon));
  const auto switches = find_switch_points(seg, lexicon, options.mode);
  if (switches.empty() && !options.keep_unswitched) {
    out.unswitched = true;
    return out;
  }
  auto cms = apply_switches(seg, switches, options.mode);
  cms.source_id = pair.id;
  cms.source_zh = pair.mandarin;
  out.sentence = std::move(cms);
  return out;
}

}  // namespace

SynthesisResult synthesize_corpus(std::span<const ParallelPair> parallel,
                                  const Lexicon& lexicon,
                                  const ReadingMap& readings,
                                  const SynthesisOptions& options) {
  const std::size_t n = parallel.size();
  std::vector<SentenceOutcome> outcomes(n);
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<NormalizationReport> reports(jobs);

  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += jobs) {
      outcomes[i] = synthesize_one(parallel[i], lexicon, readings, options, reports[w]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
  }

  SynthesisResult result;
  for (const auto& r : reports) {
    result.report.input_count += r.input_count;
    result.report.kept += r.kept;
    result.report.rejected_hanlo += r.rejected_hanlo;
    result.report.rejected_unknown += r.rejected_unknown;
    result.report.tailo_converted += r.tailo_converted;
  }
  for (auto& o : outcomes) {
    if (o.unswitched) ++result.dropped_unswitched;
    if (o.sentence) result.corpus.push_back(std::move(*o.sentence));
  }
  return result;
}

std::string to_json_line(const CodeMixedSentence& sentence) {
  nlohmann::ordered_json j;
  j["id"] = sentence.source_id;
  j["mode"] = to_string(sentence.mode);
  j["source_hok"] = sentence.source_hok;
  j["source_zh"] = sentence.source_zh;
  j["cm"] = sentence.render();
  auto sw = nlohmann::ordered_json::array();
  for (const auto& s : sentence.switches) {
    sw.push_back({{"range", {s.begin, s.end}},
                  {"rule", to_string(s.rule)},
                  {"replacement", s.replacement},
                  {"precise", s.precise}});
  }
  j["switches"] = std::move(sw);
  return j.dump();
}

CodeMixedSentence code_mixed_from_json(std::string_view line) try {
  const auto j = nlohmann::json::parse(line);
  CodeMixedSentence s;
  s.source_id = j.value("id", std::string{});
  const auto mode = parse_mode(j.value("mode", std::string{"CM"}));
  if (!mode) throw ValidationError("mode", "unknown mode");
  s.mode = *mode;
  s.source_hok = j.value("source_hok", std::string{});
  s.source_zh = j.value("source_zh", std::string{});
  s.emitted = parse_rendered(j.at("cm").get<std::string>());
  if (j.contains("switches")) {
    for (const auto& sj : j.at("switches")) {
      SwitchPoint sp;
      sp.begin = sj.at("range").at(0).get<std::size_t>();
      sp.end = sj.at("range").at(1).get<std::size_t>();
      const auto rule = parse_rule(sj.at("rule").get<std::string>());
      if (!rule) throw ValidationError("rule", "unknown switch rule");
      sp.rule = *rule;
      sp.replacement = sj.at("replacement").get<std::string>();
      sp.precise = sj.value("precise", false);
      s.switches.push_back(std::move(sp));
    }
  }
  return s;
} catch (const nlohmann::json::exception& e) {
  throw ValidationError("record", e.what());
}

}  // namespace hokcm
