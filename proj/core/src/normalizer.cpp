#include "hokcm/normalizer.hpp"

#include <algorithm>
#include <fstream>

#include "hokcm/errors.hpp"
#include "hokcm/utf8.hpp"
#include "text_util.hpp"

namespace hokcm {

namespace {

bool is_romanization_char(char32_t cp) {
  return utf8::is_latin_letter(cp) || utf8::is_combining(cp) || cp == U'-';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

namespace {

bool edges_overlap(std::u32string_view to, std::u32string_view key) {
  for (std::size_t n = 1; n < key.size() && n <= to.size(); ++n) {
    if (to.substr(to.size() - n) == key.substr(0, n)) return true;
    if (to.substr(0, n) == key.substr(key.size() - n)) return true;
  }
  return false;
}

}  // namespace

ReadingMap::ReadingMap(std::vector<std::pair<std::string, std::string>> rules) {
  for (auto& [from, to] : rules) {
    if (from.empty()) throw ValidationError("from", "empty reading key");
    if (from == to) {
      throw ValidationError("to", "reading rule maps '" + from + "' to itself");
    }
    rules_.emplace_back(utf8::decode(from), utf8::decode(to));
  }
  // A key inside a replacement, or straddling its edge, would match again on
  // a second pass.
  for (const auto& [from, to] : rules_) {
    for (const auto& [key, unused] : rules_) {
      if (to.find(key) != std::u32string::npos || edges_overlap(to, key)) {
        throw ValidationError(
            "to", "replacement '" + utf8::encode(to) + "' overlaps key '" +
                      utf8::encode(key) + "'; rules would chain");
      }
    }
  }
  std::stable_sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  const auto dup = std::adjacent_find(
      rules_.begin(), rules_.end(),
      [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != rules_.end()) {
    throw ValidationError("from", "duplicate reading key '" +
                                      utf8::encode(dup->first) + "'");
  }
}

ReadingMap ReadingMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open reading map " + path.string());
  std::vector<std::pair<std::string, std::string>> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2) {
      throw ParseError(path.string(), line_no,
                       "expected 2 tab-separated columns, got " +
                           std::to_string(cols.size()));
    }
    rules.emplace_back(std::move(cols[0]), std::move(cols[1]));
  }
  try {
    return ReadingMap(std::move(rules));
  } catch (const ValidationError& e) {
    throw ParseError(path.string(), line_no, e.what());
  }
}

std::string ReadingMap::apply(std::string_view text) const {
  if (rules_.empty()) return std::string(text);
  const auto cps = utf8::decode(text);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    bool replaced = false;
    for (const auto& [from, to] : rules_) {
      if (cps.compare(i, from.size(), from) == 0 && i + from.size() <= cps.size()) {
        out += to;
        i += from.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(cps[i++]);
  }
  return utf8::encode(out);
}

Charset Charset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open charset " + path.string());
  Charset cs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cps = utf8::decode(line);
    if (cps.size() != 1) {
      throw ParseError(path.string(), line_no,
                       "expected exactly one character per line");
    }
    cs.insert(cps.front());
  }
  return cs;
}

NormalizedSentence normalize_sentence(std::string_view sentence,
                                      const ReadingMap& readings,
                                      const Lexicon& lexicon) {
  NormalizedSentence result;
  const auto cps = utf8::decode(sentence);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!utf8::is_latin_letter(cps[i])) {
      out.push_back(cps[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && is_romanization_char(cps[j])) ++j;
    // A trailing hyphen belongs to the surrounding text, not the syllables.
    while (j > i + 1 && cps[j - 1] == U'-') --j;

    const auto run = utf8::encode(std::u32string_view(cps).substr(i, j - i));
    auto heads = lexicon.by_romanization(run);
    if (heads.empty()) heads = lexicon.by_romanization(ascii_lower(run));
    if (heads.empty()) {
      result.convertible = false;
      result.unresolved.push_back(run);
      out.append(cps.begin() + static_cast<std::ptrdiff_t>(i),
                 cps.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      out += utf8::decode(heads.front());
      ++result.tailo_converted;
    }
    i = j;
  }
  result.text = readings.apply(utf8::encode(out));
  return result;
}

std::string_view to_string(RejectReason reason) {
  return reason == RejectReason::Hanlo ? "hanlo" : "unknown";
}

FilterOutcome filter_sentence(std::string_view sentence, const Charset* charset) {
  const auto cps = utf8::decode(sentence);
  for (char32_t cp : cps) {
    if (utf8::is_latin_letter(cp)) return {false, RejectReason::Hanlo};
  }
  if (charset != nullptr) {
    for (char32_t cp : cps) {
      if (utf8::is_space(cp)) continue;
      if (!charset->contains(cp)) return {false, RejectReason::Unknown};
    }
  }
  return {true, std::nullopt};
}

CleanedSentence clean_sentence(std::string_view raw, const ReadingMap& readings,
                               const Lexicon& lexicon, const Charset* charset,
                               NormalizationReport& report) {
  ++report.input_count;
  auto normalized = normalize_sentence(raw, readings, lexicon);
  report.tailo_converted += normalized.tailo_converted;

  CleanedSentence out;
  out.text = std::move(normalized.text);
  if (!normalized.convertible) {
    out.reason = RejectReason::Hanlo;
    ++report.rejected_hanlo;
    return out;
  }
  const auto verdict = filter_sentence(out.text, charset);
  if (!verdict.keep) {
    out.reason = verdict.reason;
    if (*verdict.reason == RejectReason::Hanlo) {
      ++report.rejected_hanlo;
    } else {
      ++report.rejected_unknown;
    }
    return out;
  }
  out.keep = true;
  ++report.kept;
  return out;
}

}  // namespace hokcm
