#include "hokcm/lexicon.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "hokcm/errors.hpp"
#include "hokcm/utf8.hpp"
#include "text_util.hpp"

namespace hokcm {

namespace {

constexpr std::array<std::pair<Pos, std::string_view>, 16> kPosNames{{
    {Pos::N, "N"},
    {Pos::V, "V"},
    {Pos::ADJ, "ADJ"},
    {Pos::ADV, "ADV"},
    {Pos::PREP, "PREP"},
    {Pos::PRON, "PRON"},
    {Pos::DET, "DET"},
    {Pos::NUM, "NUM"},
    {Pos::CLF, "CLF"},
    {Pos::AUX, "AUX"},
    {Pos::CONJ, "CONJ"},
    {Pos::PART, "PART"},
    {Pos::PUNCT, "PUNCT"},
    {Pos::PROPER_PERSON, "PROPER_PERSON"},
    {Pos::PROPER_LOC, "PROPER_LOC"},
    {Pos::UNK, "UNK"},
}};

constexpr std::array<std::pair<Flag, std::string_view>, 6> kFlagNames{{
    {Flag::Idiom, "idiom"},
    {Flag::Proverb, "proverb"},
    {Flag::Person, "person"},
    {Flag::Location, "location"},
    {Flag::Function, "function"},
    {Flag::Identity, "identity"},
}};

}  // namespace

std::string_view to_string(Pos pos) {
  for (const auto& [p, name] : kPosNames) {
    if (p == pos) return name;
  }
  return "UNK";
}

std::optional<Pos> parse_pos(std::string_view text) {
  for (const auto& [p, name] : kPosNames) {
    if (name == text) return p;
  }
  return std::nullopt;
}

bool is_function_pos(Pos pos) {
  switch (pos) {
    case Pos::AUX:
    case Pos::CONJ:
    case Pos::PART:
    case Pos::DET:
    case Pos::CLF:
    case Pos::PREP:
    case Pos::PRON:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(Flag flag) {
  for (const auto& [f, name] : kFlagNames) {
    if (f == flag) return name;
  }
  return "";
}

std::optional<Flag> parse_flag(std::string_view text) {
  for (const auto& [f, name] : kFlagNames) {
    if (name == text) return f;
  }
  return std::nullopt;
}

bool LexiconEntry::is_function_unit() const {
  return flags.has(Flag::Function) || is_function_pos(pos);
}

bool LexiconEntry::is_precise() const {
  return translations.size() == 1 || flags.has(Flag::Identity);
}

void validate(const LexiconEntry& entry) {
  if (entry.headword.empty()) {
    throw ValidationError("headword", "must not be empty");
  }
  for (char32_t cp : utf8::decode(entry.headword)) {
    if (utf8::is_space(cp)) {
      throw ValidationError("headword", "must not contain whitespace");
    }
  }
  if (entry.flags.has(Flag::Person) && entry.pos != Pos::PROPER_PERSON) {
    throw ValidationError("flags", "person flag requires POS PROPER_PERSON");
  }
  if (entry.flags.has(Flag::Location) && entry.pos != Pos::PROPER_LOC) {
    throw ValidationError("flags", "location flag requires POS PROPER_LOC");
  }
  if (entry.flags.has(Flag::Identity) &&
      std::find(entry.translations.begin(), entry.translations.end(),
                entry.headword) == entry.translations.end()) {
    throw ValidationError("flags",
                          "identity flag requires the headword among the "
                          "translations");
  }
  for (const auto& t : entry.translations) {
    if (t.empty()) throw ValidationError("translations", "empty translation");
  }
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) {
  for (auto& e : entries) {
    validate(e);
    insert(std::move(e));
  }
}

void Lexicon::insert(LexiconEntry entry) {
  auto [it, fresh] = entries_.try_emplace(entry.headword);
  if (fresh) order_.push_back(entry.headword);
  max_headword_len_ =
      std::max(max_headword_len_, utf8::length(entry.headword));
  if (!entry.romanization.empty()) {
    auto& heads = romanization_index_[entry.romanization];
    if (std::find(heads.begin(), heads.end(), entry.headword) == heads.end()) {
      heads.push_back(entry.headword);
    }
  }
  it->second.push_back(std::move(entry));
  ++entry_count_;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon " + path.string());
  return parse(in, path.string());
}

Lexicon Lexicon::parse(std::istream& in, const std::string& source_name) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty() || line.front() == '#') continue;

    const auto cols = detail::split(line, '\t');
    if (cols.size() != 5) {
      throw ParseError(source_name, line_no,
                       "expected 5 tab-separated columns, got " +
                           std::to_string(cols.size()));
    }
    LexiconEntry entry;
    entry.headword = cols[0];
    const auto pos = parse_pos(cols[1]);
    if (!pos) {
      throw ParseError(source_name, line_no, "unknown POS '" + cols[1] + "'");
    }
    entry.pos = *pos;
    entry.romanization = cols[2];
    if (!cols[3].empty()) entry.translations = detail::split(cols[3], '|');
    if (!cols[4].empty()) {
      for (const auto& name : detail::split(cols[4], ';')) {
        const auto flag = parse_flag(name);
        if (!flag) {
          throw ParseError(source_name, line_no, "unknown flag '" + name + "'");
        }
        entry.flags.set(*flag);
      }
    }
    try {
      validate(entry);
    } catch (const ValidationError& e) {
      throw ParseError(source_name, line_no, e.what());
    } catch (const Error& e) {
      throw ParseError(source_name, line_no, e.what());
    }

    const auto existing = lex.lookup(entry.headword);
    if (std::find(existing.begin(), existing.end(), entry) != existing.end()) {
      continue;
    }
    lex.insert(std::move(entry));
  }
  return lex;
}

std::span<const LexiconEntry> Lexicon::lookup(std::string_view surface) const {
  const auto it = entries_.find(surface);
  if (it == entries_.end()) return {};
  return it->second;
}

bool Lexicon::contains(std::string_view surface) const {
  return entries_.find(surface) != entries_.end();
}

std::span<const std::string> Lexicon::by_romanization(
    std::string_view romanization) const {
  const auto it = romanization_index_.find(romanization);
  if (it == romanization_index_.end()) return {};
  return it->second;
}

std::string Lexicon::serialize() const {
  std::ostringstream out;
  out << "# headword\tpos\tromanization\ttranslations\tflags\n";
  for (const auto& head : order_) {
    for (const auto& e : entries_.at(head)) {
      out << e.headword << '\t' << to_string(e.pos) << '\t' << e.romanization
          << '\t' << detail::join(e.translations, "|") << '\t';
      bool first = true;
      for (const auto& [flag, name] : kFlagNames) {
        if (!e.flags.has(flag)) continue;
        if (!first) out << ';';
        out << name;
        first = false;
      }
      out << '\n';
    }
  }
  return out.str();
}

bool operator==(const Lexicon& a, const Lexicon& b) {
  return a.order_ == b.order_ && a.entries_ == b.entries_ &&
         a.max_headword_len_ == b.max_headword_len_;
}

Lexicon merge_custom(const Lexicon& base, const Lexicon& custom) {
  std::vector<LexiconEntry> merged;
  merged.reserve(base.entry_count() + custom.entry_count());
  // Headword order: base first-appearance, then custom-only headwords.
  auto append_senses = [&](const std::string& head) {
    for (const auto& e : custom.lookup(head)) merged.push_back(e);
    for (const auto& e : base.lookup(head)) merged.push_back(e);
  };
  for (const auto& head : base.headwords()) append_senses(head);
  for (const auto& head : custom.headwords()) {
    if (!base.contains(head)) append_senses(head);
  }
  return Lexicon(std::move(merged));
}

}  // namespace hokcm
