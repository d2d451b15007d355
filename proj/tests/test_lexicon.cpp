#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixture.hpp"
#include "hokcm/errors.hpp"
#include "hokcm/lexicon.hpp"
#include "hokcm/utf8.hpp"

using namespace hokcm;
using hokcm::test::fixture;
using hokcm::test::fixture_lexicon;
using hokcm::test::parse_lexicon;

TEST_CASE("a function row parses into one entry") {
  const auto lex = parse_lexicon("毋通\tAUX\t\t不要\tfunction\n");
  const auto senses = lex.lookup("毋通");
  REQUIRE(senses.size() == 1);
  CHECK(senses[0].headword == "毋通");
  CHECK(senses[0].pos == Pos::AUX);
  CHECK(senses[0].romanization.empty());
  CHECK(senses[0].translations == std::vector<std::string>{"不要"});
  CHECK(senses[0].flags == FlagSet{Flag::Function});
  CHECK(senses[0].is_function_unit());
}

TEST_CASE("header-only file gives an empty lexicon") {
  const auto lex = parse_lexicon("# headword\tpos\tromanization\ttranslations\tflags\n");
  CHECK(lex.entry_count() == 0);
  CHECK(lex.headword_count() == 0);
  CHECK(lex.max_headword_len() == 1);
}

TEST_CASE("malformed rows name their line") {
  SUBCASE("unknown POS") {
    try {
      parse_lexicon("# c\n毋通\tAUX\t\t不要\tfunction\n物件\tXYZ\t\t東西\t\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.source() == "inline.tsv");
    }
  }
  SUBCASE("wrong column count") {
    try {
      parse_lexicon("物件\tN\t東西\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("unknown flag") {
    CHECK_THROWS_AS(parse_lexicon("物件\tN\t\t東西\tslang\n"), ParseError);
  }
  SUBCASE("field invariant") {
    CHECK_THROWS_AS(parse_lexicon("阿明\tN\t\t阿明\tperson\n"), ParseError);
    CHECK_THROWS_AS(parse_lexicon("錢\tN\t\t金\tidentity\n"), ParseError);
  }
}

TEST_CASE("identical duplicate rows collapse") {
  const auto lex = parse_lexicon("錢\tN\t\t錢\tidentity\n錢\tN\t\t錢\tidentity\n錢\tN\t\t金\t\n");
  CHECK(lex.lookup("錢").size() == 2);
  CHECK(lex.entry_count() == 2);
}

TEST_CASE("entry validation") {
  LexiconEntry ok{"台北", Pos::PROPER_LOC, "", {"台北"}, {Flag::Location, Flag::Identity}};
  CHECK_NOTHROW(validate(ok));
  LexiconEntry blank{"", Pos::N, "", {}, {}};
  CHECK_THROWS_AS(validate(blank), ValidationError);
  LexiconEntry spaced{"物 件", Pos::N, "", {}, {}};
  CHECK_THROWS_AS(validate(spaced), ValidationError);
  LexiconEntry loc{"台北", Pos::N, "", {"台北"}, {Flag::Location}};
  CHECK_THROWS_AS(validate(loc), ValidationError);
}

TEST_CASE("fixture lookups") {
  const auto& lex = fixture_lexicon();
  const auto sijie = lex.lookup("一四界");
  REQUIRE(sijie.size() == 1);
  CHECK(sijie[0].pos == Pos::ADV);

  const auto yijian = lex.lookup("意見");
  REQUIRE(yijian.size() == 1);
  CHECK(yijian[0].translations == std::vector<std::string>{"意見"});
  CHECK(yijian[0].flags == FlagSet{Flag::Identity});
  CHECK(yijian[0].is_precise());

  CHECK(lex.lookup("不存在").empty());
  CHECK_FALSE(lex.contains("不存在"));
  CHECK(lex.max_headword_len() == 5);
}

TEST_CASE("romanization index resolves to matching entries") {
  const auto& lex = fixture_lexicon();
  const auto heads = lex.by_romanization("tsı̍t");
  REQUIRE(heads.size() == 1);
  CHECK(heads[0] == "一");
  const auto kah = lex.by_romanization("kah");
  CHECK(kah.size() == 2);
  for (const auto& h : lex.headwords()) {
    for (const auto& e : lex.lookup(h)) {
      if (e.romanization.empty()) continue;
      const auto back = lex.by_romanization(e.romanization);
      CHECK(std::find(back.begin(), back.end(), h) != back.end());
    }
  }
  CHECK(lex.by_romanization("zzz").empty());
}

TEST_CASE("max_headword_len tracks the longest headword") {
  const auto& lex = fixture_lexicon();
  std::size_t longest = 1;
  for (const auto& h : lex.headwords()) longest = std::max(longest, utf8::length(h));
  CHECK(lex.max_headword_len() == longest);
}

TEST_CASE("merge_custom puts custom senses first") {
  const auto base = parse_lexicon("深夜\tN\t\t深夜\tidentity\n意見\tN\t\t意見\tidentity\n");
  const auto custom = parse_lexicon("深夜\tN\t\t子夜\t\n");
  const auto merged = merge_custom(base, custom);
  const auto senses = merged.lookup("深夜");
  REQUIRE(senses.size() == 2);
  CHECK(senses[0].translations == std::vector<std::string>{"子夜"});
  CHECK(senses[1].translations == std::vector<std::string>{"深夜"});
  CHECK(merged.entry_count() == 3);
}

TEST_CASE("merge with an empty custom lexicon is the identity") {
  const auto base = parse_lexicon("意見\tN\t\t意見\tidentity\n");
  CHECK(merge_custom(base, Lexicon{}) == base);
}

TEST_CASE("disjoint merge adds entry counts") {
  const auto& base = fixture_lexicon();
  const auto custom = Lexicon::load(fixture("custom.tsv"));
  const auto merged = merge_custom(base, custom);
  CHECK(merged.entry_count() == base.entry_count() + custom.entry_count());
  for (const auto& h : merged.headwords()) {
    CHECK((base.contains(h) || custom.contains(h)));
    CHECK(merged.lookup(h).size() == base.lookup(h).size() + custom.lookup(h).size());
  }
}

TEST_CASE("lookup is stable across calls") {
  const auto& lex = fixture_lexicon();
  const auto before = lex.serialize();
  const auto a = lex.lookup("袂使");
  const auto b = lex.lookup("袂使");
  CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
  CHECK(lex.serialize() == before);
}

TEST_CASE("serialize and parse round-trip") {
  const auto& lex = fixture_lexicon();
  CHECK(parse_lexicon(lex.serialize()) == lex);
}

TEST_CASE("round-trip holds for random lexicons") {
  const std::vector<std::string> chars{"佮", "个", "食", "飯", "厝", "囡", "仔", "媠"};
  const std::vector<Pos> tags{Pos::N, Pos::V, Pos::ADJ, Pos::ADV, Pos::CLF};
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    std::vector<LexiconEntry> entries;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      LexiconEntry e;
      const int len = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < len; ++k) e.headword += chars[rng() % chars.size()];
      e.pos = tags[rng() % tags.size()];
      if (rng() % 2) e.romanization = "r" + std::to_string(rng() % 5);
      const int t = static_cast<int>(rng() % 3);
      for (int k = 0; k < t; ++k) e.translations.push_back(chars[rng() % chars.size()]);
      if (rng() % 3 == 0) e.flags.set(Flag::Function);
      if (std::find(entries.begin(), entries.end(), e) == entries.end()) entries.push_back(e);
    }
    const Lexicon lex(entries);
    CHECK(parse_lexicon(lex.serialize()) == lex);
  }
}
