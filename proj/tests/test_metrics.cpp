#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixture.hpp"
#include "hokcm/errors.hpp"
#include "hokcm/metrics.hpp"

using namespace hokcm;
using hokcm::test::fixture_lines;

namespace {

constexpr Tag H = Tag::HOK;
constexpr Tag Z = Tag::ZH;
constexpr Tag O = Tag::OTHER;

// Oracles written from the definitions: counts for CMI, OTHER-stripped
// adjacent pairs for SPF.
double oracle_cmi(const LangSeq& s) {
  const auto h = std::count(s.begin(), s.end(), H);
  const auto z = std::count(s.begin(), s.end(), Z);
  if (h + z == 0) return 0.0;
  return static_cast<double>(std::min(h, z)) / static_cast<double>(h + z);
}

double oracle_spf(const LangSeq& s) {
  LangSeq bearing;
  std::copy_if(s.begin(), s.end(), std::back_inserter(bearing), [](Tag t) { return t != O; });
  if (bearing.size() < 2) return 0.0;
  int changes = 0;
  for (std::size_t i = 1; i < bearing.size(); ++i) changes += bearing[i] != bearing[i - 1];
  return static_cast<double>(changes) / static_cast<double>(bearing.size() - 1);
}

CodeMixedSentence from_rendered(const std::string& line) {
  CodeMixedSentence s;
  s.emitted = parse_rendered(line);
  return s;
}

}  // namespace

TEST_CASE("CMI examples") {
  CHECK(compute_cmi(LangSeq{H, H, H}) == 0.0);
  CHECK(compute_cmi(LangSeq{H, H, Z, H}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(compute_cmi(LangSeq{O, O}) == 0.0);
  CHECK_THROWS_AS(compute_cmi(LangSeq{}), DomainError);
}

TEST_CASE("SPF examples") {
  CHECK(compute_spf(LangSeq{H, H, H}) == 0.0);
  CHECK(compute_spf(LangSeq{H, Z, H, Z}) == 1.0);
  CHECK(compute_spf(LangSeq{H, H, Z, Z}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(compute_spf(LangSeq{}) == 0.0);
  CHECK(compute_spf(LangSeq{H, O, O}) == 0.0);
}

TEST_CASE("exhaustive agreement with the oracle up to length 8") {
  std::size_t cases = 0;
  for (std::size_t len = 1; len <= 8; ++len) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      LangSeq s;
      for (std::size_t c = code, i = 0; i < len; ++i, c /= 3) s.push_back(static_cast<Tag>(c % 3));
      CHECK(std::abs(compute_cmi(s) - oracle_cmi(s)) <= 1e-12);
      CHECK(std::abs(compute_spf(s) - oracle_spf(s)) <= 1e-12);
      ++cases;
    }
  }
  CHECK(cases == 9840);
}

TEST_CASE("invariances") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 500; ++round) {
    LangSeq s;
    const int len = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) s.push_back(static_cast<Tag>(rng() % 3));
    const double cmi = compute_cmi(s);
    const double spf = compute_spf(s);

    LangSeq shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(compute_cmi(shuffled) == cmi);

    LangSeq reversed(s.rbegin(), s.rend());
    CHECK(compute_spf(reversed) == spf);

    LangSeq padded = s;
    padded.insert(padded.begin() + static_cast<long>(rng() % (padded.size() + 1)), O);
    CHECK(compute_cmi(padded) == cmi);
    CHECK(compute_spf(padded) == spf);

    CHECK(cmi >= 0.0);
    CHECK(cmi <= 0.5);
    CHECK(spf >= 0.0);
    CHECK(spf <= 1.0);
  }
}

TEST_CASE("lang_seq maps punctuation and digits to OTHER") {
  const auto s = from_rendered("這_@ 个_@ 不 可 , 7 。");
  CHECK(lang_seq(s) == LangSeq{H, H, Z, Z, O, O, O});
}

TEST_CASE("golden CM rows against hand counts") {
  const auto lines = fixture_lines("synth_golden_cm.expected");
  REQUIRE(lines.size() == 2);
  const auto first = lang_seq(from_rendered(lines[0]));
  CHECK(compute_cmi(first) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
  CHECK(compute_spf(first) == doctest::Approx(4.0 / 13.0).epsilon(1e-12));
  const auto second = lang_seq(from_rendered(lines[1]));
  CHECK(compute_cmi(second) == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
  CHECK(compute_spf(second) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));

  const std::vector<CodeMixedSentence> corpus{from_rendered(lines[0]), from_rendered(lines[1])};
  const auto stats = corpus_stats(corpus);
  CHECK(stats.sentence_count == 2);
  CHECK(stats.cmi_mean == doctest::Approx((3.0 / 7.0 + 4.0 / 15.0) / 2).epsilon(1e-12));
  CHECK(stats.spf_mean == doctest::Approx((4.0 / 13.0 + 2.0 / 7.0) / 2).epsilon(1e-12));
  // 10 Mandarin symbols against 17 distinct Hokkien ones.
  CHECK(stats.symbol_coverage == doctest::Approx(10.0 / 27.0).epsilon(1e-12));
}

TEST_CASE("corpus means") {
  const std::vector<CodeMixedSentence> mono{from_rendered("你_@ 好_@")};
  const auto a = corpus_stats(mono);
  CHECK(a.cmi_mean == 0.0);
  CHECK(a.spf_mean == 0.0);
  CHECK(a.symbol_coverage == 0.0);

  // CMI 0.25 and 0.75 cannot both come from two languages, so the second
  // sentence is checked through its own value.
  const std::vector<CodeMixedSentence> pair{from_rendered("你_@ 好_@ 好 你_@"),
                                            from_rendered("你_@ 好")};
  const auto b = corpus_stats(pair);
  CHECK(b.cmi_mean == doctest::Approx((0.25 + 0.5) / 2).epsilon(1e-12));

  const auto empty = corpus_stats({});
  CHECK(empty.sentence_count == 0);
  CHECK(empty.cmi_mean == 0.0);
  CHECK(empty.spf_mean == 0.0);
  CHECK(empty.symbol_coverage == 0.0);
}
