#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "hokcm/lexicon.hpp"
#include "hokcm/metrics.hpp"
#include "hokcm/segmenter.hpp"
#include "hokcm/synthesizer.hpp"

using namespace hokcm;

namespace {

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(std::string(HOKCM_FIXTURE_DIR) + "/lexicon.tsv");
  return lex;
}

std::vector<std::string> random_sentences(std::size_t count, std::uint64_t seed) {
  const auto& heads = lexicon().headwords();
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s;
    const int parts = 3 + static_cast<int>(rng() % 10);
    for (int k = 0; k < parts; ++k) s += heads[rng() % heads.size()];
    s += "。";
    out.push_back(std::move(s));
  }
  return out;
}

void BM_Segment(benchmark::State& state) {
  const auto sentences = random_sentences(256, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(segment(sentences[i++ % sentences.size()], lexicon()));
  }
}
BENCHMARK(BM_Segment);

void BM_SwitchAndEmit(benchmark::State& state) {
  std::vector<SegmentedSentence> segs;
  for (const auto& s : random_sentences(256, 2)) segs.push_back(chunk_phrases(segment(s, lexicon())));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& seg = segs[i++ % segs.size()];
    const auto sw = find_switch_points(seg, lexicon(), Mode::CM);
    benchmark::DoNotOptimize(apply_switches(seg, sw, Mode::CM));
  }
}
BENCHMARK(BM_SwitchAndEmit);

void BM_SynthesizeCorpus(benchmark::State& state) {
  std::vector<ParallelPair> pairs;
  for (const auto& s : random_sentences(2000, 3)) pairs.push_back({"", s, ""});
  SynthesisOptions opt;
  opt.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_corpus(pairs, lexicon(), ReadingMap{}, opt));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_SynthesizeCorpus)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
  std::mt19937_64 rng(4);
  LangSeq tags;
  for (int i = 0; i < state.range(0); ++i) tags.push_back(static_cast<Tag>(rng() % 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_cmi(tags));
    benchmark::DoNotOptimize(compute_spf(tags));
  }
}
BENCHMARK(BM_Metrics)->Arg(16)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
