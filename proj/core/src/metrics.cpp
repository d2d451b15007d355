#include "hokcm/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hokcm/errors.hpp"
#include "hokcm/utf8.hpp"

namespace hokcm {

LangSeq lang_seq(const CodeMixedSentence& sentence) {
  LangSeq tags;
  tags.reserve(sentence.emitted.size());
  for (const auto& e : sentence.emitted) {
    if (utf8::is_language_independent(utf8::first(e.ch))) {
      tags.push_back(Tag::OTHER);
    } else {
      tags.push_back(e.lang == Lang::HOK ? Tag::HOK : Tag::ZH);
    }
  }
  return tags;
}

double compute_cmi(std::span<const Tag> tags) {
  if (tags.empty()) throw DomainError("CMI of an empty sequence");
  std::size_t hok = 0, zh = 0, other = 0;
  for (Tag t : tags) {
    switch (t) {
      case Tag::HOK:
        ++hok;
        break;
      case Tag::ZH:
        ++zh;
        break;
      case Tag::OTHER:
        ++other;
        break;
    }
  }
  const std::size_t dependent = tags.size() - other;
  if (dependent == 0) return 0.0;
  return 1.0 - static_cast<double>(std::max(hok, zh)) / static_cast<double>(dependent);
}

double compute_spf(std::span<const Tag> tags) {
  std::size_t boundaries = 0;
  std::size_t switches = 0;
  bool have_prev = false;
  Tag prev = Tag::OTHER;
  for (Tag t : tags) {
    if (t == Tag::OTHER) continue;
    if (have_prev) {
      ++boundaries;
      if (t != prev) ++switches;
    }
    prev = t;
    have_prev = true;
  }
  if (boundaries == 0) return 0.0;
  return static_cast<double>(switches) / static_cast<double>(boundaries);
}

CorpusStats corpus_stats(std::span<const CodeMixedSentence> corpus) {
  CorpusStats stats;
  stats.sentence_count = corpus.size();
  if (corpus.empty()) return stats;

  double cmi_sum = 0.0;
  double spf_sum = 0.0;
  std::set<std::string> symbols;
  std::set<std::string> switched;
  for (const auto& s : corpus) {
    const LangSeq tags = lang_seq(s);
    if (!tags.empty()) {
      cmi_sum += compute_cmi(tags);
      spf_sum += compute_spf(tags);
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] == Tag::OTHER) continue;
      if (tags[i] == Tag::ZH) {
        symbols.insert(s.emitted[i].ch);
        switched.insert(s.emitted[i].ch);
      } else {
        symbols.insert(s.emitted[i].ch + std::string(kHokkienMark));
      }
    }
  }
  const double n = static_cast<double>(corpus.size());
  stats.cmi_mean = cmi_sum / n;
  stats.spf_mean = spf_sum / n;
  stats.symbol_coverage =
      symbols.empty() ? 0.0
                      : static_cast<double>(switched.size()) /
                            static_cast<double>(symbols.size());
  return stats;
}

}  // namespace hokcm
