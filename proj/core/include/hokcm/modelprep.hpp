#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hokcm/segmenter.hpp"

namespace hokcm {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

/// XLM special tokens, lowest ids first.
inline const std::vector<std::string> kXlmSpecials = {"<s>", "</s>", "<pad>",
                                                      "<unk>", "<mask>"};

/// Character-level vocabulary. Hokkien characters are stored as `c_@`.
class Vocab {
 public:
  Vocab() = default;
  /// `tokens` in id order; `specials` must be its prefix. Throws
  /// ValidationError on duplicates or a specials mismatch.
  Vocab(std::vector<std::string> tokens, std::vector<std::string> specials);

  /// One token per line, id = line number - 1.
  static Vocab load(const std::filesystem::path& path,
                    const std::vector<std::string>& specials);
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

  std::optional<std::int32_t> id_of(std::string_view token) const;
  const std::string& token(std::int32_t id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::string>& specials() const { return specials_; }
  bool is_special(std::int32_t id) const {
    return id >= 0 && static_cast<std::size_t>(id) < specials_.size();
  }

  /// Base characters that exist only as Hokkien (`c_@` present, bare `c`
  /// absent), plus characters placed by replace_unused.
  const std::set<std::string>& hok_only() const { return hok_only_; }
  /// True when the token at `id` holds a Hokkien-only character.
  bool is_priority(std::int32_t id) const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_ && a.specials_ == b.specials_;
  }

 private:
  friend Vocab replace_unused(const Vocab&, std::span<const std::string>);
  void recompute_hok_only();

  std::vector<std::string> tokens_;
  std::vector<std::string> specials_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::set<std::string> hok_only_;
};

enum class StreamKind : std::uint8_t { HOK, ZH, MIXED };

/// A labelled corpus. MIXED lines are rendered code-mixed strings.
struct CorpusStream {
  StreamKind kind = StreamKind::ZH;
  std::vector<std::string> lines;
};

/// Ids: specials first, then first occurrence across streams in order.
/// Throws ContractError on a malformed MIXED token.
Vocab build_vocab(std::span<const CorpusStream> corpora,
                  const std::vector<std::string>& specials = kXlmSpecials);

/// `[unusedN]` style placeholder slots.
bool is_placeholder(std::string_view token);

/// Writes new_chars into placeholder slots in id order.
/// Throws CapacityError when there are fewer placeholders than characters.
Vocab replace_unused(const Vocab& base, std::span<const std::string> new_chars);

// ---------------------------------------------------------------------------
// Language ids and masking
// ---------------------------------------------------------------------------

/// `_@`-suffixed tokens are Hokkien, everything else Mandarin.
std::vector<Lang> assign_language_ids(std::span<const std::string> tokens);

struct MaskPlan {
  std::vector<std::size_t> positions;
  double base_p = 0.15;
  double priority_multiplier = 2.0;
};

/// Independent Bernoulli masking per non-special position; Hokkien-only
/// characters use multiplier * base_p. Throws DomainError on bad rates.
MaskPlan plan_mlm_masks(std::span<const std::int32_t> ids, const Vocab& vocab,
                        double base_p, double multiplier, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Splits and stage manifests
// ---------------------------------------------------------------------------

struct SplitSpec {
  std::array<unsigned, 3> ratios{8, 1, 1};
  std::uint64_t seed = 0;
  std::set<std::string> pad_ids;
};

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
  std::vector<std::string> pad;
};

/// Pulls the PAD ids out, shuffles the rest by seed and cuts by ratio,
/// giving leftover sentences to train, then valid, then test.
/// Throws ValidationError for unknown PAD ids or duplicate corpus ids.
SplitResult split_corpus(std::span<const std::string> ids, const SplitSpec& spec);

/// Exact partition sizes used by split_corpus for `n` non-PAD sentences.
std::array<std::size_t, 3> split_sizes(std::size_t n,
                                       const std::array<unsigned, 3>& ratios);

enum class Objective : std::uint8_t { CLM, MLM, TLM };
enum class Init : std::uint8_t { Scratch, PreviousStage };

std::string_view to_string(Objective objective);
std::string_view to_string(Init init);

struct Stage {
  std::vector<Objective> objectives;
  std::vector<std::string> corpora;
  Init init = Init::Scratch;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct StageManifest {
  std::string model_name;
  std::vector<Stage> stages;

  std::string to_json() const;
};

inline const std::array<std::string_view, 4> kModelNames = {
    "XLM_M-M", "XLM_MT-M", "XLM_MT-C", "XLM_MT-CT"};

/// Throws ValidationError for an unknown model name.
StageManifest emit_stage_manifest(std::string_view model_name);

}  // namespace hokcm
