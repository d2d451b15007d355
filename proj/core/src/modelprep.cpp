#include "hokcm/modelprep.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "hokcm/errors.hpp"
#include "hokcm/synthesizer.hpp"
#include "hokcm/utf8.hpp"
#include "text_util.hpp"

namespace hokcm {

Vocab::Vocab(std::vector<std::string> tokens, std::vector<std::string> specials)
    : tokens_(std::move(tokens)), specials_(std::move(specials)) {
  if (specials_.size() > tokens_.size() ||
      !std::equal(specials_.begin(), specials_.end(), tokens_.begin())) {
    throw ValidationError("specials", "special tokens must occupy the lowest ids");
  }
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) {
      throw ValidationError("token", "empty token at id " + std::to_string(i));
    }
    if (!ids_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw ValidationError("token", "duplicate token '" + tokens_[i] + "'");
    }
  }
  recompute_hok_only();
}

void Vocab::recompute_hok_only() {
  hok_only_.clear();
  for (const auto& tok : tokens_) {
    std::string_view view = tok;
    if (view.size() > kHokkienMark.size() && view.ends_with(kHokkienMark)) {
      view.remove_suffix(kHokkienMark.size());
      if (!ids_.count(std::string(view))) hok_only_.emplace(view);
    }
  }
}

bool Vocab::is_priority(std::int32_t id) const {
  if (is_special(id)) return false;
  std::string_view tok = token(id);
  if (tok.ends_with(kHokkienMark)) tok.remove_suffix(kHokkienMark.size());
  return hok_only_.count(std::string(tok)) != 0;
}

Vocab Vocab::load(const std::filesystem::path& path,
                  const std::vector<std::string>& specials) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    tokens.push_back(line);
  }
  std::vector<std::string> present;
  for (std::size_t i = 0; i < specials.size() && i < tokens.size(); ++i) {
    if (tokens[i] != specials[i]) break;
    present.push_back(specials[i]);
  }
  try {
    return Vocab(std::move(tokens), std::move(present));
  } catch (const ValidationError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string Vocab::serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary " + path.string());
  out << serialize();
}

std::optional<std::int32_t> Vocab::id_of(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Characters that enter the vocabulary bare even in a Hokkien stream.
bool is_shared_symbol(char32_t cp) {
  return utf8::is_latin_letter(cp) || utf8::is_roman_numeral(cp) ||
         utf8::is_language_independent(cp);
}

}  // namespace

Vocab build_vocab(std::span<const CorpusStream> corpora,
                  const std::vector<std::string>& specials) {
  std::vector<std::string> tokens(specials.begin(), specials.end());
  std::set<std::string> seen(specials.begin(), specials.end());
  auto add = [&](std::string tok) {
    if (seen.insert(tok).second) tokens.push_back(std::move(tok));
  };
  for (const auto& stream : corpora) {
    for (const auto& line : stream.lines) {
      if (stream.kind == StreamKind::MIXED) {
        for (const auto& e : parse_rendered(line)) {
          add(e.lang == Lang::HOK ? e.ch + std::string(kHokkienMark) : e.ch);
        }
        continue;
      }
      for (char32_t cp : utf8::decode(line)) {
        if (utf8::is_space(cp)) continue;
        std::string ch = utf8::encode(cp);
        if (stream.kind == StreamKind::HOK && !is_shared_symbol(cp)) {
          ch += kHokkienMark;
        }
        add(std::move(ch));
      }
    }
  }
  return Vocab(std::move(tokens), specials);
}

bool is_placeholder(std::string_view token) {
  static const std::regex pattern(R"(\[unused[0-9]+\])");
  return std::regex_match(token.begin(), token.end(), pattern);
}

Vocab replace_unused(const Vocab& base, std::span<const std::string> new_chars) {
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (is_placeholder(base.tokens()[i])) slots.push_back(i);
  }
  if (slots.size() < new_chars.size()) {
    const std::size_t shortfall = new_chars.size() - slots.size();
    throw CapacityError(shortfall, "need " + std::to_string(new_chars.size()) +
                                       " placeholder slots but only " +
                                       std::to_string(slots.size()) +
                                       " exist (shortfall " +
                                       std::to_string(shortfall) + ")");
  }
  std::vector<std::string> tokens = base.tokens();
  for (std::size_t k = 0; k < new_chars.size(); ++k) tokens[slots[k]] = new_chars[k];
  Vocab out(std::move(tokens), base.specials());
  for (const auto& c : new_chars) out.hok_only_.insert(c);
  return out;
}

std::vector<Lang> assign_language_ids(std::span<const std::string> tokens) {
  std::vector<Lang> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    out.push_back(std::string_view(t).ends_with(kHokkienMark) ? Lang::HOK : Lang::ZH);
  }
  return out;
}

namespace {

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t bounded_draw(std::mt19937_64& rng, std::size_t bound) {
  // Unbiased integer in [0, bound).
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

}  // namespace

MaskPlan plan_mlm_masks(std::span<const std::int32_t> ids, const Vocab& vocab,
                        double base_p, double multiplier, std::uint64_t seed) {
  if (!(base_p >= 0.0 && base_p <= 1.0)) {
    throw DomainError("base_p must lie in [0, 1]");
  }
  if (!(multiplier >= 1.0)) throw DomainError("multiplier must be >= 1");
  if (multiplier * base_p > 1.0) {
    throw DomainError("multiplier * base_p must not exceed 1");
  }
  MaskPlan plan;
  plan.base_p = base_p;
  plan.priority_multiplier = multiplier;
  const double priority_p = std::min(1.0, multiplier * base_p);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (vocab.is_special(ids[i])) continue;
    const double p = vocab.is_priority(ids[i]) ? priority_p : base_p;
    // Draw for every position so plans are stable under rate changes.
    if (unit_draw(rng) < p) plan.positions.push_back(i);
  }
  return plan;
}

std::array<std::size_t, 3> split_sizes(std::size_t n,
                                       const std::array<unsigned, 3>& ratios) {
  const std::size_t total = std::accumulate(ratios.begin(), ratios.end(), std::size_t{0});
  if (total == 0) throw ValidationError("ratios", "ratios must not all be zero");
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    sizes[k] = n * ratios[k] / total;
    assigned += sizes[k];
  }
  // Leftovers (fewer than 3) go to train, then valid, then test.
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    if (ratios[k] == 0) continue;
    ++sizes[k];
    ++assigned;
  }
  return sizes;
}

SplitResult split_corpus(std::span<const std::string> ids, const SplitSpec& spec) {
  std::set<std::string> known;
  for (const auto& id : ids) {
    if (!known.insert(id).second) {
      throw ValidationError("id", "duplicate sentence id '" + id + "'");
    }
  }
  std::vector<std::string> missing;
  for (const auto& pad : spec.pad_ids) {
    if (!known.count(pad)) missing.push_back(pad);
  }
  if (!missing.empty()) {
    throw ValidationError("pad_ids", "unknown PAD ids: " + detail::join(missing, ", "));
  }

  SplitResult out;
  std::vector<std::string> rest;
  for (const auto& id : ids) {
    (spec.pad_ids.count(id) ? out.pad : rest).push_back(id);
  }
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = rest.size(); i > 1; --i) {
    std::swap(rest[i - 1], rest[bounded_draw(rng, i)]);
  }
  const auto sizes = split_sizes(rest.size(), spec.ratios);
  auto it = rest.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  out.valid.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  out.test.assign(it, rest.end());
  return out;
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::CLM:
      return "CLM";
    case Objective::MLM:
      return "MLM";
    case Objective::TLM:
      return "TLM";
  }
  return "MLM";
}

std::string_view to_string(Init init) {
  return init == Init::Scratch ? "scratch" : "previous_stage";
}

std::string StageManifest::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  auto stages_json = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    auto objectives = nlohmann::ordered_json::array();
    for (auto o : s.objectives) objectives.push_back(to_string(o));
    stages_json.push_back({{"objectives", objectives},
                           {"corpora", s.corpora},
                           {"init", to_string(s.init)}});
  }
  j["stages"] = std::move(stages_json);
  return j.dump(2);
}

StageManifest emit_stage_manifest(std::string_view model_name) {
  using O = Objective;
  const Stage zh_mlm{{O::MLM}, {"ZH"}, Init::Scratch};
  const Stage mono_continue{{O::CLM, O::MLM}, {"ZH", "HOK"}, Init::PreviousStage};
  const Stage tlm_parallel{{O::TLM}, {"HOK-ZH"}, Init::PreviousStage};
  const Stage tlm_cm{{O::TLM}, {"CM-ZH"}, Init::PreviousStage};

  StageManifest m;
  m.model_name = std::string(model_name);
  if (model_name == "XLM_M-M") {
    m.stages = {{{O::CLM, O::MLM}, {"ZH", "HOK"}, Init::Scratch}, tlm_parallel};
  } else if (model_name == "XLM_MT-M") {
    m.stages = {zh_mlm, mono_continue, tlm_parallel};
  } else if (model_name == "XLM_MT-C") {
    m.stages = {zh_mlm, mono_continue, tlm_cm};
  } else if (model_name == "XLM_MT-CT") {
    m.stages = {zh_mlm, mono_continue, tlm_parallel, tlm_cm};
  } else {
    throw ValidationError("model", "unknown model '" + std::string(model_name) +
                                       "'; expected one of XLM_M-M, XLM_MT-M, "
                                       "XLM_MT-C, XLM_MT-CT");
  }
  return m;
}

}  // namespace hokcm
