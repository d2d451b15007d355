// hokcm: command-line front end for corpus synthesis, metrics, model data
// preparation and the annotation service.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hokcm/annotation.hpp"
#include "hokcm/annotation_server.hpp"
#include "hokcm/errors.hpp"
#include "hokcm/lexicon.hpp"
#include "hokcm/metrics.hpp"
#include "hokcm/modelprep.hpp"
#include "hokcm/normalizer.hpp"
#include "hokcm/segmenter.hpp"
#include "hokcm/synthesizer.hpp"

namespace fs = std::filesystem;
using namespace hokcm;

namespace {

struct LexiconArgs {
  std::string base;
  std::string custom;
};

void add_lexicon_options(CLI::App* cmd, LexiconArgs& args) {
  cmd->add_option("--lexicon", args.base, "Base lexicon TSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--custom", args.custom, "Custom lexicon TSV, senses ahead of the base")
      ->check(CLI::ExistingFile);
}

Lexicon load_lexicon(const LexiconArgs& args) {
  Lexicon base = Lexicon::load(args.base);
  if (args.custom.empty()) return base;
  return merge_custom(base, Lexicon::load(args.custom));
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::string line;
  auto consume = [&](std::istream& in) {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  };
  if (path.empty() || path == "-") {
    consume(std::cin);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    consume(in);
  }
  return lines;
}

// Output goes to `path`, or stdout when empty / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<CodeMixedSentence> read_corpus(const std::string& path) {
  std::vector<CodeMixedSentence> corpus;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      corpus.push_back(code_mixed_from_json(lines[i]));
    } catch (const std::exception& e) {
      throw ParseError(path, i + 1, e.what());
    }
  }
  return corpus;
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::vector<nlohmann::json> records;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      records.push_back(nlohmann::json::parse(lines[i]));
    } catch (const std::exception& e) {
      throw ParseError(path, i + 1, e.what());
    }
  }
  return records;
}

std::string report_line(const NormalizationReport& r) {
  std::ostringstream out;
  out << "input=" << r.input_count << " kept=" << r.kept
      << " rejected_hanlo=" << r.rejected_hanlo
      << " rejected_unknown=" << r.rejected_unknown
      << " tailo_converted=" << r.tailo_converted;
  return out.str();
}

std::vector<std::string> specials_for(const std::string& name) {
  if (name == "xlm") return kXlmSpecials;
  if (name == "none") return {};
  std::vector<std::string> out;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Rendered token lines from either a CM JSONL corpus or plain text.
std::vector<std::string> rendered_lines(const std::string& path) {
  std::vector<std::string> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    if (line.front() == '{') {
      try {
        out.push_back(nlohmann::json::parse(line).at("cm").get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError(path, i + 1, e.what());
      }
    } else {
      out.push_back(line);
    }
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

AnnotationServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hokkien-Mandarin code-mixed corpus toolkit"};
  app.set_config("--config", "", "TOML-style configuration file; flags override it");
  app.require_subcommand(1);

  // normalize ---------------------------------------------------------------
  LexiconArgs norm_lex;
  std::string norm_readings, norm_charset, norm_in, norm_out;
  auto* normalize = app.add_subcommand("normalize", "Normalize and filter raw Hokkien sentences");
  add_lexicon_options(normalize, norm_lex);
  normalize->add_option("--readings", norm_readings, "Reading-map TSV")->check(CLI::ExistingFile);
  normalize->add_option("--charset", norm_charset, "Allowed characters, one per line")
      ->check(CLI::ExistingFile);
  normalize->add_option("--in", norm_in, "Input sentences (default stdin)");
  normalize->add_option("--out", norm_out, "Kept sentences (default stdout)");

  // segment -----------------------------------------------------------------
  LexiconArgs seg_lex;
  std::string seg_in, seg_out;
  bool seg_pos = false, seg_chunks = false, seg_split_punct = false;
  auto* segment_cmd = app.add_subcommand("segment", "Segment sentences into lexicon tokens");
  add_lexicon_options(segment_cmd, seg_lex);
  segment_cmd->add_option("--in", seg_in, "Input sentences (default stdin)");
  segment_cmd->add_option("--out", seg_out, "Output (default stdout)");
  segment_cmd->add_flag("--pos", seg_pos, "Append /TAG to every token");
  segment_cmd->add_flag("--chunks", seg_chunks, "Emit one JSON record with phrase chunks per sentence");
  segment_cmd->add_flag("--split-punct", seg_split_punct, "Print punctuation as separate tokens");

  // synthesize --------------------------------------------------------------
  LexiconArgs syn_lex;
  std::string syn_mode = "cm", syn_readings, syn_charset, syn_in, syn_out;
  unsigned syn_jobs = 1;
  bool syn_keep = false;
  auto* synthesize = app.add_subcommand("synthesize", "Synthesize a code-mixed corpus from parallel text");
  add_lexicon_options(synthesize, syn_lex);
  synthesize->add_option("--mode", syn_mode, "cm or cmda")->check(CLI::IsMember({"cm", "cmda", "CM", "CMDA"}));
  synthesize->add_option("--readings", syn_readings, "Reading-map TSV")->check(CLI::ExistingFile);
  synthesize->add_option("--charset", syn_charset, "Allowed characters, one per line")
      ->check(CLI::ExistingFile);
  synthesize->add_option("--in", syn_in, "Parallel TSV: [id<TAB>]hokkien<TAB>mandarin")
      ->required()
      ->check(CLI::ExistingFile);
  synthesize->add_option("--out", syn_out, "Output JSONL (default stdout)");
  synthesize->add_option("--jobs", syn_jobs, "Worker threads")->check(CLI::PositiveNumber);
  synthesize->add_flag("--keep-unswitched", syn_keep, "Keep sentences without switch points");

  // stats -------------------------------------------------------------------
  std::string stats_in;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Code-mixing statistics of a synthesized corpus");
  stats->add_option("--in", stats_in, "Corpus JSONL")->required();
  stats->add_flag("--json", stats_json, "Print JSON instead of a table row");

  // split -------------------------------------------------------------------
  std::string split_in, split_dir, split_pad;
  std::uint64_t split_seed = 0;
  std::vector<unsigned> split_ratios{8, 1, 1};
  auto* split = app.add_subcommand("split", "Split a corpus into train/valid/test plus PAD");
  split->add_option("--in", split_in, "Corpus JSONL with an \"id\" field")->required()->check(CLI::ExistingFile);
  split->add_option("--out-dir", split_dir, "Output directory")->required();
  split->add_option("--pad-ids", split_pad, "Reserved PAD ids, one per line")->check(CLI::ExistingFile);
  split->add_option("--seed", split_seed, "Shuffle seed");
  split->add_option("--ratios", split_ratios, "train valid test ratios")->expected(3)->delimiter(',');

  // vocab -------------------------------------------------------------------
  auto* vocab = app.add_subcommand("vocab", "Build or patch a character vocabulary");
  vocab->require_subcommand(1);
  std::vector<std::string> vb_hok, vb_zh, vb_mixed;
  std::string vb_out, vb_specials = "xlm";
  auto* vocab_build = vocab->add_subcommand("build", "Build a vocabulary from labelled corpora");
  vocab_build->add_option("--hok", vb_hok, "Hokkien text files")->check(CLI::ExistingFile);
  vocab_build->add_option("--zh", vb_zh, "Mandarin text files")->check(CLI::ExistingFile);
  vocab_build->add_option("--mixed", vb_mixed, "Code-mixed JSONL or rendered text files")
      ->check(CLI::ExistingFile);
  vocab_build->add_option("--specials", vb_specials, "xlm, none, or a comma-separated list");
  vocab_build->add_option("--out", vb_out, "Vocabulary file (default stdout)");
  std::string vr_base, vr_chars, vr_out, vr_specials = "none";
  auto* vocab_replace = vocab->add_subcommand("replace-unused", "Write new characters into [unusedN] slots");
  vocab_replace->add_option("--base", vr_base, "Base vocabulary")->required()->check(CLI::ExistingFile);
  vocab_replace->add_option("--new-chars", vr_chars, "New characters, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  vocab_replace->add_option("--specials", vr_specials, "xlm, none, or a comma-separated list");
  vocab_replace->add_option("--out", vr_out, "Vocabulary file (default stdout)");

  // mask-preview ------------------------------------------------------------
  std::string mp_vocab, mp_in, mp_specials = "xlm", mp_mask = "<mask>";
  double mp_base = 0.15, mp_mult = 2.0;
  std::uint64_t mp_seed = 0;
  auto* mask = app.add_subcommand("mask-preview", "Show the MLM mask plan for rendered sentences");
  mask->add_option("--vocab", mp_vocab, "Vocabulary file")->required()->check(CLI::ExistingFile);
  mask->add_option("--in", mp_in, "Corpus JSONL or rendered text")->required();
  mask->add_option("--specials", mp_specials, "xlm, none, or a comma-separated list");
  mask->add_option("--mask-token", mp_mask, "Token printed at masked positions");
  mask->add_option("--base-p", mp_base, "Base masking probability");
  mask->add_option("--multiplier", mp_mult, "Priority multiplier for Hokkien-only characters");
  mask->add_option("--seed", mp_seed, "RNG seed");

  // manifest ----------------------------------------------------------------
  std::string mf_model, mf_out;
  auto* manifest = app.add_subcommand("manifest", "Emit the training-stage manifest of a model");
  manifest->add_option("--model", mf_model, "XLM_M-M, XLM_MT-M, XLM_MT-C or XLM_MT-CT")->required();
  manifest->add_option("--out", mf_out, "Output JSON (default stdout)");

  // kappa -------------------------------------------------------------------
  std::string kp_in;
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two raters");
  kappa->add_option("--in", kp_in, "TSV of label pairs (TOTALLY_AGREE, FAIR_AGREE, DISAGREE)")
      ->required();

  // serve -------------------------------------------------------------------
  std::string sv_in, sv_log = "annotations.jsonl", sv_host = "127.0.0.1", sv_policy = "phase1-first";
  std::vector<std::string> sv_annotators;
  std::size_t sv_pool = 100;
  std::uint64_t sv_seed = 0;
  int sv_port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("--in", sv_in, "Corpus JSONL to sample tasks from")->required()->check(CLI::ExistingFile);
  serve->add_option("--pool-size", sv_pool, "Number of sampled tasks");
  serve->add_option("--seed", sv_seed, "Sampling seed");
  serve->add_option("--annotator", sv_annotators, "Registered annotator id (repeatable)")->required();
  serve->add_option("--log", sv_log, "Append-only score log");
  serve->add_option("--host", sv_host, "Bind address");
  serve->add_option("--port", sv_port, "Port (0 picks a free one)");
  serve->add_option("--policy", sv_policy, "phase1-first or interleaved")
      ->check(CLI::IsMember({"phase1-first", "interleaved"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*normalize) {
      const Lexicon lex = load_lexicon(norm_lex);
      const ReadingMap readings = norm_readings.empty() ? ReadingMap{} : ReadingMap::load(norm_readings);
      std::optional<Charset> charset;
      if (!norm_charset.empty()) charset = Charset::load(norm_charset);
      NormalizationReport report;
      Output out(norm_out);
      for (const auto& line : read_lines(norm_in)) {
        if (line.empty()) continue;
        const auto cleaned = clean_sentence(line, readings, lex, charset ? &*charset : nullptr, report);
        if (cleaned.keep) out.stream() << cleaned.text << '\n';
      }
      std::cerr << report_line(report) << '\n';
    } else if (*segment_cmd) {
      const Lexicon lex = load_lexicon(seg_lex);
      Output out(seg_out);
      for (const auto& line : read_lines(seg_in)) {
        auto seg = segment(line, lex);
        if (seg_chunks) {
          out.stream() << to_json_line(chunk_phrases(std::move(seg))) << '\n';
        } else {
          out.stream() << format_tokens(seg, {seg_pos, seg_split_punct}) << '\n';
        }
      }
    } else if (*synthesize) {
      const Lexicon lex = load_lexicon(syn_lex);
      const ReadingMap readings = syn_readings.empty() ? ReadingMap{} : ReadingMap::load(syn_readings);
      std::optional<Charset> charset;
      if (!syn_charset.empty()) charset = Charset::load(syn_charset);
      const auto pairs = load_parallel(syn_in);
      SynthesisOptions options;
      options.mode = *parse_mode(syn_mode);
      options.keep_unswitched = syn_keep;
      options.jobs = syn_jobs;
      options.charset = charset ? &*charset : nullptr;
      const auto result = synthesize_corpus(pairs, lex, readings, options);
      Output out(syn_out);
      for (const auto& s : result.corpus) out.stream() << to_json_line(s) << '\n';
      std::cerr << report_line(result.report) << " unswitched=" << result.dropped_unswitched
                << " emitted=" << result.corpus.size() << '\n';
    } else if (*stats) {
      const auto corpus = read_corpus(stats_in);
      const auto s = corpus_stats(corpus);
      if (stats_json) {
        nlohmann::ordered_json j{{"sentences", s.sentence_count},
                                 {"symbol_coverage", s.symbol_coverage},
                                 {"cmi", s.cmi_mean},
                                 {"spf", s.spf_mean}};
        std::cout << j.dump() << '\n';
      } else {
        std::cout << "sentences\tsymbol_coverage(switched-type ratio)\tcmi\tspf\n"
                  << s.sentence_count << '\t' << std::fixed << std::setprecision(6)
                  << s.symbol_coverage << '\t' << s.cmi_mean << '\t' << s.spf_mean << '\n';
      }
    } else if (*split) {
      const auto records = read_jsonl(split_in);
      std::vector<std::string> ids;
      std::map<std::string, std::size_t> where;
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].contains("id")) {
          throw ParseError(split_in, i + 1, "record has no \"id\"");
        }
        const auto& idj = records[i].at("id");
        ids.push_back(idj.is_string() ? idj.get<std::string>() : idj.dump());
        where[ids.back()] = i;
      }
      SplitSpec spec;
      spec.seed = split_seed;
      spec.ratios = {split_ratios.at(0), split_ratios.at(1), split_ratios.at(2)};
      if (!split_pad.empty()) {
        for (const auto& l : read_lines(split_pad)) {
          if (!l.empty()) spec.pad_ids.insert(l);
        }
      }
      const auto result = split_corpus(ids, spec);
      fs::create_directories(split_dir);
      auto write = [&](const char* name, const std::vector<std::string>& part) {
        std::ofstream f(fs::path(split_dir) / name, std::ios::binary);
        if (!f) throw Error(std::string("cannot write ") + name);
        for (const auto& id : part) f << records[where.at(id)].dump() << '\n';
      };
      write("train.jsonl", result.train);
      write("valid.jsonl", result.valid);
      write("test.jsonl", result.test);
      write("pad.jsonl", result.pad);
      nlohmann::ordered_json meta{{"seed", split_seed},
                                  {"ratios", split_ratios},
                                  {"counts",
                                   {{"train", result.train.size()},
                                    {"valid", result.valid.size()},
                                    {"test", result.test.size()},
                                    {"pad", result.pad.size()}}}};
      std::ofstream(fs::path(split_dir) / "split.meta.json") << meta.dump(2) << '\n';
    } else if (*vocab_build) {
      std::vector<CorpusStream> streams;
      for (const auto& f : vb_hok) streams.push_back({StreamKind::HOK, read_lines(f)});
      for (const auto& f : vb_zh) streams.push_back({StreamKind::ZH, read_lines(f)});
      for (const auto& f : vb_mixed) streams.push_back({StreamKind::MIXED, rendered_lines(f)});
      const auto v = build_vocab(streams, specials_for(vb_specials));
      Output out(vb_out);
      out.stream() << v.serialize();
      std::cerr << "tokens=" << v.size() << " hok_only=" << v.hok_only().size() << '\n';
    } else if (*vocab_replace) {
      const auto base = Vocab::load(vr_base, specials_for(vr_specials));
      std::vector<std::string> chars;
      for (const auto& l : read_lines(vr_chars)) {
        if (!l.empty()) chars.push_back(l);
      }
      const auto v = replace_unused(base, chars);
      Output out(vr_out);
      out.stream() << v.serialize();
    } else if (*mask) {
      const auto v = Vocab::load(mp_vocab, specials_for(mp_specials));
      const auto unk = v.id_of("<unk>");
      std::uint64_t seed = mp_seed;
      for (const auto& line : rendered_lines(mp_in)) {
        const auto toks = split_ws(line);
        std::vector<std::int32_t> ids;
        for (const auto& t : toks) {
          const auto id = v.id_of(t);
          if (!id && !unk) throw Error("token '" + t + "' not in vocabulary and no <unk>");
          ids.push_back(id ? *id : *unk);
        }
        // One stream per sentence, derived from the base seed.
        const auto plan = plan_mlm_masks(ids, v, mp_base, mp_mult, seed++);
        std::vector<bool> masked(toks.size(), false);
        for (auto p : plan.positions) masked[p] = true;
        for (std::size_t i = 0; i < toks.size(); ++i) {
          if (i) std::cout << ' ';
          std::cout << (masked[i] ? mp_mask : toks[i]);
        }
        std::cout << '\n';
      }
    } else if (*manifest) {
      const auto m = emit_stage_manifest(mf_model);
      Output out(mf_out);
      out.stream() << m.to_json() << '\n';
    } else if (*kappa) {
      std::vector<AgreementLabel> a, b;
      const auto lines = read_lines(kp_in);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].front() == '#') continue;
        const auto fields = split_ws(lines[i]);
        if (fields.size() != 2) throw ParseError(kp_in, i + 1, "expected two labels");
        const auto la = parse_agreement_label(fields[0]);
        const auto lb = parse_agreement_label(fields[1]);
        if (!la || !lb) throw ParseError(kp_in, i + 1, "unknown agreement label");
        a.push_back(*la);
        b.push_back(*lb);
      }
      std::cout << std::fixed << std::setprecision(6) << cohen_kappa(std::span<const AgreementLabel>(a), std::span<const AgreementLabel>(b))
                << '\n';
    } else if (*serve) {
      std::vector<std::string> sentences;
      for (const auto& s : read_corpus(sv_in)) sentences.push_back(s.render());
      AnnotationStore store(sample_pool(sentences, sv_pool, sv_seed),
                            {sv_annotators.begin(), sv_annotators.end()}, sv_log,
                            sv_policy == "interleaved" ? QueuePolicy::Interleaved
                                                       : QueuePolicy::PhaseOneFirst);
      AnnotationServer server(store);
      const int port = server.bind(sv_host, sv_port);
      if (port < 0) throw Error("cannot bind " + sv_host + ":" + std::to_string(sv_port));
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cerr << "serving " << store.task_count() << " tasks on http://" << sv_host << ':'
                << port << '\n';
      server.listen_after_bind();
      g_server = nullptr;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
