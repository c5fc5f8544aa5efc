// didots command-line interface: corpus ingestion, synthetic pair building,
// adapter training, obfuscation, and the privacy/quality/feature reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "didots/adversary.hpp"
#include "didots/backend.hpp"
#include "didots/checkpoint.hpp"
#include "didots/corpus.hpp"
#include "didots/decode.hpp"
#include "didots/lingfeat.hpp"
#include "didots/llm_client.hpp"
#include "didots/metrics.hpp"
#include "didots/pipeline.hpp"
#include "didots/prompting.hpp"
#include "didots/report.hpp"
#include "didots/synthesis.hpp"
#include "didots/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& content) {
  if (!fs::path(path).parent_path().empty()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw didots::Error(didots::ErrorCode::IO_ERROR, "cannot write " + path);
  out << content;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw didots::Error(didots::ErrorCode::IO_ERROR, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json splits_json(const didots::SplitReport& report, std::size_t dropped) {
  json j;
  for (const auto& [key, count] : report.counts) {
    j["counts"][didots::split_name(key.first)][didots::label_name(key.second)] = count;
  }
  j["total"] = report.total();
  j["dropped"] = dropped;
  j["schema_version"] = 1;
  return j;
}

int dispatch(CLI::App& app) {
  using namespace didots;

  // ingest ------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Load and canonicalize a corpus");
  std::string in_path, in_format = "jsonl", out_path = "corpus.jsonl", report_path;
  ingest->add_option("--in", in_path, "input file")->required();
  ingest->add_option("--format", in_format, "jsonl|csv");
  ingest->add_option("--out", out_path, "canonical corpus JSONL");
  ingest->add_option("--report", report_path, "split-count report JSON");
  ingest->callback([&]() {
    CorpusFormat fmt = in_format == "csv" ? CorpusFormat::CSV : CorpusFormat::JSONL;
    LoadResult loaded = load_corpus(in_path, fmt);
    save_corpus(loaded.corpus, out_path);
    if (!report_path.empty()) {
      write_text(report_path,
                 splits_json(split_report(loaded.corpus), loaded.dropped).dump(2) + "\n");
    }
    std::cout << "wrote " << out_path << " (" << loaded.corpus.size() << " samples, "
              << loaded.dropped << " dropped)\n";
  });

  // fixture -----------------------------------------------------------------
  auto* fixture = app.add_subcommand("fixture", "Generate the synthetic fixture corpus");
  std::uint64_t fx_seed = 7;
  std::size_t fx_n = 25;
  std::string fx_out = "corpus.jsonl";
  fixture->add_option("--seed", fx_seed, "generator seed");
  fixture->add_option("--n", fx_n, "samples per (label x split) cell");
  fixture->add_option("--out", fx_out, "output corpus JSONL");
  fixture->callback([&]() {
    Corpus corpus = synth_fixture(fx_seed, fx_n);
    save_corpus(corpus, fx_out);
    std::cout << "wrote " << fx_out << " (" << corpus.size() << " samples)\n";
  });

  // prompts -----------------------------------------------------------------
  auto* prompts = app.add_subcommand("prompts", "Prompt template utilities");
  auto* prompts_show = prompts->add_subcommand("show", "Print a builtin template");
  std::string show_strategy = "kb";
  std::string template_file;
  prompts_show->add_option("--strategy", show_strategy, "zs|fs|kb");
  prompts_show->add_option("--file", template_file, "load template file instead");
  prompts_show->callback([&]() {
    PromptTemplate tmpl = template_file.empty()
                              ? builtin_template(parse_strategy(show_strategy))
                              : load_template(template_file);
    std::cout << template_to_string(tmpl);
  });

  // synthesize ----------------------------------------------------------------
  auto* synth = app.add_subcommand("synthesize", "Build the [original, obfuscated] pairs");
  std::string sy_corpus, sy_strategy = "kb", sy_out = "pairs.jsonl";
  std::string sy_endpoint = "mock:", sy_model = "mock", sy_audit, sy_split = "all";
  int sy_parallel = 1, sy_timeout = 30000;
  double sy_temperature = 0.7;
  synth->add_option("--corpus", sy_corpus, "corpus JSONL")->required();
  synth->add_option("--strategy", sy_strategy, "zs|fs|kb");
  synth->add_option("--split", sy_split, "train|val|test|all (which samples to pair)");
  synth->add_option("--out", sy_out, "pairs JSONL");
  synth->add_option("--endpoint", sy_endpoint, "generation endpoint or mock:");
  synth->add_option("--model", sy_model, "model id sent to the endpoint");
  synth->add_option("--parallel", sy_parallel, "fan-out width");
  synth->add_option("--timeout-ms", sy_timeout, "per-request timeout");
  synth->add_option("--temperature", sy_temperature, "sampling temperature");
  synth->add_option("--audit", sy_audit, "audit log JSONL path");
  synth->callback([&]() {
    if (const char* ep = std::getenv("DIDOTS_LLM_ENDPOINT"); ep && *ep) sy_endpoint = ep;
    Corpus corpus = load_corpus(sy_corpus, CorpusFormat::JSONL).corpus;
    if (sy_split != "all") corpus = corpus.filter_split(parse_split(sy_split));
    PromptTemplate tmpl = builtin_template(parse_strategy(sy_strategy));
    RetryPolicy policy;
    policy.timeout_ms = sy_timeout;
    LlmClient client(sy_endpoint, policy);
    if (!sy_audit.empty()) client.set_audit_log(sy_audit);
    SynthesisOptions options;
    options.model_id = sy_model;
    options.parallel = sy_parallel;
    options.temperature = sy_temperature;
    PairDataset pairs = build_pairs(corpus, tmpl.strategy, client, tmpl, options);
    save_pairs(pairs, sy_out);
    std::cout << "wrote " << sy_out << " (" << pairs.stats.total << " pairs, clean fraction "
              << pairs.stats.clean_fraction() << ")\n";
  });

  // train ---------------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Pretrain the student and fine-tune adapters");
  std::string tr_pairs, tr_peft = "lora", tr_out = "ckpt";
  int tr_rank = 16, tr_epochs = 40, tr_pre_epochs = 40, tr_batch = 8, tr_patience = 10;
  double tr_alpha = 32.0, tr_lr = 2e-3, tr_pre_lr = 2e-3;
  std::uint64_t tr_seed = 7;
  tr->add_option("--pairs", tr_pairs, "pairs JSONL")->required();
  tr->add_option("--peft", tr_peft, "lora|ia3|bottleneck|full");
  tr->add_option("--rank", tr_rank, "adapter rank");
  tr->add_option("--alpha", tr_alpha, "LoRA alpha");
  tr->add_option("--out", tr_out, "checkpoint directory");
  tr->add_option("--epochs", tr_epochs, "fine-tune epochs");
  tr->add_option("--pretrain-epochs", tr_pre_epochs, "copy-pretraining epochs");
  tr->add_option("--lr", tr_lr, "fine-tune learning rate");
  tr->add_option("--pretrain-lr", tr_pre_lr, "pretraining learning rate");
  tr->add_option("--batch", tr_batch, "batch size");
  tr->add_option("--patience", tr_patience, "early-stopping patience");
  tr->add_option("--seed", tr_seed, "training seed");
  tr->callback([&]() {
    RunConfig rc;
    rc.run_dir = fs::path(tr_out).parent_path().empty()
                     ? std::string(".")
                     : fs::path(tr_out).parent_path().string();
    rc.peft = tr_peft;
    rc.rank = tr_rank;
    rc.alpha = tr_alpha;
    rc.epochs = tr_epochs;
    rc.pretrain_epochs = tr_pre_epochs;
    rc.lr = tr_lr;
    rc.pretrain_lr = tr_pre_lr;
    rc.batch_size = tr_batch;
    rc.patience = tr_patience;
    rc.seed = tr_seed;
    // reuse the stage logic through a scratch run dir pointed at the inputs
    PairDataset pairs = load_pairs(tr_pairs);
    std::vector<std::string> texts;
    for (const auto& p : pairs.pairs) {
      texts.push_back(p.original.text);
      if (!p.obfuscated.empty()) texts.push_back(p.obfuscated);
    }
    WordTokenizer tokenizer = WordTokenizer::fit(texts);
    MicroConfig mc;
    mc.seed = tr_seed;
    MicroTransformer model(std::move(tokenizer), mc);

    std::vector<std::string> originals;
    for (const auto& p : pairs.pairs) originals.push_back(p.original.text);
    PairDataset pre = copy_pairs(originals);
    TrainConfig pre_cfg{tr_pre_epochs, tr_patience, tr_batch, tr_pre_lr, tr_seed};
    train(model, pre, pre_cfg, pre);

    if (tr_peft != "full" && tr_peft != "none") {
      AdapterSpec spec;
      spec.kind = parse_adapter_kind(tr_peft);
      spec.rank = tr_rank;
      spec.alpha = tr_alpha;
      model.attach_adapter(spec, tr_seed + 1);
    }
    PairDataset tune_train, tune_val;
    std::size_t i = 0;
    for (const auto& p : pairs.pairs) {
      if (pairs.pairs.size() >= 10 && i % 5 == 4) tune_val.pairs.push_back(p);
      else tune_train.pairs.push_back(p);
      ++i;
    }
    if (tune_val.pairs.empty()) tune_val.pairs = tune_train.pairs;
    tune_train.recompute_stats();
    tune_val.recompute_stats();
    TrainConfig tune_cfg{tr_epochs, tr_patience, tr_batch, tr_lr, tr_seed + 2};
    TrainReport report = train(model, tune_train, tune_cfg, tune_val);

    std::map<std::string, std::string> metadata;
    metadata["peft"] = tr_peft;
    metadata["updated_parameters"] = std::to_string(report.updated_parameters);
    save_checkpoint(model, tr_out, metadata);
    std::cout << "wrote " << tr_out << " (updated parameters: "
              << report.updated_parameters << ")\n";
  });

  // obfuscate -----------------------------------------------------------------
  auto* obf = app.add_subcommand("obfuscate", "Rewrite a corpus with a trained student");
  std::string ob_ckpt = "ckpt", ob_in, ob_out = "obf.jsonl";
  int ob_beams = 4, ob_max_len = 256;
  obf->add_option("--ckpt", ob_ckpt, "checkpoint directory");
  obf->add_option("--in", ob_in, "corpus JSONL")->required();
  obf->add_option("--beams", ob_beams, "beam width");
  obf->add_option("--max-length", ob_max_len, "max generated tokens");
  obf->add_option("--out", ob_out, "obfuscation pairs JSONL");
  obf->callback([&]() {
    MicroTransformer model = load_checkpoint(ob_ckpt);
    Corpus corpus = load_corpus(ob_in, CorpusFormat::JSONL).corpus;
    DecodeConfig dc;
    dc.beams = ob_beams;
    dc.max_length = ob_max_len;
    PairDataset out;
    for (const auto& s : corpus.samples()) {
      ObfuscationPair p;
      p.original = s;
      p.obfuscated = decode(model, s.text, dc);
      p.model_id = "didots-student";
      out.pairs.push_back(std::move(p));
    }
    out.recompute_stats();
    save_pairs(out, ob_out);
    std::cout << "wrote " << ob_out << " (" << out.pairs.size() << " rewrites)\n";
  });

  // attack --------------------------------------------------------------------
  auto* attack = app.add_subcommand("attack", "Privacy evaluation grid");
  std::string at_corpus, at_obf, at_out = "privacy.json";
  std::string at_kinds = "svm,neural", at_settings = "static,adaptive";
  double at_neural_lr = 0.01;
  int at_neural_epochs = 40;
  attack->add_option("--corpus", at_corpus, "corpus JSONL")->required();
  attack->add_option("--obf", at_obf, "obfuscation pairs JSONL")->required();
  attack->add_option("--adversaries", at_kinds, "svm,neural");
  attack->add_option("--settings", at_settings, "static,adaptive");
  attack->add_option("--neural-lr", at_neural_lr, "desk-scale neural adversary lr");
  attack->add_option("--neural-epochs", at_neural_epochs, "neural adversary epochs");
  attack->add_option("--out", at_out, "privacy report JSON");
  attack->callback([&]() {
    Corpus corpus = load_corpus(at_corpus, CorpusFormat::JSONL).corpus;
    PairDataset obf_pairs = load_pairs(at_obf);
    auto map = std::make_shared<std::map<std::string, std::string>>();
    for (const auto& p : obf_pairs.pairs) (*map)[p.original.text] = p.obfuscated;
    Obfuscator obfuscator = [map](const std::string& text) {
      auto it = map->find(text);
      if (it == map->end()) {
        throw Error(ErrorCode::MISSING_ARTIFACT, "no obfuscation recorded for: " + text);
      }
      return it->second;
    };
    std::vector<AdversaryConfig> configs;
    std::istringstream kinds(at_kinds);
    std::string k;
    while (std::getline(kinds, k, ',')) {
      std::istringstream settings(at_settings);
      std::string s;
      while (std::getline(settings, s, ',')) {
        AdversaryConfig ac;
        ac.kind = parse_adversary_kind(k);
        ac.setting = parse_adversary_setting(s);
        ac.neural.lr = at_neural_lr;
        ac.neural.epochs = at_neural_epochs;
        ac.neural.patience = 5;
        configs.push_back(ac);
      }
    }
    PrivacyReport report = evaluate_privacy(obfuscator, corpus, configs);
    write_text(at_out, privacy_report_to_json(report));
    std::cout << "wrote " << at_out << " (avg F1 " << report.avg_f1 << ", baseline "
              << report.baseline_f1 << ")\n";
  });

  // quality -------------------------------------------------------------------
  auto* quality = app.add_subcommand("quality", "Paraphrase quality metrics");
  std::string qa_pairs, qa_out = "quality.json";
  quality->add_option("--pairs", qa_pairs, "pairs JSONL")->required();
  quality->add_option("--out", qa_out, "quality report JSON");
  quality->callback([&]() {
    PairDataset pairs = load_pairs(qa_pairs);
    QualityReport report = quality_report(pairs, ScorerRegistry{});
    write_text(qa_out, quality_report_to_json(report));
    std::cout << "wrote " << qa_out << " (" << report.pairs_scored << " pairs scored)\n";
  });

  // features ------------------------------------------------------------------
  auto* features = app.add_subcommand("features", "Dementia-marker feature deltas");
  std::string fe_base, fe_obf, fe_out = "features.json";
  features->add_option("--base", fe_base, "corpus JSONL")->required();
  features->add_option("--obf", fe_obf, "obfuscation pairs JSONL")->required();
  features->add_option("--out", fe_out, "feature report JSON");
  features->callback([&]() {
    Corpus corpus = load_corpus(fe_base, CorpusFormat::JSONL).corpus;
    PairDataset obf_pairs = load_pairs(fe_obf);
    std::vector<std::string> base_texts, obf_texts;
    for (const auto& p : obf_pairs.pairs) {
      const TranscriptSample* s = corpus.find(p.original.id);
      Label label = s ? s->label : p.original.label;
      if (label != Label::AD) continue;
      base_texts.push_back(p.original.text);
      obf_texts.push_back(p.obfuscated);
    }
    if (base_texts.empty()) {
      throw Error(ErrorCode::EMPTY_TRAINSET, "no AD samples to profile");
    }
    Tagger tagger = rule_tagger();
    FeatureProfile base = feature_profile(base_texts, tagger);
    FeatureProfile after = feature_profile(obf_texts, tagger);
    write_text(fe_out, change_report_to_json(percent_change(base, after), base, after));
    std::cout << "wrote " << fe_out << "\n";
  });

  // report --------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Assemble the results grid");
  std::string rp_privacy, rp_quality, rp_prefix = "report";
  std::string rp_system = "didots";
  report_cmd->add_option("--privacy", rp_privacy, "privacy report JSON")->required();
  report_cmd->add_option("--quality", rp_quality, "quality report JSON");
  report_cmd->add_option("--system", rp_system, "system row label");
  report_cmd->add_option("--out-prefix", rp_prefix, "writes <prefix>.md/.csv/.svg");
  report_cmd->callback([&]() {
    PrivacyReport privacy = privacy_report_from_json(read_text(rp_privacy));
    std::optional<double> semantics;
    if (!rp_quality.empty()) {
      json q = json::parse(read_text(rp_quality));
      semantics = q.at("columns").at("S").at("mean").get<double>();
    }
    ResultsGrid grid = build_grid(rp_system, privacy, semantics);
    write_text(rp_prefix + ".md", grid_to_markdown(grid));
    write_text(rp_prefix + ".csv", grid_to_csv(grid));
    write_text(rp_prefix + ".svg", tradeoff_svg(grid));
    std::cout << grid_to_markdown(grid);
  });

  // run / all -----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run one pipeline stage from a config");
  std::string rn_stage, rn_config;
  run_cmd->add_option("--stage", rn_stage, "ingest|synthesize|train|obfuscate|attack|quality|features|report")
      ->required();
  run_cmd->add_option("--config", rn_config, "run config file")->required();
  run_cmd->callback([&]() {
    RunConfig config = load_run_config(rn_config);
    run_stage(parse_stage(rn_stage), config);
    std::cout << "stage " << rn_stage << " done (run dir: " << config.run_dir << ")\n";
  });

  auto* all_cmd = app.add_subcommand("all", "Run the whole pipeline from a config");
  std::string al_config;
  all_cmd->add_option("--config", al_config, "run config file")->required();
  all_cmd->callback([&]() {
    RunConfig config = load_run_config(al_config);
    run_all(config);
    std::cout << "pipeline done (run dir: " << config.run_dir << ")\n";
  });

  app.require_subcommand(1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"didots: attribute-obfuscation distillation toolkit"};
  dispatch(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // 0 for --help, 1-ish codes otherwise
  } catch (const didots::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
