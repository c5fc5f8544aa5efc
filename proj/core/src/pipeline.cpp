#include "didots/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "didots/adversary.hpp"
#include "didots/backend.hpp"
#include "didots/checkpoint.hpp"
#include "didots/corpus.hpp"
#include "didots/decode.hpp"
#include "didots/lingfeat.hpp"
#include "didots/llm_client.hpp"
#include "didots/metrics.hpp"
#include "didots/prompting.hpp"
#include "didots/report.hpp"
#include "didots/sha256.hpp"
#include "didots/synthesis.hpp"
#include "didots/text.hpp"
#include "didots/trainer.hpp"

namespace didots {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

std::string RunConfig::corpus_path() const { return run_dir + "/corpus.jsonl"; }
std::string RunConfig::splits_path() const { return run_dir + "/splits.json"; }
std::string RunConfig::pairs_path() const { return run_dir + "/pairs.jsonl"; }
std::string RunConfig::ckpt_dir() const { return run_dir + "/ckpt"; }
std::string RunConfig::obf_path() const { return run_dir + "/obf.jsonl"; }
std::string RunConfig::privacy_path() const { return run_dir + "/privacy.json"; }
std::string RunConfig::quality_path() const { return run_dir + "/quality.json"; }
std::string RunConfig::features_path() const { return run_dir + "/features.json"; }
std::string RunConfig::report_md_path() const { return run_dir + "/report.md"; }
std::string RunConfig::report_csv_path() const { return run_dir + "/report.csv"; }
std::string RunConfig::tradeoff_svg_path() const { return run_dir + "/tradeoff.svg"; }
std::string RunConfig::manifest_path(const std::string& stage) const {
  return run_dir + "/manifests/" + stage + ".json";
}

namespace {

std::map<std::string, std::string> parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::CONFIG_INVALID, "cannot open config " + path);
  std::map<std::string, std::string> kv;
  std::string line, section;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = to_lower(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::CONFIG_INVALID, "bad config line: " + t);
    }
    std::string key = to_lower(trim(t.substr(0, eq)));
    kv[(section.empty() ? key : section + "." + key)] = trim(t.substr(eq + 1));
  }
  return kv;
}

long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t idx = 0;
    long out = std::stol(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::CONFIG_INVALID, key + ": '" + v + "' is not an integer");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t idx = 0;
    double out = std::stod(v, &idx);
    if (idx != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(ErrorCode::CONFIG_INVALID, key + ": '" + v + "' is not a number");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  std::string u = to_lower(v);
  if (u == "true" || u == "1" || u == "yes" || u == "on") return true;
  if (u == "false" || u == "0" || u == "no" || u == "off") return false;
  throw Error(ErrorCode::CONFIG_INVALID, key + ": '" + v + "' is not a boolean");
}

}  // namespace

RunConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "run.dir") c.run_dir = value;
    else if (key == "run.seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "corpus.input") c.input_path = value;
    else if (key == "corpus.format") c.input_format = value;
    else if (key == "corpus.fixture") c.fixture = to_bool(key, value);
    else if (key == "corpus.fixture_seed") c.fixture_seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "corpus.fixture_n") c.fixture_n = static_cast<std::size_t>(to_int(key, value));
    else if (key == "corpus.expect_splits") c.expect_splits = value;
    else if (key == "synthesis.strategy") c.strategy = value;
    else if (key == "synthesis.endpoint") c.endpoint = value;
    else if (key == "synthesis.model") c.model = value;
    else if (key == "synthesis.parallel") c.parallel = static_cast<int>(to_int(key, value));
    else if (key == "synthesis.timeout_ms") c.timeout_ms = static_cast<int>(to_int(key, value));
    else if (key == "synthesis.temperature") c.temperature = to_double(key, value);
    else if (key == "synthesis.template") c.template_path = value;
    else if (key == "student.peft") c.peft = value;
    else if (key == "student.rank") c.rank = static_cast<int>(to_int(key, value));
    else if (key == "student.alpha") c.alpha = to_double(key, value);
    else if (key == "student.d_model") c.d_model = static_cast<int>(to_int(key, value));
    else if (key == "student.ffn_dim") c.ffn_dim = static_cast<int>(to_int(key, value));
    else if (key == "student.enc_layers") c.enc_layers = static_cast<int>(to_int(key, value));
    else if (key == "student.dec_layers") c.dec_layers = static_cast<int>(to_int(key, value));
    else if (key == "student.pretrain_epochs") c.pretrain_epochs = static_cast<int>(to_int(key, value));
    else if (key == "student.pretrain_lr") c.pretrain_lr = to_double(key, value);
    else if (key == "student.epochs") c.epochs = static_cast<int>(to_int(key, value));
    else if (key == "student.lr") c.lr = to_double(key, value);
    else if (key == "student.batch_size") c.batch_size = static_cast<int>(to_int(key, value));
    else if (key == "student.patience") c.patience = static_cast<int>(to_int(key, value));
    else if (key == "student.beams") c.beams = static_cast<int>(to_int(key, value));
    else if (key == "student.max_length") c.max_length = static_cast<int>(to_int(key, value));
    else if (key == "adversary.adversaries") c.adversaries = value;
    else if (key == "adversary.settings") c.settings = value;
    else if (key == "adversary.svm_c") c.svm_c = to_double(key, value);
    else if (key == "adversary.svm_gamma") c.svm_gamma = to_double(key, value);
    else if (key == "adversary.neural_lr") c.neural_lr = to_double(key, value);
    else if (key == "adversary.neural_epochs") c.neural_epochs = static_cast<int>(to_int(key, value));
    else if (key == "adversary.neural_patience") c.neural_patience = static_cast<int>(to_int(key, value));
    else if (key == "adversary.neural_clip") c.neural_clip = to_double(key, value);
    else if (key == "adversary.neural_max_tokens") c.neural_max_tokens = static_cast<int>(to_int(key, value));
    else if (key == "adversary.neural_batch") c.neural_batch = static_cast<int>(to_int(key, value));
    else throw Error(ErrorCode::CONFIG_INVALID, "unknown config key '" + key + "'");
  }
  if (c.parallel < 1) throw Error(ErrorCode::CONFIG_INVALID, "synthesis.parallel must be >= 1");
  if (c.rank < 1) throw Error(ErrorCode::CONFIG_INVALID, "student.rank must be >= 1");
  if (c.batch_size < 1) throw Error(ErrorCode::CONFIG_INVALID, "student.batch_size must be >= 1");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig c = config_from_kv(parse_ini(path));
  apply_env_overrides(c);
  return c;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* ep = std::getenv("DIDOTS_LLM_ENDPOINT"); ep && *ep) {
    config.endpoint = ep;
  }
  if (const char* dir = std::getenv("DIDOTS_RUN_DIR"); dir && *dir) {
    config.run_dir = dir;
  }
}

// ---------------------------------------------------------------------------
// Stage plumbing

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::INGEST: return "ingest";
    case Stage::SYNTHESIZE: return "synthesize";
    case Stage::TRAIN: return "train";
    case Stage::OBFUSCATE: return "obfuscate";
    case Stage::ATTACK: return "attack";
    case Stage::QUALITY: return "quality";
    case Stage::FEATURES: return "features";
    case Stage::REPORT: return "report";
  }
  return "?";
}

Stage parse_stage(const std::string& s) {
  std::string u = to_lower(s);
  for (Stage stage : {Stage::INGEST, Stage::SYNTHESIZE, Stage::TRAIN, Stage::OBFUSCATE,
                      Stage::ATTACK, Stage::QUALITY, Stage::FEATURES, Stage::REPORT}) {
    if (u == stage_name(stage)) return stage;
  }
  throw Error(ErrorCode::CONFIG_INVALID, "unknown stage '" + s + "'");
}

RunLock::RunLock(const std::string& run_dir) {
  fs::create_directories(run_dir);
  path_ = run_dir + "/.didots.lock";
  if (fs::exists(path_)) {
    throw Error(ErrorCode::RUN_LOCKED,
                path_ + " exists; another stage is writing this run directory");
  }
  std::ofstream out(path_);
  out << "didots\n";
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

namespace {

void require_artifact(const std::string& path, const std::string& produced_by) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::MISSING_ARTIFACT,
                path + " not found; run the " + produced_by + " stage first");
  }
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IO_ERROR, "cannot write " + path);
  out << content;
}

// run_dir stays out of the digest so identical configs hash identically
// regardless of where the run lives
std::string config_digest(const RunConfig& c) {
  std::ostringstream s;
  s << c.seed << '|' << c.input_path << '|' << c.input_format << '|'
    << c.fixture << '|' << c.fixture_seed << '|' << c.fixture_n << '|' << c.expect_splits
    << '|' << c.strategy << '|' << c.endpoint << '|' << c.model << '|' << c.parallel
    << '|' << c.temperature << '|' << c.template_path << '|' << c.peft << '|' << c.rank
    << '|' << c.alpha << '|' << c.d_model << '|' << c.ffn_dim << '|' << c.enc_layers
    << '|' << c.dec_layers << '|' << c.pretrain_epochs << '|' << c.pretrain_lr << '|'
    << c.epochs << '|' << c.lr << '|' << c.batch_size << '|' << c.patience << '|'
    << c.beams << '|' << c.max_length << '|' << c.adversaries << '|' << c.settings << '|'
    << c.svm_c << '|' << c.svm_gamma << '|' << c.neural_lr << '|' << c.neural_epochs
    << '|' << c.neural_patience << '|' << c.neural_clip << '|' << c.neural_max_tokens
    << '|' << c.neural_batch;
  return sha256_hex(s.str());
}

void write_manifest(const RunConfig& config, Stage stage,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["stage"] = stage_name(stage);
  m["config_sha256"] = config_digest(config);
  m["seed"] = config.seed;
  m["tool_version"] = "0.1.0";
  m["schema_version"] = 1;
  for (const auto& path : inputs) {
    m["inputs"][fs::path(path).filename().string()] =
        fs::is_directory(path) ? "dir" : sha256_file(path);
  }
  for (const auto& path : outputs) {
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file()) {
          m["outputs"][fs::relative(entry.path(), config.run_dir).string()] =
              sha256_file(entry.path().string());
        }
      }
    } else {
      m["outputs"][fs::path(path).filename().string()] = sha256_file(path);
    }
  }
  write_file(config.manifest_path(stage_name(stage)), m.dump(2) + "\n");
}

SplitReport parse_expected_splits(const std::string& text) {
  // "train:AD=560,train:CC=619,test:AD=230,test:CC=270"
  SplitReport expected;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t colon = item.find(':');
    std::size_t eq = item.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
      throw Error(ErrorCode::CONFIG_INVALID, "bad expect_splits item '" + item + "'");
    }
    Split split = parse_split(trim(item.substr(0, colon)));
    Label label = parse_label(trim(item.substr(colon + 1, eq - colon - 1)));
    expected.cell(split, label) =
        static_cast<std::size_t>(to_int("expect_splits", trim(item.substr(eq + 1))));
  }
  return expected;
}

json split_report_json(const SplitReport& report, std::size_t dropped) {
  json j;
  for (const auto& [key, count] : report.counts) {
    j["counts"][split_name(key.first)][label_name(key.second)] = count;
  }
  j["total"] = report.total();
  j["dropped"] = dropped;
  j["schema_version"] = 1;
  return j;
}

// ---------------------------------------------------------------------------
// Stages

void stage_ingest(const RunConfig& config) {
  Corpus corpus;
  std::size_t dropped = 0;
  std::vector<std::string> inputs;
  if (config.fixture) {
    corpus = synth_fixture(config.fixture_seed, config.fixture_n);
  } else {
    if (config.input_path.empty()) {
      throw Error(ErrorCode::CONFIG_INVALID, "corpus.input is required without fixture");
    }
    require_artifact(config.input_path, "external");
    CorpusFormat format =
        to_lower(config.input_format) == "csv" ? CorpusFormat::CSV : CorpusFormat::JSONL;
    LoadResult loaded = load_corpus(config.input_path, format);
    corpus = std::move(loaded.corpus);
    dropped = loaded.dropped;
    inputs.push_back(config.input_path);
  }
  SplitReport actual = split_report(corpus);
  if (!config.expect_splits.empty()) {
    validate_splits(corpus, parse_expected_splits(config.expect_splits));
  }
  save_corpus(corpus, config.corpus_path());
  write_file(config.splits_path(), split_report_json(actual, dropped).dump(2) + "\n");
  write_manifest(config, Stage::INGEST, inputs,
                 {config.corpus_path(), config.splits_path()});
}

PromptTemplate template_for(const RunConfig& config) {
  if (!config.template_path.empty()) return load_template(config.template_path);
  return builtin_template(parse_strategy(config.strategy));
}

void stage_synthesize(const RunConfig& config) {
  require_artifact(config.corpus_path(), "ingest");
  Corpus corpus = load_corpus(config.corpus_path(), CorpusFormat::JSONL).corpus;
  // synthesis builds the training dataset; the test split stays unseen
  std::vector<TranscriptSample> train_like;
  for (const auto& s : corpus.samples()) {
    if (s.split != Split::TEST) train_like.push_back(s);
  }
  Corpus train_corpus(std::move(train_like), corpus.provenance());

  PromptTemplate tmpl = template_for(config);
  RetryPolicy policy;
  policy.timeout_ms = config.timeout_ms;
  LlmClient client(config.endpoint, policy);
  client.set_audit_log(config.run_dir + "/synthesis_audit.jsonl");

  SynthesisOptions options;
  options.model_id = config.model;
  options.temperature = config.temperature;
  options.parallel = config.parallel;
  PairDataset pairs = build_pairs(train_corpus, tmpl.strategy, client, tmpl, options);
  save_pairs(pairs, config.pairs_path());
  write_manifest(config, Stage::SYNTHESIZE, {config.corpus_path()},
                 {config.pairs_path()});
}

// Deterministic validation carve-out: every 5th clean pair by id order.
void split_train_val(const PairDataset& pairs, PairDataset& train, PairDataset& val) {
  std::size_t i = 0;
  for (const auto& p : pairs.pairs) {
    if (pairs.pairs.size() >= 10 && i % 5 == 4) val.pairs.push_back(p);
    else train.pairs.push_back(p);
    ++i;
  }
  if (val.pairs.empty()) val.pairs = train.pairs;
  train.recompute_stats();
  val.recompute_stats();
}

void stage_train(const RunConfig& config) {
  require_artifact(config.pairs_path(), "synthesize");
  PairDataset pairs = load_pairs(config.pairs_path());

  std::vector<std::string> texts;
  for (const auto& p : pairs.pairs) {
    texts.push_back(p.original.text);
    if (!p.obfuscated.empty()) texts.push_back(p.obfuscated);
  }
  WordTokenizer tokenizer = WordTokenizer::fit(texts);

  MicroConfig mc;
  mc.d_model = config.d_model;
  mc.ffn_dim = config.ffn_dim;
  mc.enc_layers = config.enc_layers;
  mc.dec_layers = config.dec_layers;
  mc.max_positions = std::max(64, config.max_length);
  mc.seed = config.seed;
  MicroTransformer model(std::move(tokenizer), mc);

  // phase 1: from-scratch copy pretraining over the original sentences
  std::vector<std::string> originals;
  for (const auto& p : pairs.pairs) originals.push_back(p.original.text);
  PairDataset pretrain_pairs = copy_pairs(originals);
  PairDataset pre_train, pre_val;
  split_train_val(pretrain_pairs, pre_train, pre_val);
  TrainConfig pre_cfg;
  pre_cfg.max_epochs = config.pretrain_epochs;
  pre_cfg.learning_rate = config.pretrain_lr;
  pre_cfg.batch_size = config.batch_size;
  pre_cfg.patience = config.patience;
  pre_cfg.seed = config.seed;
  TrainReport pre_report = train(model, pre_train, pre_cfg, pre_val);

  // phase 2: adapter fine-tuning on the synthetic pairs
  bool full_ft = to_lower(config.peft) == "full" || to_lower(config.peft) == "none";
  if (!full_ft) {
    AdapterSpec spec;
    spec.kind = parse_adapter_kind(config.peft);
    spec.rank = config.rank;
    spec.alpha = config.alpha;
    model.attach_adapter(spec, config.seed + 1);
  }
  PairDataset tune_train, tune_val;
  split_train_val(pairs, tune_train, tune_val);
  TrainConfig tune_cfg;
  tune_cfg.max_epochs = config.epochs;
  tune_cfg.learning_rate = config.lr;
  tune_cfg.batch_size = config.batch_size;
  tune_cfg.patience = config.patience;
  tune_cfg.seed = config.seed + 2;
  TrainReport tune_report = train(model, tune_train, tune_cfg, tune_val);

  std::map<std::string, std::string> metadata;
  metadata["strategy"] = config.strategy;
  metadata["peft"] = config.peft;
  metadata["pretrain_epochs_run"] = std::to_string(pre_report.epochs.size());
  metadata["tune_epochs_run"] = std::to_string(tune_report.epochs.size());
  metadata["updated_parameters"] = std::to_string(tune_report.updated_parameters);
  metadata["teacher_temperature"] = std::to_string(config.temperature);
  metadata["seed"] = std::to_string(config.seed);
  save_checkpoint(model, config.ckpt_dir(), metadata);

  json tr;
  tr["pretrain"] = json::array();
  for (const auto& e : pre_report.epochs) {
    tr["pretrain"].push_back({{"epoch", e.epoch}, {"train", e.train_loss}, {"val", e.val_loss}});
  }
  tr["tune"] = json::array();
  for (const auto& e : tune_report.epochs) {
    tr["tune"].push_back({{"epoch", e.epoch}, {"train", e.train_loss}, {"val", e.val_loss}});
  }
  tr["updated_parameters"] = tune_report.updated_parameters;
  tr["early_stopped"] = tune_report.early_stopped;
  tr["schema_version"] = 1;
  write_file(config.run_dir + "/train_report.json", tr.dump(2) + "\n");

  write_manifest(config, Stage::TRAIN, {config.pairs_path()},
                 {config.ckpt_dir(), config.run_dir + "/train_report.json"});
}

void stage_obfuscate(const RunConfig& config) {
  require_artifact(config.ckpt_dir() + "/model.json", "train");
  require_artifact(config.corpus_path(), "ingest");
  MicroTransformer model = load_checkpoint(config.ckpt_dir());
  Corpus corpus = load_corpus(config.corpus_path(), CorpusFormat::JSONL).corpus;

  DecodeConfig dc;
  dc.mode = DecodeMode::BEAM;
  dc.beams = config.beams;
  dc.max_length = config.max_length;

  PairDataset out;
  for (const auto& s : corpus.samples()) {
    ObfuscationPair p;
    p.original = s;
    p.obfuscated = decode(model, s.text, dc);
    p.strategy = parse_strategy(config.strategy);
    p.model_id = "didots-student";
    out.pairs.push_back(std::move(p));
  }
  out.recompute_stats();
  save_pairs(out, config.obf_path());
  write_manifest(config, Stage::OBFUSCATE, {config.corpus_path()}, {config.obf_path()});
}

Obfuscator lookup_obfuscator(const PairDataset& pairs) {
  auto map = std::make_shared<std::map<std::string, std::string>>();
  for (const auto& p : pairs.pairs) (*map)[p.original.text] = p.obfuscated;
  return [map](const std::string& text) {
    auto it = map->find(text);
    if (it == map->end()) {
      throw Error(ErrorCode::MISSING_ARTIFACT, "no obfuscation recorded for: " + text);
    }
    return it->second;
  };
}

std::vector<AdversaryConfig> adversary_configs(const RunConfig& config) {
  std::vector<AdversaryConfig> out;
  std::istringstream kinds(config.adversaries);
  std::string kind_str;
  while (std::getline(kinds, kind_str, ',')) {
    AdversaryKind kind = parse_adversary_kind(trim(kind_str));
    std::istringstream settings(config.settings);
    std::string setting_str;
    while (std::getline(settings, setting_str, ',')) {
      AdversaryConfig ac;
      ac.kind = kind;
      ac.setting = parse_adversary_setting(trim(setting_str));
      ac.kernel.C = config.svm_c;
      ac.kernel.gamma = config.svm_gamma;
      ac.neural.lr = config.neural_lr;
      ac.neural.epochs = config.neural_epochs;
      ac.neural.patience = config.neural_patience;
      ac.neural.clip = config.neural_clip;
      ac.neural.max_tokens = config.neural_max_tokens;
      ac.neural.batch = config.neural_batch;
      out.push_back(ac);
    }
  }
  if (out.empty()) throw Error(ErrorCode::CONFIG_INVALID, "no adversaries configured");
  return out;
}

void stage_attack(const RunConfig& config) {
  require_artifact(config.corpus_path(), "ingest");
  require_artifact(config.obf_path(), "obfuscate");
  Corpus corpus = load_corpus(config.corpus_path(), CorpusFormat::JSONL).corpus;
  PairDataset obf = load_pairs(config.obf_path());
  PrivacyReport report =
      evaluate_privacy(lookup_obfuscator(obf), corpus, adversary_configs(config));
  write_file(config.privacy_path(), privacy_report_to_json(report));
  write_manifest(config, Stage::ATTACK, {config.corpus_path(), config.obf_path()},
                 {config.privacy_path()});
}

void stage_quality(const RunConfig& config) {
  require_artifact(config.obf_path(), "obfuscate");
  PairDataset pairs = load_pairs(config.obf_path());
  QualityReport report = quality_report(pairs, ScorerRegistry{});
  write_file(config.quality_path(), quality_report_to_json(report));
  write_manifest(config, Stage::QUALITY, {config.obf_path()}, {config.quality_path()});
}

void stage_features(const RunConfig& config) {
  require_artifact(config.corpus_path(), "ingest");
  require_artifact(config.obf_path(), "obfuscate");
  Corpus corpus = load_corpus(config.corpus_path(), CorpusFormat::JSONL).corpus;
  PairDataset obf = load_pairs(config.obf_path());

  // dementia-marker deltas are measured on the AD samples
  std::vector<std::string> base_texts, obf_texts;
  for (const auto& p : obf.pairs) {
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
  ChangeReport change = percent_change(base, after);
  write_file(config.features_path(), change_report_to_json(change, base, after));
  write_manifest(config, Stage::FEATURES, {config.corpus_path(), config.obf_path()},
                 {config.features_path()});
}

void stage_report(const RunConfig& config) {
  require_artifact(config.privacy_path(), "attack");
  std::ifstream pin(config.privacy_path());
  std::ostringstream pbuf;
  pbuf << pin.rdbuf();
  PrivacyReport privacy = privacy_report_from_json(pbuf.str());

  std::optional<double> semantics;
  if (fs::exists(config.quality_path())) {
    std::ifstream qin(config.quality_path());
    json q = json::parse(qin);
    semantics = q.at("columns").at("S").at("mean").get<double>();
  }

  ResultsGrid grid = build_grid("didots", privacy, semantics);
  write_file(config.report_md_path(), grid_to_markdown(grid));
  write_file(config.report_csv_path(), grid_to_csv(grid));
  write_file(config.tradeoff_svg_path(), tradeoff_svg(grid));

  std::vector<std::string> inputs{config.privacy_path()};
  if (fs::exists(config.quality_path())) inputs.push_back(config.quality_path());
  write_manifest(config, Stage::REPORT, inputs,
                 {config.report_md_path(), config.report_csv_path(),
                  config.tradeoff_svg_path()});
}

}  // namespace

void run_stage(Stage stage, const RunConfig& config) {
  RunLock lock(config.run_dir);
  switch (stage) {
    case Stage::INGEST: stage_ingest(config); break;
    case Stage::SYNTHESIZE: stage_synthesize(config); break;
    case Stage::TRAIN: stage_train(config); break;
    case Stage::OBFUSCATE: stage_obfuscate(config); break;
    case Stage::ATTACK: stage_attack(config); break;
    case Stage::QUALITY: stage_quality(config); break;
    case Stage::FEATURES: stage_features(config); break;
    case Stage::REPORT: stage_report(config); break;
  }
}

void run_all(const RunConfig& config) {
  for (Stage stage : {Stage::INGEST, Stage::SYNTHESIZE, Stage::TRAIN, Stage::OBFUSCATE,
                      Stage::ATTACK, Stage::QUALITY, Stage::FEATURES, Stage::REPORT}) {
    run_stage(stage, config);
  }
}

}  // namespace didots
