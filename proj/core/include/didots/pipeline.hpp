#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace didots {

// One structured config drives every stage; sections mirror the modules.
// Values load from an INI-style file, then DIDOTS_<SECTION>_<KEY>
// environment variables override, then CLI flags override on top.
struct RunConfig {
  // [run]
  std::string run_dir = "run";
  std::uint64_t seed = 7;

  // [corpus]
  std::string input_path;            // empty + fixture=false is an INGEST error
  std::string input_format = "jsonl";
  bool fixture = false;
  std::uint64_t fixture_seed = 7;
  std::size_t fixture_n = 25;
  std::string expect_splits;         // "train:AD=..,train:CC=..,test:AD=..,test:CC=.."

  // [synthesis]
  std::string strategy = "kb";
  std::string endpoint = "mock:";
  std::string model = "mock";
  int parallel = 1;
  int timeout_ms = 30000;
  double temperature = 0.7;
  std::string template_path;         // empty selects the builtin template

  // [student]
  std::string peft = "lora";         // lora | ia3 | bottleneck | full
  int rank = 16;
  double alpha = 32.0;
  int d_model = 64;
  int ffn_dim = 128;
  int enc_layers = 2;
  int dec_layers = 2;
  int pretrain_epochs = 40;
  double pretrain_lr = 2e-3;
  int epochs = 40;
  double lr = 2e-3;
  int batch_size = 8;
  int patience = 10;
  int beams = 4;
  int max_length = 256;

  // [adversary]
  std::string adversaries = "svm,neural";
  std::string settings = "static,adaptive";
  double svm_c = 1.0;
  double svm_gamma = 0.0;
  double neural_lr = 0.01;
  int neural_epochs = 40;
  int neural_patience = 5;
  double neural_clip = 1.0;
  int neural_max_tokens = 256;
  int neural_batch = 8;

  // derived artifact paths inside run_dir
  std::string corpus_path() const;
  std::string splits_path() const;
  std::string pairs_path() const;
  std::string ckpt_dir() const;
  std::string obf_path() const;
  std::string privacy_path() const;
  std::string quality_path() const;
  std::string features_path() const;
  std::string report_md_path() const;
  std::string report_csv_path() const;
  std::string tradeoff_svg_path() const;
  std::string manifest_path(const std::string& stage) const;
};

RunConfig load_run_config(const std::string& path);
RunConfig config_from_kv(const std::map<std::string, std::string>& kv);
void apply_env_overrides(RunConfig& config);

enum class Stage {
  INGEST, SYNTHESIZE, TRAIN, OBFUSCATE, ATTACK, QUALITY, FEATURES, REPORT,
};

const char* stage_name(Stage s);
Stage parse_stage(const std::string& s);

// Runs one stage: verifies upstream artifacts, writes the stage artifact(s)
// and a manifest with content hashes of inputs and outputs. Throws
// MISSING_ARTIFACT / CONFIG_INVALID. Holds the run-directory lock for the
// duration of the stage.
void run_stage(Stage stage, const RunConfig& config);

// All eight stages in order.
void run_all(const RunConfig& config);

// Advisory lock on a run directory; a second writer gets RUN_LOCKED.
class RunLock {
 public:
  explicit RunLock(const std::string& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::string path_;
};

}  // namespace didots
