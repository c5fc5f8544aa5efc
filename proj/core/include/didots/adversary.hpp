#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "didots/corpus.hpp"
#include "didots/svm.hpp"

namespace didots {

enum class AdversaryKind { KERNEL, NEURAL };
enum class AdversarySetting { STATIC, ADAPTIVE };

const char* adversary_kind_name(AdversaryKind k);
const char* adversary_setting_name(AdversarySetting s);
AdversaryKind parse_adversary_kind(const std::string& s);
AdversarySetting parse_adversary_setting(const std::string& s);

struct KernelParams {
  KernelType type = KernelType::RBF;
  double C = 1.0;
  double gamma = 0.0;  // 0 -> 1 / (n_features * feature variance)
};

struct NeuralParams {
  double lr = 1e-6;
  int epochs = 10;
  int patience = 1;    // evaluations on validation loss
  double clip = 1.0;   // gradient norm clip
  int max_tokens = 256;
  int batch = 8;
  int embed_dim = 32;
  std::uint64_t seed = 101;
};

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::KERNEL;
  AdversarySetting setting = AdversarySetting::STATIC;
  KernelParams kernel;
  NeuralParams neural;
};

// A trained dementia classifier: text -> is the AD class predicted.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual bool predict_ad(const std::string& text) const = 0;

  std::vector<bool> predict_many(const std::vector<std::string>& texts) const;
};

// KERNEL trains an RBF-kernel SVM over TF-IDF features; NEURAL trains the
// desk-scale contextual classifier (trainable embeddings, pooled encoder
// layer, logistic head) honoring the neural params. Throws
// SINGLE_CLASS_TRAINSET when only one label is present.
std::unique_ptr<Classifier> train_adversary(const AdversaryConfig& config,
                                            const Corpus& trainset);

using Obfuscator = std::function<std::string(const std::string&)>;

// raw plus obfuscate(raw) with labels preserved; ids suffixed "#obf"; size
// exactly 2 * |raw|. Obfuscator failures propagate with the sample id.
Corpus build_adaptive_trainset(const Corpus& raw, const Obfuscator& obfuscator);

struct PrivacyCell {
  AdversaryKind kind = AdversaryKind::KERNEL;
  AdversarySetting setting = AdversarySetting::STATIC;
  double f1 = 0.0;
  double baseline = 0.0;  // same kind, static, raw test
  double drop = 0.0;      // baseline - f1
};

struct PrivacyReport {
  std::vector<PrivacyCell> cells;
  std::map<AdversaryKind, double> baselines;
  double avg_f1 = 0.0;       // arithmetic mean of the cells
  double baseline_f1 = 0.0;  // mean of the per-kind baselines
};

// For each config: train per setting (STATIC on raw train, ADAPTIVE on the
// doubled trainset) and score F1 of the AD class on the obfuscated test
// split; baselines come from raw test.
PrivacyReport evaluate_privacy(const Obfuscator& obfuscator, const Corpus& corpus,
                               const std::vector<AdversaryConfig>& configs);

std::string privacy_report_to_json(const PrivacyReport& report);
PrivacyReport privacy_report_from_json(const std::string& text);

}  // namespace didots
