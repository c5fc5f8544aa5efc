#include "didots/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "didots/autodiff.hpp"
#include "didots/metrics.hpp"
#include "didots/text.hpp"
#include "didots/tfidf.hpp"
#include "didots/tokenizer.hpp"

namespace didots {

using nlohmann::json;

const char* adversary_kind_name(AdversaryKind k) {
  return k == AdversaryKind::KERNEL ? "kernel" : "neural";
}
const char* adversary_setting_name(AdversarySetting s) {
  return s == AdversarySetting::STATIC ? "static" : "adaptive";
}

AdversaryKind parse_adversary_kind(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "kernel" || u == "svm") return AdversaryKind::KERNEL;
  if (u == "neural" || u == "bert") return AdversaryKind::NEURAL;
  throw Error(ErrorCode::CONFIG_INVALID, "unknown adversary kind '" + s + "'");
}

AdversarySetting parse_adversary_setting(const std::string& s) {
  std::string u = to_lower(s);
  if (u == "static") return AdversarySetting::STATIC;
  if (u == "adaptive") return AdversarySetting::ADAPTIVE;
  throw Error(ErrorCode::CONFIG_INVALID, "unknown adversary setting '" + s + "'");
}

std::vector<bool> Classifier::predict_many(const std::vector<std::string>& texts) const {
  std::vector<bool> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(predict_ad(t));
  return out;
}

namespace {

void require_both_labels(const Corpus& trainset) {
  bool has_ad = false, has_cc = false;
  for (const auto& s : trainset.samples()) {
    has_ad |= s.label == Label::AD;
    has_cc |= s.label == Label::CC;
  }
  if (!has_ad || !has_cc) {
    throw Error(ErrorCode::SINGLE_CLASS_TRAINSET,
                "training corpus must contain both AD and CC");
  }
}

// ---------------------------------------------------------------------------
// Kernel adversary

class KernelClassifier : public Classifier {
 public:
  KernelClassifier(const KernelParams& params, const Corpus& trainset) {
    std::vector<std::string> texts;
    std::vector<int> labels;
    for (const auto& s : trainset.samples()) {
      texts.push_back(s.text);
      labels.push_back(s.label == Label::AD ? 1 : -1);
    }
    Matrix features = vectorizer_.fit_transform(texts);
    SvmConfig svm_config;
    svm_config.kernel = params.type;
    svm_config.C = params.C;
    svm_config.gamma = params.gamma;
    svm_ = KernelSvm(svm_config);
    svm_.fit(features, labels);
  }

  bool predict_ad(const std::string& text) const override {
    Matrix row = vectorizer_.transform({text});
    std::vector<double> x(row.cols);
    for (int c = 0; c < row.cols; ++c) x[static_cast<std::size_t>(c)] = row.at(0, c);
    return svm_.predict(x) > 0;
  }

 private:
  TfidfVectorizer vectorizer_;
  KernelSvm svm_{};
};

// ---------------------------------------------------------------------------
// Neural adversary (desk-scale reference)

// Trainable embedding table, mean pooling, one tanh encoder layer and a
// two-logit head trained with cross-entropy. A pretrained transformer
// adversary plugs in behind the same Classifier interface at full scale.
class NeuralClassifier : public Classifier {
 public:
  NeuralClassifier(const NeuralParams& params, const Corpus& trainset)
      : params_(params) {
    std::vector<std::string> texts;
    for (const auto& s : trainset.samples()) texts.push_back(s.text);
    tokenizer_ = WordTokenizer::fit(texts);

    int v = tokenizer_.vocab_size(), e = params_.embed_dim;
    Rng rng(params_.seed);
    params_store_.emplace_back("embed", Matrix::gaussian(v, e, rng, 0.1));
    params_store_.emplace_back("enc.w", Matrix::gaussian(e, e, rng, 0.1));
    params_store_.emplace_back("enc.b", Matrix::zeros(1, e));
    params_store_.emplace_back("head.w", Matrix::gaussian(e, 2, rng, 0.1));
    params_store_.emplace_back("head.b", Matrix::zeros(1, 2));

    // deterministic validation carve-out: every 5th sample
    std::vector<const TranscriptSample*> train_samples, val_samples;
    const auto& samples = trainset.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples.size() >= 10 && i % 5 == 4) val_samples.push_back(&samples[i]);
      else train_samples.push_back(&samples[i]);
    }
    fit(train_samples, val_samples, rng);
  }

  bool predict_ad(const std::string& text) const override {
    Matrix logits = forward_value(encode(text));
    return logits.at(0, 1) > logits.at(0, 0);
  }

 private:
  std::vector<int> encode(const std::string& text) const {
    std::vector<int> ids = tokenizer_.encode(text);
    if (static_cast<int>(ids.size()) > params_.max_tokens) {
      ids.resize(static_cast<std::size_t>(params_.max_tokens));
    }
    if (ids.empty()) ids.push_back(WordTokenizer::kUnk);
    return ids;
  }

  Parameter& p(const char* name) {
    for (auto& param : params_store_) {
      if (param.name == name) return param;
    }
    throw Error(ErrorCode::UNKNOWN_TARGET, name);
  }

  ad::Var forward(const std::vector<int>& ids) {
    ad::Var x = ad::gather_rows(ad::leaf(p("embed")), ids);
    // mean pool: (1/n) * ones^T X
    Matrix pool(1, static_cast<int>(ids.size()));
    for (int c = 0; c < pool.cols; ++c) pool.at(0, c) = 1.0 / static_cast<double>(ids.size());
    ad::Var pooled = ad::matmul(ad::constant(std::move(pool)), x);
    ad::Var h = ad::tanh_op(
        ad::add_rowvec(ad::matmul(pooled, ad::leaf(p("enc.w"))), ad::leaf(p("enc.b"))));
    return ad::add_rowvec(ad::matmul(h, ad::leaf(p("head.w"))), ad::leaf(p("head.b")));
  }

  Matrix forward_value(const std::vector<int>& ids) const {
    return const_cast<NeuralClassifier*>(this)->forward(ids)->value;
  }

  double sample_loss(const TranscriptSample& s, bool train_mode) {
    ad::Var logits = forward(encode(s.text));
    std::vector<int> target{s.label == Label::AD ? 1 : 0};
    ad::Var loss = ad::cross_entropy(logits, target, -1);
    if (train_mode) ad::backward(loss);
    return loss->value.at(0, 0);
  }

  void fit(const std::vector<const TranscriptSample*>& train,
           const std::vector<const TranscriptSample*>& val, Rng& rng) {
    std::vector<Parameter*> trainable;
    for (auto& param : params_store_) trainable.push_back(&param);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_state;
    for (auto* param : trainable) best_state.push_back(param->value);
    int stale = 0;
    std::size_t step = 0;

    for (int epoch = 1; epoch <= params_.epochs; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = rng.next_below(i);
        std::swap(order[i - 1], order[j]);
      }
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(params_.batch)) {
        std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(params_.batch));
        for (auto* param : trainable) param->zero_grad();
        for (std::size_t i = start; i < end; ++i) {
          sample_loss(*train[order[i]], true);
        }
        double inv = 1.0 / static_cast<double>(end - start);
        for (auto* param : trainable) {
          for (double& g : param->grad.data) g *= inv;
        }
        adam_step(trainable, params_.lr, ++step, 0.9, 0.999, 1e-8, params_.clip);
      }
      // early stopping on validation loss; train loss stands in when the
      // corpus is too small to carve a validation slice
      const auto& eval_set = val.empty() ? train : val;
      double val_loss = 0.0;
      for (const auto* s : eval_set) val_loss += sample_loss(*s, false);
      val_loss /= static_cast<double>(eval_set.size());
      if (val_loss < best_val) {
        best_val = val_loss;
        for (std::size_t i = 0; i < trainable.size(); ++i) best_state[i] = trainable[i]->value;
        stale = 0;
      } else if (++stale >= params_.patience) {
        break;
      }
    }
    for (std::size_t i = 0; i < trainable.size(); ++i) trainable[i]->value = best_state[i];
  }

  NeuralParams params_;
  WordTokenizer tokenizer_;
  std::vector<Parameter> params_store_;
};

}  // namespace

std::unique_ptr<Classifier> train_adversary(const AdversaryConfig& config,
                                            const Corpus& trainset) {
  require_both_labels(trainset);
  if (config.kind == AdversaryKind::KERNEL) {
    return std::make_unique<KernelClassifier>(config.kernel, trainset);
  }
  return std::make_unique<NeuralClassifier>(config.neural, trainset);
}

Corpus build_adaptive_trainset(const Corpus& raw, const Obfuscator& obfuscator) {
  std::vector<TranscriptSample> samples = raw.samples();
  for (const auto& s : raw.samples()) {
    TranscriptSample copy = s;
    copy.id = s.id + "#obf";
    try {
      copy.text = obfuscator(s.text);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MISSING_ARTIFACT,
                  "obfuscator failed on sample '" + s.id + "': " + e.what());
    }
    if (tokenize(copy.text).size() < 3) {
      // keep the pair count exact even when the rewrite got too short
      copy.text = copy.text + " <short> <short>";
    }
    samples.push_back(std::move(copy));
  }
  return Corpus(std::move(samples), raw.provenance() + "+adaptive");
}

PrivacyReport evaluate_privacy(const Obfuscator& obfuscator, const Corpus& corpus,
                               const std::vector<AdversaryConfig>& configs) {
  Corpus train = corpus.filter_split(Split::TRAIN);
  Corpus test = corpus.filter_split(Split::TEST);
  if (train.empty() || test.empty()) {
    throw Error(ErrorCode::EMPTY_TRAINSET, "corpus needs train and test splits");
  }

  std::vector<std::string> raw_test_texts, obf_test_texts;
  std::vector<bool> truth;
  for (const auto& s : test.samples()) {
    raw_test_texts.push_back(s.text);
    obf_test_texts.push_back(obfuscator(s.text));
    truth.push_back(s.label == Label::AD);
  }

  PrivacyReport report;
  std::set<AdversaryKind> kinds;
  for (const auto& c : configs) kinds.insert(c.kind);
  for (AdversaryKind kind : kinds) {
    AdversaryConfig base_config;
    base_config.kind = kind;
    for (const auto& c : configs) {
      if (c.kind == kind) {
        base_config = c;
        break;
      }
    }
    base_config.setting = AdversarySetting::STATIC;
    auto clf = train_adversary(base_config, train);
    report.baselines[kind] = f1_score(clf->predict_many(raw_test_texts), truth);
  }

  for (const auto& config : configs) {
    Corpus trainset = config.setting == AdversarySetting::STATIC
                          ? train
                          : build_adaptive_trainset(train, obfuscator);
    auto clf = train_adversary(config, trainset);
    PrivacyCell cell;
    cell.kind = config.kind;
    cell.setting = config.setting;
    cell.f1 = f1_score(clf->predict_many(obf_test_texts), truth);
    cell.baseline = report.baselines[config.kind];
    cell.drop = cell.baseline - cell.f1;
    report.cells.push_back(cell);
  }

  for (const auto& cell : report.cells) report.avg_f1 += cell.f1;
  if (!report.cells.empty()) report.avg_f1 /= static_cast<double>(report.cells.size());
  for (const auto& [kind, f1] : report.baselines) report.baseline_f1 += f1;
  if (!report.baselines.empty()) {
    report.baseline_f1 /= static_cast<double>(report.baselines.size());
  }
  return report;
}

std::string privacy_report_to_json(const PrivacyReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"kind", adversary_kind_name(cell.kind)},
                     {"setting", adversary_setting_name(cell.setting)},
                     {"f1", cell.f1},
                     {"baseline", cell.baseline},
                     {"drop", cell.drop}});
  }
  json baselines;
  for (const auto& [kind, f1] : report.baselines) baselines[adversary_kind_name(kind)] = f1;
  json j;
  j["cells"] = cells;
  j["baselines"] = baselines;
  j["avg_f1"] = report.avg_f1;
  j["baseline_f1"] = report.baseline_f1;
  j["schema_version"] = 1;
  return j.dump(2) + "\n";
}

PrivacyReport privacy_report_from_json(const std::string& text) {
  json j = json::parse(text);
  PrivacyReport report;
  for (const auto& c : j.at("cells")) {
    PrivacyCell cell;
    cell.kind = parse_adversary_kind(c.at("kind").get<std::string>());
    cell.setting = parse_adversary_setting(c.at("setting").get<std::string>());
    cell.f1 = c.at("f1").get<double>();
    cell.baseline = c.at("baseline").get<double>();
    cell.drop = c.at("drop").get<double>();
    report.cells.push_back(cell);
  }
  for (auto& [k, v] : j.at("baselines").items()) {
    report.baselines[parse_adversary_kind(k)] = v.get<double>();
  }
  report.avg_f1 = j.at("avg_f1").get<double>();
  report.baseline_f1 = j.at("baseline_f1").get<double>();
  return report;
}

}  // namespace didots
