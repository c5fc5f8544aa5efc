#include "didots/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "didots/common.hpp"

namespace didots {

namespace {

struct EncodedPair {
  std::vector<int> src;
  std::vector<int> tgt;
};

std::vector<EncodedPair> encode_clean_pairs(StudentBackend& model,
                                            const PairDataset& dataset) {
  std::vector<EncodedPair> out;
  const auto& tok = model.tokenizer();
  for (const auto* pair : dataset.clean_pairs()) {
    EncodedPair e;
    e.src = tok.encode(pair->original.text);
    e.src.push_back(WordTokenizer::kEos);
    e.tgt = tok.encode(pair->obfuscated);
    if (e.src.empty() || e.tgt.empty()) continue;
    out.push_back(std::move(e));
  }
  return out;
}

double mean_loss(StudentBackend& model, const std::vector<EncodedPair>& pairs) {
  double total = 0.0;
  for (const auto& p : pairs) total += model.sequence_loss(p.src, p.tgt, false);
  return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
}

std::vector<Matrix> snapshot(std::vector<Parameter*>& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (Parameter* p : params) out.push_back(p->value);
  return out;
}

void restore(std::vector<Parameter*>& params, const std::vector<Matrix>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace

PairDataset copy_pairs(const std::vector<std::string>& texts) {
  PairDataset dataset;
  std::size_t i = 0;
  for (const auto& text : texts) {
    ObfuscationPair p;
    p.original.id = "copy-" + std::to_string(i++);
    p.original.text = text;
    p.obfuscated = text;
    p.model_id = "identity";
    dataset.pairs.push_back(std::move(p));
  }
  dataset.recompute_stats();
  return dataset;
}

TrainReport train(StudentBackend& model, const PairDataset& pairs,
                  const TrainConfig& config, const PairDataset& val) {
  std::vector<EncodedPair> train_set = encode_clean_pairs(model, pairs);
  std::vector<EncodedPair> val_set = encode_clean_pairs(model, val);
  if (train_set.empty()) {
    throw Error(ErrorCode::EMPTY_TRAINSET, "no flag-free training pairs");
  }
  if (val_set.empty()) {
    throw Error(ErrorCode::EMPTY_TRAINSET, "validation set is empty");
  }

  std::vector<Parameter*> trainable = model.trainable_params();
  TrainReport report;
  for (Parameter* p : trainable) report.updated_parameters += p->value.size();

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_state = snapshot(trainable);
  int evals_since_best = 0;
  std::size_t adam_step_count = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Fisher-Yates with the run's rng keeps epochs reproducible
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    std::size_t batch_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      model.zero_grads();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const EncodedPair& p = train_set[order[i]];
        batch_loss += model.sequence_loss(p.src, p.tgt, true);
      }
      std::size_t n = end - start;
      batch_loss /= static_cast<double>(n);
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::NONFINITE_LOSS,
                    "epoch " + std::to_string(epoch) + ", batch " +
                        std::to_string(batch_count) + ": loss = " +
                        std::to_string(batch_loss));
      }
      model.scale_grads(1.0 / static_cast<double>(n));
      adam_step(trainable, config.learning_rate, ++adam_step_count);
      epoch_loss += batch_loss;
      ++batch_count;
    }
    epoch_loss /= static_cast<double>(std::max<std::size_t>(1, batch_count));

    double val_loss = mean_loss(model, val_set);
    if (!std::isfinite(val_loss)) {
      throw Error(ErrorCode::NONFINITE_LOSS,
                  "epoch " + std::to_string(epoch) + ": validation loss nonfinite");
    }
    report.epochs.push_back({epoch, epoch_loss, val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best_state = snapshot(trainable);
      report.best_epoch = epoch;
      evals_since_best = 0;
    } else {
      ++evals_since_best;
      if (evals_since_best >= config.patience) {
        report.early_stopped = true;
        break;
      }
    }
  }

  restore(trainable, best_state);
  return report;
}

}  // namespace didots
