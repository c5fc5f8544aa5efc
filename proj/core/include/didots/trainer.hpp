#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "didots/backend.hpp"
#include "didots/synthesis.hpp"

namespace didots {

struct TrainConfig {
  int max_epochs = 3;
  int patience = 10;          // evaluations without val improvement
  int batch_size = 8;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t updated_parameters = 0;  // trainable scalar count
  int best_epoch = -1;
  bool early_stopped = false;
};

// Minimizes token-level cross-entropy of obfuscated given original over the
// flag-free pairs, Adam with fixed learning rate, early stopping on
// validation loss, best-epoch weights restored. Throws EMPTY_TRAINSET and
// NONFINITE_LOSS.
TrainReport train(StudentBackend& model, const PairDataset& pairs,
                  const TrainConfig& config, const PairDataset& val);

// Identity pairs (text -> text) over corpus sentences; the from-scratch
// pretraining task that gives the reference backend its copy behavior before
// adapter fine-tuning.
PairDataset copy_pairs(const std::vector<std::string>& texts);

}  // namespace didots
