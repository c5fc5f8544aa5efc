#pragma once

#include <cstdint>
#include <vector>

#include "didots/matrix.hpp"

namespace didots {

enum class KernelType { RBF, LINEAR };

struct SvmConfig {
  KernelType kernel = KernelType::RBF;
  double C = 1.0;
  double gamma = 0.0;  // 0 selects 1 / (n_features * feature variance)
  double tol = 1e-3;
  int max_passes = 20;
  int max_iterations = 20000;
  std::uint64_t seed = 13;
};

// Soft-margin binary kernel classifier trained with a sequential
// minimal-optimization dual solver. Labels are +1 / -1.
class KernelSvm {
 public:
  explicit KernelSvm(SvmConfig config = {}) : config_(config) {}

  void fit(const Matrix& features, const std::vector<int>& labels);

  double decision(const std::vector<double>& x) const;
  int predict(const std::vector<double>& x) const {
    return decision(x) >= 0.0 ? 1 : -1;
  }
  std::vector<int> predict_rows(const Matrix& features) const;

  double effective_gamma() const { return gamma_; }
  std::size_t support_count() const { return support_.rows; }

 private:
  double kernel(const double* a, const double* b, int n) const;

  SvmConfig config_;
  double gamma_ = 0.0;
  Matrix support_;
  std::vector<double> alpha_y_;  // alpha_i * y_i per support vector
  double bias_ = 0.0;
};

}  // namespace didots
