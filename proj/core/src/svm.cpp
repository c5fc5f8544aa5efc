#include "didots/svm.hpp"

#include <cmath>

#include "didots/common.hpp"

namespace didots {

double KernelSvm::kernel(const double* a, const double* b, int n) const {
  if (config_.kernel == KernelType::LINEAR) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += a[i] * b[i];
    return dot;
  }
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    sq += d * d;
  }
  return std::exp(-gamma_ * sq);
}

void KernelSvm::fit(const Matrix& features, const std::vector<int>& labels) {
  int n = features.rows;
  int dim = features.cols;
  if (n == 0 || static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorCode::CONFIG_INVALID, "bad training matrix");
  }

  gamma_ = config_.gamma;
  if (gamma_ <= 0.0) {
    // 1 / (n_features * variance of all feature values)
    double mean = 0.0;
    for (double v : features.data) mean += v;
    mean /= static_cast<double>(features.data.size());
    double var = 0.0;
    for (double v : features.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(features.data.size());
    gamma_ = var > 0.0 ? 1.0 / (dim * var) : 1.0 / dim;
  }

  // precomputed Gram matrix; training sets here are small
  Matrix gram(n, n);
  for (int i = 0; i < n; ++i) {
    const double* xi = &features.data[static_cast<std::size_t>(i) * dim];
    for (int j = i; j < n; ++j) {
      const double* xj = &features.data[static_cast<std::size_t>(j) * dim];
      double k = kernel(xi, xj, dim);
      gram.at(i, j) = k;
      gram.at(j, i) = k;
    }
  }

  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  double b = 0.0;
  auto f = [&](int i) {
    double sum = b;
    for (int j = 0; j < n; ++j) {
      if (alpha[static_cast<std::size_t>(j)] != 0.0) {
        sum += alpha[static_cast<std::size_t>(j)] * labels[static_cast<std::size_t>(j)] *
               gram.at(j, i);
      }
    }
    return sum;
  };

  Rng rng(config_.seed);
  const double C = config_.C, tol = config_.tol;
  int passes = 0, iterations = 0;
  while (passes < config_.max_passes && iterations < config_.max_iterations) {
    int changed = 0;
    for (int i = 0; i < n; ++i) {
      ++iterations;
      double yi = labels[static_cast<std::size_t>(i)];
      double ei = f(i) - yi;
      bool violates = (yi * ei < -tol && alpha[static_cast<std::size_t>(i)] < C) ||
                      (yi * ei > tol && alpha[static_cast<std::size_t>(i)] > 0.0);
      if (!violates) continue;

      int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      double yj = labels[static_cast<std::size_t>(j)];
      double ej = f(j) - yj;

      double ai_old = alpha[static_cast<std::size_t>(i)];
      double aj_old = alpha[static_cast<std::size_t>(j)];
      double lo, hi;
      if (yi != yj) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(C, C + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - C);
        hi = std::min(C, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      double eta = 2.0 * gram.at(i, j) - gram.at(i, i) - gram.at(j, j);
      if (eta >= 0.0) continue;

      double aj = aj_old - yj * (ei - ej) / eta;
      aj = std::min(hi, std::max(lo, aj));
      if (std::fabs(aj - aj_old) < 1e-6) continue;
      double ai = ai_old + yi * yj * (aj_old - aj);
      alpha[static_cast<std::size_t>(i)] = ai;
      alpha[static_cast<std::size_t>(j)] = aj;

      double b1 = b - ei - yi * (ai - ai_old) * gram.at(i, i) -
                  yj * (aj - aj_old) * gram.at(i, j);
      double b2 = b - ej - yi * (ai - ai_old) * gram.at(i, j) -
                  yj * (aj - aj_old) * gram.at(j, j);
      if (ai > 0.0 && ai < C) b = b1;
      else if (aj > 0.0 && aj < C) b = b2;
      else b = 0.5 * (b1 + b2);
      ++changed;
    }
    passes = changed == 0 ? passes + 1 : 0;
  }

  // keep support vectors only
  int support_n = 0;
  for (double a : alpha) {
    if (a > 1e-9) ++support_n;
  }
  support_ = Matrix(support_n, dim);
  alpha_y_.clear();
  alpha_y_.reserve(static_cast<std::size_t>(support_n));
  int row = 0;
  for (int i = 0; i < n; ++i) {
    if (alpha[static_cast<std::size_t>(i)] > 1e-9) {
      for (int c = 0; c < dim; ++c) support_.at(row, c) = features.at(i, c);
      alpha_y_.push_back(alpha[static_cast<std::size_t>(i)] *
                         labels[static_cast<std::size_t>(i)]);
      ++row;
    }
  }
  bias_ = b;
}

double KernelSvm::decision(const std::vector<double>& x) const {
  double sum = bias_;
  for (int i = 0; i < support_.rows; ++i) {
    sum += alpha_y_[static_cast<std::size_t>(i)] *
           kernel(&support_.data[static_cast<std::size_t>(i) * support_.cols], x.data(),
                  support_.cols);
  }
  return sum;
}

std::vector<int> KernelSvm::predict_rows(const Matrix& features) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(features.rows));
  for (int r = 0; r < features.rows; ++r) {
    std::vector<double> x(features.cols);
    for (int c = 0; c < features.cols; ++c) x[static_cast<std::size_t>(c)] = features.at(r, c);
    out.push_back(predict(x));
  }
  return out;
}

}  // namespace didots
