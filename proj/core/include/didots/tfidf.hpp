#pragma once

#include <map>
#include <string>
#include <vector>

#include "didots/matrix.hpp"

namespace didots {

// TF-IDF with smoothed idf: ln((1 + n) / (1 + df)) + 1, raw term counts,
// l2-normalized rows. Vocabulary fixes at fit time (sorted terms) and is
// reused verbatim by transform; out-of-vocabulary text maps to a zero row.
class TfidfVectorizer {
 public:
  void fit(const std::vector<std::string>& documents);  // EMPTY_VOCABULARY
  Matrix transform(const std::vector<std::string>& documents) const;
  Matrix fit_transform(const std::vector<std::string>& documents);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  double idf(const std::string& term) const;  // 0 when out of vocabulary
  bool fitted() const { return !vocabulary_.empty(); }

 private:
  std::vector<std::string> vocabulary_;
  std::map<std::string, std::size_t> index_;
  std::vector<double> idf_;
};

}  // namespace didots
