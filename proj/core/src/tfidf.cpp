#include "didots/tfidf.hpp"

#include <cmath>
#include <set>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

void TfidfVectorizer::fit(const std::vector<std::string>& documents) {
  std::set<std::string> terms;
  for (const auto& doc : documents) {
    for (const auto& tok : word_tokens(doc)) terms.insert(tok);
  }
  if (terms.empty()) throw Error(ErrorCode::EMPTY_VOCABULARY, "no terms in fit corpus");

  vocabulary_.assign(terms.begin(), terms.end());
  index_.clear();
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) index_[vocabulary_[i]] = i;

  std::vector<std::size_t> df(vocabulary_.size(), 0);
  for (const auto& doc : documents) {
    std::set<std::string> seen;
    for (const auto& tok : word_tokens(doc)) {
      if (seen.insert(tok).second) df[index_[tok]] += 1;
    }
  }
  double n = static_cast<double>(documents.size());
  idf_.resize(vocabulary_.size());
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
}

Matrix TfidfVectorizer::transform(const std::vector<std::string>& documents) const {
  if (!fitted()) throw Error(ErrorCode::EMPTY_VOCABULARY, "vectorizer not fitted");
  Matrix out(static_cast<int>(documents.size()), static_cast<int>(vocabulary_.size()));
  for (std::size_t r = 0; r < documents.size(); ++r) {
    for (const auto& tok : word_tokens(documents[r])) {
      auto it = index_.find(tok);
      if (it != index_.end()) {
        out.at(static_cast<int>(r), static_cast<int>(it->second)) += idf_[it->second];
      }
    }
    double sq = 0.0;
    for (int c = 0; c < out.cols; ++c) sq += out.at(static_cast<int>(r), c) * out.at(static_cast<int>(r), c);
    if (sq > 0.0) {
      double inv = 1.0 / std::sqrt(sq);
      for (int c = 0; c < out.cols; ++c) out.at(static_cast<int>(r), c) *= inv;
    }
  }
  return out;
}

Matrix TfidfVectorizer::fit_transform(const std::vector<std::string>& documents) {
  fit(documents);
  return transform(documents);
}

double TfidfVectorizer::idf(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? 0.0 : idf_[it->second];
}

}  // namespace didots
