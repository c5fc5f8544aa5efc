#pragma once

#include <optional>
#include <string>
#include <vector>

#include "didots/adversary.hpp"

namespace didots {

// One row of the results grid: neural cells under the BERT columns, kernel
// cells under SVM, static/adaptive per column pair.
struct ReportRow {
  std::string system;
  std::optional<double> bert_static;
  std::optional<double> bert_adaptive;
  std::optional<double> svm_static;
  std::optional<double> svm_adaptive;
  std::optional<double> avg_f1;     // mean of the four adversary cells
  std::optional<double> semantics;
};

struct ResultsGrid {
  std::vector<ReportRow> rows;
  static const std::vector<std::string>& columns();  // fixed cell structure
};

// Original row (baselines, semantics 1.0) plus one row for the measured
// system. Absent cells stay absent; avg_f1 fills only when all four cells
// exist.
ResultsGrid build_grid(const std::string& system_name, const PrivacyReport& privacy,
                       std::optional<double> semantics);

std::string grid_to_markdown(const ResultsGrid& grid);
std::string grid_to_csv(const ResultsGrid& grid);

// Static privacy-utility tradeoff scatter (avg F1 vs semantics), one point
// per row that has both values.
std::string tradeoff_svg(const ResultsGrid& grid);

}  // namespace didots
