#include "didots/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace didots {

const std::vector<std::string>& ResultsGrid::columns() {
  static const std::vector<std::string> kColumns = {
      "System", "BERT S", "BERT A", "SVM S", "SVM A", "Avg F1", "Sem.",
  };
  return kColumns;
}

ResultsGrid build_grid(const std::string& system_name, const PrivacyReport& privacy,
                       std::optional<double> semantics) {
  ResultsGrid grid;

  ReportRow original;
  original.system = "Original";
  auto neural_base = privacy.baselines.find(AdversaryKind::NEURAL);
  auto kernel_base = privacy.baselines.find(AdversaryKind::KERNEL);
  if (neural_base != privacy.baselines.end()) {
    original.bert_static = neural_base->second;
    original.bert_adaptive = neural_base->second;
  }
  if (kernel_base != privacy.baselines.end()) {
    original.svm_static = kernel_base->second;
    original.svm_adaptive = kernel_base->second;
  }
  if (original.bert_static && original.svm_static) {
    original.avg_f1 = (*original.bert_static + *original.bert_adaptive +
                       *original.svm_static + *original.svm_adaptive) /
                      4.0;
  }
  original.semantics = 1.0;
  grid.rows.push_back(std::move(original));

  ReportRow row;
  row.system = system_name;
  for (const auto& cell : privacy.cells) {
    std::optional<double>* slot = nullptr;
    if (cell.kind == AdversaryKind::NEURAL) {
      slot = cell.setting == AdversarySetting::STATIC ? &row.bert_static
                                                      : &row.bert_adaptive;
    } else {
      slot = cell.setting == AdversarySetting::STATIC ? &row.svm_static
                                                      : &row.svm_adaptive;
    }
    *slot = cell.f1;
  }
  if (row.bert_static && row.bert_adaptive && row.svm_static && row.svm_adaptive) {
    row.avg_f1 =
        (*row.bert_static + *row.bert_adaptive + *row.svm_static + *row.svm_adaptive) / 4.0;
  }
  row.semantics = semantics;
  grid.rows.push_back(std::move(row));
  return grid;
}

namespace {

std::string cell_text(const std::optional<double>& v) {
  if (!v.has_value()) return "-";  // explicit gap, never an invented value
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *v;
  return out.str();
}

std::vector<std::string> row_cells(const ReportRow& row) {
  return {row.system,
          cell_text(row.bert_static),
          cell_text(row.bert_adaptive),
          cell_text(row.svm_static),
          cell_text(row.svm_adaptive),
          cell_text(row.avg_f1),
          cell_text(row.semantics)};
}

}  // namespace

std::string grid_to_markdown(const ResultsGrid& grid) {
  std::ostringstream out;
  const auto& cols = ResultsGrid::columns();
  out << "|";
  for (const auto& c : cols) out << " " << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < cols.size(); ++i) out << " --- |";
  out << "\n";
  for (const auto& row : grid.rows) {
    out << "|";
    for (const auto& cell : row_cells(row)) out << " " << cell << " |";
    out << "\n";
  }
  return out.str();
}

std::string grid_to_csv(const ResultsGrid& grid) {
  std::ostringstream out;
  const auto& cols = ResultsGrid::columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out << ",";
    out << cols[i];
  }
  out << "\n";
  for (const auto& row : grid.rows) {
    auto cells = row_cells(row);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ",";
      out << cells[i];
    }
    out << "\n";
  }
  return out.str();
}

std::string tradeoff_svg(const ResultsGrid& grid) {
  constexpr int kW = 480, kH = 360, kPad = 50;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad
      << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">adversary success (Avg F1)</text>\n";
  out << "<text x=\"14\" y=\"" << kH / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << kH / 2 << ")\">semantics</text>\n";
  auto x_of = [&](double f1) { return kPad + f1 * (kW - 2 * kPad); };
  auto y_of = [&](double sem) { return kH - kPad - sem * (kH - 2 * kPad); };
  const char* colors[] = {"#888888", "#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  int ci = 0;
  for (const auto& row : grid.rows) {
    if (!row.avg_f1.has_value() || !row.semantics.has_value()) continue;
    double x = x_of(*row.avg_f1), y = y_of(*row.semantics);
    const char* color = colors[ci++ % 5];
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"5\" fill=\"" << color
        << "\"/>\n";
    out << "<text x=\"" << x + 8 << "\" y=\"" << y + 4 << "\" font-size=\"11\">"
        << row.system << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace didots
