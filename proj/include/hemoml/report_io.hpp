#pragma once

// Report artifacts: appendix-style CSVs (63 combination rows x method
// columns, 4 decimal places), the full per-fold report JSON, histogram /
// summary / ratio / unilateral CSV exports, and a feature-matrix CSV.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemoml/evaluation.hpp"
#include "hemoml/json_io.hpp"
#include "hemoml/learners/grid_search.hpp"

namespace hemoml {

inline constexpr int kCsvDecimals = 4;

/// One CSV per metric: rows = combinations (appendix order), columns =
/// methods.
inline std::string report_metric_csv(const EvaluationReport& report,
                                     const std::string& metric) {
  std::string out = "combination";
  for (const Method m : report.methods) out += std::string(",") + to_string(m);
  out += "\n";
  for (std::size_t c = 0; c < report.combinations.size(); ++c) {
    out += appendix_label(report.combinations[c]);
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
      const auto agg = report.aggregate(m, c);
      double v = 0.0;
      if (metric == "f1")
        v = agg.mean.f1;
      else if (metric == "sensitivity")
        v = agg.mean.sensitivity;
      else if (metric == "specificity")
        v = agg.mean.specificity;
      else
        throw std::invalid_argument("report_metric_csv: unknown metric " + metric);
      out += ",";
      out += agg.any_failed ? "FAILED" : format_fixed(v, kCsvDecimals);
    }
    out += "\n";
  }
  return out;
}

inline std::string report_to_json(const EvaluationReport& report) {
  JsonBuf j;
  j.begin_object();
  j.key("format").value(std::string_view("hemoml-report"));
  j.key("version").value(1);
  j.key("disease").value(std::string_view(to_string(report.disease)));
  j.key("master_seed").value(report.master_seed);
  j.key("methods").begin_array();
  for (const Method m : report.methods) j.value(std::string_view(to_string(m)));
  j.end_array();
  j.key("combinations").begin_array();
  for (const auto& combo : report.combinations) {
    j.begin_object();
    j.key("measurements").begin_array();
    for (const Measurement m : combo.included)
      j.value(std::string_view(to_string(m)));
    j.end_array();
    j.key("side").value(std::string_view(
        combo.side == Laterality::Bilateral
            ? "both"
            : (combo.side == Laterality::RightOnly ? "right" : "left")));
    j.end_object();
  }
  j.end_array();
  j.key("cells").begin_array();
  for (const CellResult& cell : report.cells) {
    j.begin_object();
    j.key("tp").value(static_cast<std::int64_t>(cell.counts.tp));
    j.key("fn").value(static_cast<std::int64_t>(cell.counts.fn));
    j.key("fp").value(static_cast<std::int64_t>(cell.counts.fp));
    j.key("tn").value(static_cast<std::int64_t>(cell.counts.tn));
    j.key("f1").value(cell.metrics.f1);
    j.key("sensitivity").value(cell.metrics.sensitivity);
    j.key("specificity").value(cell.metrics.specificity);
    j.key("precision").value(cell.metrics.precision);
    j.key("degenerate").value(cell.metrics.degenerate);
    j.key("failed").value(cell.failed);
    if (cell.failed) j.key("error").value(std::string_view(cell.error));
    j.end_object();
  }
  j.end_array();
  j.end_object();
  return j.take();
}

inline EvaluationReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "hemoml-report" || j.value("version", 0) != 1)
    throw std::invalid_argument("report json: unknown format/version");
  EvaluationReport report;
  report.disease = disease_kind_from_string(j.at("disease").get<std::string>());
  report.master_seed = j.at("master_seed").get<std::uint64_t>();
  for (const auto& m : j.at("methods"))
    report.methods.push_back(method_from_string(m.get<std::string>()));
  for (const auto& cj : j.at("combinations")) {
    std::vector<Measurement> ms;
    for (const auto& m : cj.at("measurements"))
      ms.push_back(measurement_from_string(m.get<std::string>()));
    const std::string side = cj.at("side").get<std::string>();
    const Laterality lat = side == "both"
                               ? Laterality::Bilateral
                               : (side == "right" ? Laterality::RightOnly
                                                  : Laterality::LeftOnly);
    report.combinations.push_back(MeasurementCombination::of(std::move(ms), lat));
  }
  for (const auto& cj : j.at("cells")) {
    CellResult cell;
    cell.counts.tp = cj.at("tp").get<long>();
    cell.counts.fn = cj.at("fn").get<long>();
    cell.counts.fp = cj.at("fp").get<long>();
    cell.counts.tn = cj.at("tn").get<long>();
    cell.metrics.f1 = cj.at("f1").get<double>();
    cell.metrics.sensitivity = cj.at("sensitivity").get<double>();
    cell.metrics.specificity = cj.at("specificity").get<double>();
    cell.metrics.precision = cj.at("precision").get<double>();
    cell.metrics.recall = cell.metrics.sensitivity;
    cell.metrics.degenerate = cj.at("degenerate").get<bool>();
    cell.failed = cj.at("failed").get<bool>();
    if (cell.failed) cell.error = cj.value("error", "");
    report.cells.push_back(std::move(cell));
  }
  const std::size_t expected =
      report.methods.size() * report.combinations.size() * kNumFolds;
  if (report.cells.size() != expected)
    throw std::invalid_argument("report json: cell count mismatch");
  return report;
}

inline std::string count_summary_csv(const std::vector<CountSummaryRow>& rows,
                                     const EvaluationReport& report) {
  std::string out = "method,n_measurements,mean_f1,max_f1,min_f1,argmax_combination\n";
  for (const auto& row : rows) {
    out += to_string(row.method);
    out += "," + std::to_string(row.n_measurements);
    out += "," + format_fixed(row.mean_f1, kCsvDecimals);
    out += "," + format_fixed(row.max_f1, kCsvDecimals);
    out += "," + format_fixed(row.min_f1, kCsvDecimals);
    out += "," + appendix_label(report.combinations[row.argmax_combo]);
    out += "\n";
  }
  return out;
}

inline std::string q1_histograms_csv(const std::vector<Q1Histograms>& hists) {
  std::string out = "method,bucket_low,bucket_high,include_q1,exclude_q1\n";
  for (const auto& h : hists) {
    for (std::size_t b = 0; b < h.include_q1.size(); ++b) {
      out += to_string(h.method);
      out += "," + format_fixed(b * h.bucket_width, 2);
      out += "," + format_fixed((b + 1) * h.bucket_width, 2);
      out += "," + std::to_string(h.include_q1[b]);
      out += "," + std::to_string(h.exclude_q1[b]);
      out += "\n";
    }
  }
  return out;
}

inline std::string ratio_csv(const EvaluationReport& report_high,
                             const std::vector<double>& ratios) {
  std::string out = "combination,f1_ratio_low_over_high\n";
  for (std::size_t c = 0; c < ratios.size(); ++c) {
    out += appendix_label(report_high.combinations[c]);
    out += "," + format_fixed(ratios[c], kCsvDecimals);
    out += "\n";
  }
  return out;
}

inline std::string unilateral_csv(const std::vector<UnilateralRow>& rows) {
  std::string out = "measurement,side,sensitivity,specificity\n";
  for (const auto& row : rows) {
    out += to_string(row.measurement);
    out += std::string(",") +
           (row.side == Laterality::Bilateral
                ? "both"
                : (row.side == Laterality::RightOnly ? "right" : "left"));
    out += "," + format_fixed(row.metrics.sensitivity, kCsvDecimals);
    out += "," + format_fixed(row.metrics.specificity, kCsvDecimals);
    out += "\n";
  }
  return out;
}

/// Feature matrix with one named column per coefficient.
inline std::string feature_matrix_csv(const Matrix& x,
                                      const std::vector<std::string>& names) {
  if (names.size() != x.cols)
    throw std::invalid_argument("feature_matrix_csv: header size mismatch");
  std::string out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) out += ",";
    out += names[c];
  }
  out += "\n";
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      if (c) out += ",";
      out += format_double(x.at(r, c));
    }
    out += "\n";
  }
  return out;
}

inline std::string grid_table_csv(const GridResult& result, Method method) {
  std::string out = "method,";
  out += method == Method::MLP ? "neurons,layers,mean_f1" : "trees,depth,mean_f1";
  const std::size_t n_folds =
      result.table.empty() ? 0 : result.table.front().fold_f1.size();
  for (std::size_t f = 0; f < n_folds; ++f)
    out += ",fold" + std::to_string(f + 1) + "_f1";
  out += "\n";
  for (const GridRow& row : result.table) {
    out += std::string(to_string(method)) + ",";
    if (method == Method::MLP)
      out += std::to_string(row.hyperparams.mlp.neurons_per_layer) + "," +
             std::to_string(row.hyperparams.mlp.hidden_layers);
    else if (method == Method::RF)
      out += std::to_string(row.hyperparams.rf.n_trees) + "," +
             std::to_string(row.hyperparams.rf.max_depth);
    else
      out += std::to_string(row.hyperparams.gb.n_trees) + "," +
             std::to_string(row.hyperparams.gb.max_depth);
    out += "," + format_fixed(row.mean_f1, kCsvDecimals);
    for (double f1 : row.fold_f1) out += "," + format_fixed(f1, kCsvDecimals);
    out += "\n";
  }
  return out;
}

} // namespace hemoml
