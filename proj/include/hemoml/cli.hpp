#pragma once

// Command implementations behind the CLI entry points. Everything is a
// plain function over RunConfig so tests can drive the exact code paths the
// binary runs. Exit codes: 0 success, 1 validation error, 2 partial sweep.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemoml/config.hpp"
#include "hemoml/evaluation.hpp"
#include "hemoml/json_io.hpp"
#include "hemoml/learners/grid_search.hpp"
#include "hemoml/records.hpp"
#include "hemoml/report_io.hpp"
#include "hemoml/util.hpp"

namespace hemoml::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitPartialSweep = 2;

inline std::vector<PatientRecord> make_cohort(
    const RunConfig& cfg, std::optional<DiseaseKind> disease) {
  const std::uint64_t n =
      disease ? cfg.count_for(*disease) : cfg.healthy_count;
  const RngStream master(cfg.seed);
  const auto population =
      generate_population(n, disease, master, cfg.surrogate, cfg.jobs);
  std::vector<PatientRecord> records;
  records.reserve(population.size());
  for (const auto& [subject, waves] : population)
    records.push_back(make_patient_record(subject, waves));
  return records;
}

/// generate: VPD_H plus one JSONL cohort per requested disease, twin-paired
/// through the shared master seed.
inline int run_generate(const RunConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  write_cohort_file(cfg.cohort_path("H"), make_cohort(cfg, std::nullopt));
  log << "wrote " << cfg.cohort_path("H").string() << " (" << cfg.healthy_count
      << " records)\n";
  for (const DiseaseKind kind : cfg.diseases) {
    const auto records = make_cohort(cfg, kind);
    write_cohort_file(cfg.cohort_path(to_string(kind)), records);
    log << "wrote " << cfg.cohort_path(to_string(kind)).string() << " ("
        << records.size() << " records)\n";
  }
  return kExitOk;
}

inline SplitPlan plan_for(const RunConfig& cfg, DiseaseKind kind,
                          const std::vector<PatientRecord>& healthy,
                          const std::vector<PatientRecord>& diseased) {
  // twin pairing: the diseased cohort may be smaller (e.g. AAA_L); restrict
  // the healthy ids to the twin-paired prefix
  const auto d_ids = cohort_ids(diseased);
  std::vector<std::uint64_t> h_ids;
  {
    std::set<std::uint64_t> want(d_ids.begin(), d_ids.end());
    for (const auto& rec : healthy)
      if (want.count(rec.id)) h_ids.push_back(rec.id);
  }
  const RngStream plan_stream = RngStream(cfg.seed).child(
      {rng_tag::kPlan, static_cast<std::uint64_t>(kind)});
  return build_split_plan(kind, h_ids, d_ids, plan_stream);
}

namespace detail {

inline std::filesystem::path report_json_path(const RunConfig& cfg,
                                              DiseaseKind kind) {
  std::string tag = to_string(kind);
  for (char& c : tag) c = static_cast<char>(::tolower(c));
  return std::filesystem::path(cfg.out_dir) / ("sweep_" + tag + "_report.json");
}

inline std::filesystem::path metric_csv_path(const RunConfig& cfg,
                                             DiseaseKind kind,
                                             const std::string& metric) {
  std::string tag = to_string(kind);
  for (char& c : tag) c = static_cast<char>(::tolower(c));
  return std::filesystem::path(cfg.out_dir) /
         ("sweep_" + tag + "_" + metric + ".csv");
}

inline std::filesystem::path manifest_path(const RunConfig& cfg,
                                           DiseaseKind kind) {
  std::string tag = to_string(kind);
  for (char& c : tag) c = static_cast<char>(::tolower(c));
  return std::filesystem::path(cfg.out_dir) / ("sweep_" + tag + ".manifest.json");
}

inline std::uint64_t sweep_checksum(const RunConfig& cfg, DiseaseKind kind,
                                    const std::vector<Method>& methods,
                                    const std::string& combo_spec) {
  std::uint64_t h = fnv1a64("sweep", 5);
  const std::string cfg_json = config_to_json(cfg);
  h = fnv1a64(cfg_json.data(), cfg_json.size(), h);
  const std::string healthy = read_file(cfg.cohort_path("H"));
  h = fnv1a64(healthy.data(), healthy.size(), h);
  const std::string diseased = read_file(cfg.cohort_path(to_string(kind)));
  h = fnv1a64(diseased.data(), diseased.size(), h);
  for (const Method m : methods) h = fnv1a64(to_string(m), 2, h);
  h = fnv1a64(combo_spec.data(), combo_spec.size(), h);
  return h;
}

} // namespace detail

/// Parse an explicit --combos list like "q1,q1+p1,q3+q2+q1".
inline std::vector<MeasurementCombination> parse_combo_list(
    const std::string& spec) {
  std::vector<MeasurementCombination> combos;
  std::istringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ',')) {
    if (group.empty()) continue;
    std::vector<Measurement> ms;
    std::istringstream parts(group);
    std::string part;
    while (std::getline(parts, part, '+'))
      if (!part.empty()) ms.push_back(measurement_from_string(part));
    combos.push_back(MeasurementCombination::of(std::move(ms)));
  }
  if (combos.empty())
    throw std::invalid_argument("combo list is empty: " + spec);
  return combos;
}

struct SweepOptions {
  std::vector<DiseaseKind> diseases;  // empty = config list
  std::vector<Method> methods;        // empty = config list
  std::string combos = "all";         // "all" or explicit list
  bool force = false;                 // ignore resume manifests
};

/// sweep: build the split plan, run the combination search, export the
/// three metric CSVs plus the full report JSON per disease. Re-running a
/// completed sweep with unchanged inputs is a checksum-verified no-op.
inline int run_sweep(const RunConfig& cfg, const SweepOptions& options,
                     std::ostream& log = std::cout) {
  cfg.validate();
  const std::vector<DiseaseKind>& diseases =
      options.diseases.empty() ? cfg.diseases : options.diseases;
  const std::vector<Method>& methods =
      options.methods.empty() ? cfg.methods : options.methods;
  std::optional<std::vector<MeasurementCombination>> combo_override;
  if (options.combos != "all") combo_override = parse_combo_list(options.combos);

  const Hyperparams& hp = cfg.learner_defaults;
  log << "learner defaults: lr.l2=" << hp.lr.l2_strength
      << " svm.c=" << hp.svm.c << " svm.gamma="
      << (hp.svm.gamma > 0 ? std::to_string(hp.svm.gamma) : "1/(d*var)")
      << " mlp=" << hp.mlp.neurons_per_layer << "x" << hp.mlp.hidden_layers
      << " (epochs " << hp.mlp.epochs << ", batch " << hp.mlp.batch_size
      << ", step " << hp.mlp.learning_rate << ")"
      << " rf=" << hp.rf.n_trees << "/" << hp.rf.max_depth
      << " gb=" << hp.gb.n_trees << "/" << hp.gb.max_depth << "@"
      << hp.gb.learning_rate << " nb.floor_rel=" << hp.nb.variance_floor_rel
      << "\n";

  bool any_failures = false;
  for (const DiseaseKind kind : diseases) {
    const std::uint64_t checksum =
        detail::sweep_checksum(cfg, kind, methods, options.combos);
    const auto manifest = detail::manifest_path(cfg, kind);
    if (!options.force && std::filesystem::exists(manifest)) {
      try {
        const auto mj = nlohmann::json::parse(read_file(manifest));
        if (mj.value("checksum", std::uint64_t{0}) == checksum &&
            std::filesystem::exists(detail::report_json_path(cfg, kind))) {
          log << "sweep " << to_string(kind) << ": up to date, skipping\n";
          continue;
        }
      } catch (...) {
        // unreadable manifest: fall through and recompute
      }
    }

    const auto healthy = read_cohort_file(cfg.cohort_path("H"));
    const auto diseased = read_cohort_file(cfg.cohort_path(to_string(kind)));
    const SplitPlan plan = plan_for(cfg, kind, healthy, diseased);
    const auto healthy_waves = cohort_waveforms(healthy);
    const auto diseased_waves = cohort_waveforms(diseased);

    MethodParams params{cfg.learner_defaults};
    const EvaluationReport report = run_combination_search(
        kind, methods, plan, healthy_waves, diseased_waves, params, cfg.seed,
        cfg.jobs, combo_override ? &*combo_override : nullptr);

    atomic_write_file(detail::metric_csv_path(cfg, kind, "f1"),
                      report_metric_csv(report, "f1"));
    atomic_write_file(detail::metric_csv_path(cfg, kind, "sensitivity"),
                      report_metric_csv(report, "sensitivity"));
    atomic_write_file(detail::metric_csv_path(cfg, kind, "specificity"),
                      report_metric_csv(report, "specificity"));
    atomic_write_file(detail::report_json_path(cfg, kind),
                      report_to_json(report));
    JsonBuf mj;
    mj.begin_object();
    mj.key("checksum").value(checksum);
    mj.key("combinations")
        .value(static_cast<std::uint64_t>(report.combinations.size()));
    mj.end_object();
    atomic_write_file(manifest, mj.take());

    if (report.has_failures()) {
      any_failures = true;
      long n_failed = 0;
      for (const auto& cell : report.cells)
        if (cell.failed) ++n_failed;
      log << "sweep " << to_string(kind) << ": " << n_failed
          << " flagged cell(s)\n";
    } else {
      log << "sweep " << to_string(kind) << ": "
          << report.combinations.size() << " combinations x "
          << methods.size() << " methods done\n";
    }
  }
  return any_failures ? kExitPartialSweep : kExitOk;
}

/// gridsearch: Table 2-4 style search for RF, GB or MLP on the
/// all-measurement combination of one disease.
inline int run_gridsearch(const RunConfig& cfg, Method method,
                          DiseaseKind kind, std::ostream& log = std::cout) {
  cfg.validate();
  if (method != Method::RF && method != Method::GB && method != Method::MLP)
    throw std::invalid_argument(
        std::string(to_string(method)) +
        " has a problem-independent architecture; gridsearch applies to RF, "
        "GB and MLP");

  const auto healthy = read_cohort_file(cfg.cohort_path("H"));
  const auto diseased = read_cohort_file(cfg.cohort_path(to_string(kind)));
  const SplitPlan plan = plan_for(cfg, kind, healthy, diseased);
  const auto healthy_waves = cohort_waveforms(healthy);
  const auto diseased_waves = cohort_waveforms(diseased);

  const auto all_six = MeasurementCombination::of(
      {Measurement::Q1, Measurement::Q2, Measurement::Q3, Measurement::P1,
       Measurement::P2, Measurement::P3});
  const std::vector<MeasurementCombination> combos = {all_six};

  const std::vector<Hyperparams> cells =
      default_grid(method, cfg.learner_defaults);
  std::vector<std::vector<double>> fold_f1(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t c) {
    const EvaluationReport rep = run_combination_search(
        kind, {method}, plan, healthy_waves, diseased_waves,
        MethodParams{cells[c]}, cfg.seed, 1, &combos);
    std::vector<double> f1s;
    for (int f = 0; f < kNumFolds; ++f) {
      const CellResult& cell = rep.cell(0, 0, f);
      if (cell.failed) throw std::runtime_error("grid cell failed: " + cell.error);
      f1s.push_back(cell.metrics.f1);
    }
    fold_f1[c] = std::move(f1s);
  });

  std::size_t next = 0;
  const GridResult result =
      grid_search(cells, [&](const Hyperparams&) { return fold_f1[next++]; });

  std::string tag = to_string(kind);
  for (char& c : tag) c = static_cast<char>(::tolower(c));
  std::string mtag = to_string(method);
  for (char& c : mtag) c = static_cast<char>(::tolower(c));
  const auto path = std::filesystem::path(cfg.out_dir) /
                    ("grid_" + mtag + "_" + tag + ".csv");
  atomic_write_file(path, grid_table_csv(result, method));

  const Hyperparams& best = result.best;
  log << "best " << to_string(method) << " for " << to_string(kind) << ": ";
  if (method == Method::RF)
    log << "trees=" << best.rf.n_trees << " depth=" << best.rf.max_depth;
  else if (method == Method::GB)
    log << "trees=" << best.gb.n_trees << " depth=" << best.gb.max_depth;
  else
    log << "neurons=" << best.mlp.neurons_per_layer
        << " layers=" << best.mlp.hidden_layers;
  log << " mean_f1=" << format_fixed(result.best_mean_f1, kCsvDecimals) << "\n";
  return kExitOk;
}

/// summarize: measurement-count summary and Q1 inclusion histograms from a
/// previously written sweep report.
inline int run_summarize(const RunConfig& cfg, DiseaseKind kind,
                         const std::vector<Method>& methods,
                         std::ostream& log = std::cout) {
  const EvaluationReport report =
      report_from_json(read_file(detail::report_json_path(cfg, kind)));
  const auto summary = measurement_count_summary(report);
  const auto hists = q1_inclusion_histograms(
      report, methods.empty() ? report.methods : methods);

  std::string tag = to_string(kind);
  for (char& c : tag) c = static_cast<char>(::tolower(c));
  atomic_write_file(
      std::filesystem::path(cfg.out_dir) / ("summary_counts_" + tag + ".csv"),
      count_summary_csv(summary, report));
  atomic_write_file(
      std::filesystem::path(cfg.out_dir) / ("summary_q1_" + tag + ".csv"),
      q1_histograms_csv(hists));
  log << "summaries written for " << to_string(kind) << "\n";
  return kExitOk;
}

/// ratio-study: per-combination GB F1 ratios of AAA_L relative to AAA.
inline int run_ratio_study(const RunConfig& cfg, std::ostream& log = std::cout) {
  const EvaluationReport aaa =
      report_from_json(read_file(detail::report_json_path(cfg, DiseaseKind::AAA)));
  const EvaluationReport aaa_l = report_from_json(
      read_file(detail::report_json_path(cfg, DiseaseKind::AAA_L)));
  const auto ratios = low_severity_ratio_study(aaa, aaa_l, Method::GB);
  atomic_write_file(std::filesystem::path(cfg.out_dir) / "ratio_aaa_l.csv",
                    ratio_csv(aaa, ratios));
  log << "ratio study written (" << ratios.size() << " combinations)\n";
  return kExitOk;
}

/// unilateral: Table-13 style GB study on AAA with {Q1, P3} x {R, L, both}.
inline int run_unilateral(const RunConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  const auto healthy = read_cohort_file(cfg.cohort_path("H"));
  const auto diseased =
      read_cohort_file(cfg.cohort_path(to_string(DiseaseKind::AAA)));
  const SplitPlan plan = plan_for(cfg, DiseaseKind::AAA, healthy, diseased);
  const auto rows = unilateral_study(
      plan, cohort_waveforms(healthy), cohort_waveforms(diseased),
      MethodParams{cfg.learner_defaults}, cfg.seed, cfg.jobs);
  atomic_write_file(std::filesystem::path(cfg.out_dir) / "unilateral_aaa.csv",
                    unilateral_csv(rows));
  log << "unilateral study written (" << rows.size() << " rows)\n";
  return kExitOk;
}

/// Import descriptor: maps each site to the 11 column indices of an
/// external table (b0, a1..a5, b1..b5 order) plus id/period columns.
struct ImportDescriptor {
  int id_column = -1; // -1: synthesise sequential ids
  int period_column = -1;
  std::array<std::vector<int>, kNumSites> site_columns;

  static ImportDescriptor from_json(const nlohmann::json& j) {
    ImportDescriptor d;
    d.id_column = j.value("id_column", -1);
    if (!j.contains("period_column"))
      throw std::invalid_argument("descriptor: period_column is required");
    d.period_column = j.at("period_column").get<int>();
    if (!j.contains("sites"))
      throw std::invalid_argument("descriptor: sites map is required");
    const auto& sites = j.at("sites");
    for (int s = 0; s < kNumSites; ++s) {
      if (!sites.contains(kSiteNames[s]))
        throw std::invalid_argument(
            std::string("descriptor: missing site ") + kSiteNames[s]);
      d.site_columns[s] = sites.at(kSiteNames[s]).get<std::vector<int>>();
      if (d.site_columns[s].size() != 11)
        throw std::invalid_argument(std::string("descriptor: site ") +
                                    kSiteNames[s] + " needs 11 columns");
    }
    return d;
  }
};

struct ImportResult {
  std::size_t accepted = 0;
  std::vector<std::string> row_errors;
};

inline ImportResult import_vpd(const std::filesystem::path& input_csv,
                               const ImportDescriptor& descriptor,
                               const std::filesystem::path& out_jsonl,
                               const std::string& cohort_tag = "H") {
  const std::string text = read_file(input_csv);
  std::istringstream in(text);
  std::string line;
  std::vector<PatientRecord> records;
  ImportResult result;
  std::size_t row_index = 0;
  std::uint64_t next_id = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_index;
    std::vector<double> cells;
    std::istringstream cols(line);
    std::string cell;
    bool parse_error = false;
    while (std::getline(cols, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(cell[used])) ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing text");
        cells.push_back(v);
      } catch (...) {
        cells.push_back(0.0);
        parse_error = true;
      }
    }
    auto fetch = [&](int col) {
      if (col < 0 || col >= static_cast<int>(cells.size()))
        throw std::invalid_argument("column index " + std::to_string(col) +
                                    " out of range");
      return cells[col];
    };
    try {
      if (parse_error) throw std::invalid_argument("unparseable cell");
      PatientRecord rec;
      rec.cohort = cohort_tag;
      rec.id = descriptor.id_column >= 0
                   ? static_cast<std::uint64_t>(fetch(descriptor.id_column))
                   : next_id;
      rec.period = fetch(descriptor.period_column);
      for (int s = 0; s < kNumSites; ++s) {
        rec.coefficients[s].reserve(11);
        for (const int col : descriptor.site_columns[s])
          rec.coefficients[s].push_back(fetch(col));
      }
      rec.validate();
      records.push_back(std::move(rec));
      ++result.accepted;
      ++next_id;
    } catch (const std::exception& e) {
      result.row_errors.push_back("row " + std::to_string(row_index) + ": " +
                                  e.what());
    }
  }
  write_cohort_file(out_jsonl, records);
  return result;
}

} // namespace hemoml::cli
