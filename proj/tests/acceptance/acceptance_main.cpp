// Acceptance suite: one pass/fail line per criterion, non-zero exit if any
// criterion fails. Criteria 6 and 7 run the full desk-scale pipeline
// (1,000 subjects per cohort) and dominate the runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hemoml/cli.hpp"
#include "hemoml/evaluation.hpp"
#include "hemoml/population.hpp"
#include "hemoml/records.hpp"
#include "hemoml/report_io.hpp"

using namespace hemoml;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

struct CriterionRun {
  std::vector<std::string> failures;

  void check(bool condition, const std::string& what) {
    if (!condition) failures.push_back(what);
  }
  void check_close(double actual, double expected, double tol,
                   const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
      std::ostringstream ss;
      ss << what << " (actual " << actual << ", expected " << expected
         << " +- " << tol << ")";
      failures.push_back(ss.str());
    }
  }
};

double seconds_since(clk::time_point start) {
  return std::chrono::duration<double>(clk::now() - start).count();
}

double ks_statistic_u01(std::vector<double> quantiles) {
  std::sort(quantiles.begin(), quantiles.end());
  const double n = static_cast<double>(quantiles.size());
  double d = 0.0;
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    d = std::max(d, std::abs((i + 1) / n - quantiles[i]));
    d = std::max(d, std::abs(i / n - quantiles[i]));
  }
  return d;
}

// ---------------------------------------------------------------------------
// shared desk-scale pipeline state (criteria 6, 7)

struct DeskScale {
  std::uint64_t seed = 20240801;
  SurrogateParams params;
  std::vector<WaveformSet> healthy;
  std::vector<std::uint64_t> ids;
  EvaluationReport aaa_report;   // full 63-combo GB sweep
  EvaluationReport aaa_l_report; // full 63-combo GB sweep
  double cas_f1 = 0.0;
  double sas_f1 = 0.0;
  double aaa_f1 = 0.0;
  double build_seconds = 0.0;

  void run(unsigned jobs) {
    const auto start = clk::now();
    const RngStream master(seed);
    {
      auto pop = generate_population(1000, std::nullopt, master, params, jobs);
      for (auto& [rec, waves] : pop) {
        ids.push_back(rec.id);
        healthy.push_back(std::move(waves));
      }
    }
    MethodParams gb{Hyperparams::make(Method::GB)};
    const std::vector<MeasurementCombination> all_six{
        MeasurementCombination::of({Measurement::Q1, Measurement::Q2,
                                    Measurement::Q3, Measurement::P1,
                                    Measurement::P2, Measurement::P3})};
    const auto run_for = [&](DiseaseKind kind, bool full_sweep) {
      auto pop = generate_population(1000, kind, master, params, jobs);
      std::vector<WaveformSet> diseased;
      diseased.reserve(pop.size());
      for (auto& [rec, waves] : pop) diseased.push_back(std::move(waves));
      const SplitPlan plan = build_split_plan(
          kind, ids, ids,
          RngStream(seed).child(
              {rng_tag::kPlan, static_cast<std::uint64_t>(kind)}));
      return run_combination_search(kind, {Method::GB}, plan, healthy,
                                    diseased, gb, seed, jobs,
                                    full_sweep ? nullptr : &all_six);
    };
    cas_f1 = run_for(DiseaseKind::CAS, false).aggregate(0, 0).mean.f1;
    sas_f1 = run_for(DiseaseKind::SAS, false).aggregate(0, 0).mean.f1;
    aaa_report = run_for(DiseaseKind::AAA, true);
    aaa_l_report = run_for(DiseaseKind::AAA_L, true);
    aaa_f1 = aaa_report.aggregate(0, 62).mean.f1; // all-six cell
    build_seconds = seconds_since(start);
  }
};

// ---------------------------------------------------------------------------

void criterion_1_area_profile(CriterionRun& run) {
  const auto start = clk::now();
  RngStream rng(101);
  const DiseaseKind kinds[] = {DiseaseKind::CAS, DiseaseKind::SAS,
                               DiseaseKind::PAD, DiseaseKind::AAA,
                               DiseaseKind::AAA_L};
  for (int i = 0; i < 1000; ++i) {
    const DiseaseSpec spec = sample_disease(kinds[i % 5], rng);
    run.check_close(area_multiplier(spec, spec.start), 1.0, 1e-12, "A(b) = 1");
    run.check_close(area_multiplier(spec, spec.end), 1.0, 1e-12, "A(e) = 1");
    const double mid = 0.5 * (spec.start + spec.end);
    const double expected =
        is_stenosis(spec.kind) ? 1.0 - spec.severity : 1.0 + spec.severity;
    run.check_close(area_multiplier(spec, mid), expected, 1e-12,
                    "extremum = 1 -/+ S at the midpoint");
    const double before = rng.uniform(0.0, spec.start * 0.99);
    const double after = spec.end + rng.uniform(0.0, 1.0 - spec.end);
    run.check(area_multiplier(spec, before) == 1.0, "A = 1 left of b");
    run.check(area_multiplier(spec, std::min(after, 1.0)) == 1.0,
              "A = 1 right of e");
  }
  run.check(seconds_since(start) < 1.0, "runtime < 1 s");
}

void criterion_2_sampler(CriterionRun& run) {
  const auto start = clk::now();
  RngStream rng(202);
  for (const DiseaseKind kind :
       {DiseaseKind::CAS, DiseaseKind::SAS, DiseaseKind::PAD, DiseaseKind::AAA,
        DiseaseKind::AAA_L}) {
    const int n = 100000;
    std::vector<double> q_r, q_b, q_e, q_s;
    q_r.reserve(n);
    q_b.reserve(n);
    q_e.reserve(n);
    q_s.reserve(n);
    const auto bounds = severity_bounds(kind);
    bool bounds_ok = true;
    for (int i = 0; i < n; ++i) {
      const DiseaseSpec s = sample_disease(kind, rng);
      bounds_ok = bounds_ok && 0.2 <= s.reference && s.reference <= 0.8 &&
                  0.1 <= s.start && s.start <= s.reference - 0.05 &&
                  s.reference + 0.05 <= s.end && s.end <= 0.9 &&
                  bounds.lo <= s.severity && s.severity <= bounds.hi;
      q_r.push_back((s.reference - 0.2) / 0.6);
      q_b.push_back((s.start - 0.1) / (s.reference - 0.05 - 0.1));
      q_e.push_back((s.end - s.reference - 0.05) / (0.9 - s.reference - 0.05));
      q_s.push_back((s.severity - bounds.lo) / (bounds.hi - bounds.lo));
    }
    run.check(bounds_ok, std::string("bounds hold for ") + to_string(kind));
    run.check(ks_statistic_u01(q_r) < 0.01,
              std::string("KS(r) < 0.01 for ") + to_string(kind));
    run.check(ks_statistic_u01(q_b) < 0.01,
              std::string("KS(b) < 0.01 for ") + to_string(kind));
    run.check(ks_statistic_u01(q_e) < 0.01,
              std::string("KS(e) < 0.01 for ") + to_string(kind));
    run.check(ks_statistic_u01(q_s) < 0.01,
              std::string("KS(S) < 0.01 for ") + to_string(kind));
  }
  run.check(seconds_since(start) < 5.0, "runtime < 5 s");
}

Dataset random_dataset(std::size_t n, std::size_t dims, std::uint64_t seed,
                       double shift) {
  RngStream rng(seed);
  Dataset d;
  d.x = Matrix(n, dims);
  d.labels.resize(n);
  d.subject_ids.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    d.labels[r] = r % 2 == 0 ? kHealthy : kDiseased;
    d.subject_ids[r] = r;
    for (std::size_t c = 0; c < dims; ++c)
      d.x.at(r, c) = rng.normal() + (d.labels[r] == kDiseased ? shift : 0.0);
  }
  return d;
}

void criterion_3_oracles(CriterionRun& run) {
  // NB log scores against an independent closed-form Bayes computation
  const Dataset data = random_dataset(50, 4, 303, 0.7);
  const NbParams nb_params;
  const TrainedModel model = fit(Hyperparams::make(Method::NB), data, 1);
  const auto& nb = std::get<NbModel>(model.impl);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<double> mean(4, 0.0), var(4, 0.0);
    std::size_t count = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      if (data.labels[r] != cls) continue;
      ++count;
      for (std::size_t f = 0; f < 4; ++f) mean[f] += data.x.at(r, f);
    }
    for (auto& m : mean) m /= count;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      if (data.labels[r] != cls) continue;
      for (std::size_t f = 0; f < 4; ++f) {
        const double dv = data.x.at(r, f) - mean[f];
        var[f] += dv * dv;
      }
    }
    double max_pooled = 0.0;
    for (std::size_t f = 0; f < 4; ++f) {
      double pm = 0.0;
      for (std::size_t r = 0; r < data.rows(); ++r) pm += data.x.at(r, f);
      pm /= data.rows();
      double pv = 0.0;
      for (std::size_t r = 0; r < data.rows(); ++r) {
        const double dv = data.x.at(r, f) - pm;
        pv += dv * dv;
      }
      max_pooled = std::max(max_pooled, pv / data.rows());
    }
    const double floor =
        std::max({nb_params.variance_floor_rel * max_pooled,
                  nb_params.variance_floor_abs, 1e-300});
    for (std::size_t r = 0; r < data.rows(); ++r) {
      double oracle = std::log(static_cast<double>(count) / data.rows());
      for (std::size_t f = 0; f < 4; ++f) {
        const double v = std::max(var[f] / count, floor);
        const double dv = data.x.at(r, f) - mean[f];
        oracle += -0.5 * (std::log(2.0 * M_PI * v) + dv * dv / v);
      }
      const double ours = nb.log_joint(data.x.row(r), cls);
      run.check(std::abs(ours - oracle) <=
                    1e-12 * std::max(1.0, std::abs(oracle)),
                "NB log score matches Bayes oracle to 1e-12");
    }
  }

  // metrics against a per-sample recount on 1,000 simulated predictions
  RngStream rng(304);
  ConfusionCounts counts;
  long tally[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < 1000; ++i) {
    const int truth = rng.coin() ? kDiseased : kHealthy;
    const int predicted = rng.u01() < 0.8 ? truth : 1 - truth;
    counts.add(truth, predicted);
    ++tally[truth][predicted];
  }
  run.check(counts.tp == tally[1][1] && counts.fn == tally[1][0] &&
                counts.fp == tally[0][1] && counts.tn == tally[0][0],
            "confusion counts equal the recount oracle exactly");
  const Metrics metrics = compute_metrics(counts);
  run.check(metrics.sensitivity ==
                static_cast<double>(tally[1][1]) / (tally[1][1] + tally[1][0]),
            "sensitivity from recount");
  run.check(metrics.specificity ==
                static_cast<double>(tally[0][0]) / (tally[0][0] + tally[0][1]),
            "specificity from recount");

  // fit_fourier against a direct DFT oracle
  RngStream srng(305);
  std::vector<double> signal(128);
  for (auto& v : signal) v = srng.uniform(-3, 3);
  const FourierSeries fit_result = fit_fourier(signal, 0.8, 5);
  const long double pi_l = 3.141592653589793238462643383279502884L;
  for (int n = 0; n <= 5; ++n) {
    long double sa = 0.0L, sb = 0.0L;
    for (std::size_t j = 0; j < signal.size(); ++j) {
      const long double angle = 2.0L * pi_l * n * j / signal.size();
      sa += signal[j] * sinl(angle);
      sb += signal[j] * cosl(angle);
    }
    const double scale = n == 0 ? 1.0 : 2.0;
    const double oracle_a = static_cast<double>(scale * sa / signal.size());
    const double oracle_b = static_cast<double>(scale * sb / signal.size());
    const double got_a = n == 0 ? 0.0 : fit_result.a[n - 1];
    const double got_b = n == 0 ? fit_result.b0 : fit_result.b[n - 1];
    run.check(std::abs(got_a - oracle_a) <=
                  1e-9 * std::max(1.0, std::abs(oracle_a)),
              "fit_fourier a_n matches DFT oracle to 1e-9");
    run.check(std::abs(got_b - oracle_b) <=
                  1e-9 * std::max(1.0, std::abs(oracle_b)),
              "fit_fourier b_n matches DFT oracle to 1e-9");
  }
}

void criterion_4_gradients(CriterionRun& run) {
  // LR loss gradient vs central differences
  RngStream rng(404);
  int lr_points = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = random_dataset(12, 4, 400 + trial, 0.5);
    std::vector<double> wb(5), grad(5), scratch(5);
    for (auto& w : wb) w = rng.uniform(-1, 1);
    logistic_loss_and_gradient(wb, d.x, d.labels, 1.0, grad);
    for (std::size_t k = 0; k < wb.size(); ++k) {
      auto plus = wb, minus = wb;
      const double step = 1e-6;
      plus[k] += step;
      minus[k] -= step;
      const double fp =
          logistic_loss_and_gradient(plus, d.x, d.labels, 1.0, scratch);
      const double fm =
          logistic_loss_and_gradient(minus, d.x, d.labels, 1.0, scratch);
      const double fd = (fp - fm) / (2 * step);
      const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1e-8});
      run.check(std::abs(grad[k] - fd) / scale <= 1e-4,
                "LR gradient matches central differences to 1e-4");
    }
    ++lr_points;
  }
  run.check(lr_points >= 20, "at least 20 LR parameter points");

  // MLP backprop vs central differences
  const MlpShape shape{3, 6, 2};
  const Dataset d = random_dataset(10, 3, 441, 0.5);
  int mlp_points = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> params(mlp_parameter_count(shape));
    for (auto& p : params) p = rng.uniform(-0.7, 0.7);
    std::vector<double> grad(params.size()), scratch(params.size());
    mlp_loss_and_gradient(shape, params, d.x, d.labels, grad);
    for (int probe = 0; probe < 8; ++probe) {
      const std::size_t k = rng.uniform_int(params.size());
      const double step = 1e-6;
      auto plus = params, minus = params;
      plus[k] += step;
      minus[k] -= step;
      const double fp =
          mlp_loss_and_gradient(shape, plus, d.x, d.labels, scratch);
      const double fm =
          mlp_loss_and_gradient(shape, minus, d.x, d.labels, scratch);
      const double fd = (fp - fm) / (2 * step);
      const double scale = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
      run.check(std::abs(grad[k] - fd) / scale <= 1e-3,
                "MLP gradient matches central differences to 1e-3");
    }
    ++mlp_points;
  }
  run.check(mlp_points >= 20, "at least 20 MLP parameter points");
}

void criterion_5_nonlinearity(CriterionRun& run) {
  const auto start = clk::now();
  // XOR blobs: linearly inseparable by construction
  RngStream rng(505);
  const std::size_t n = 500;
  Dataset d;
  d.x = Matrix(n, 2);
  d.labels.resize(n);
  d.subject_ids.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double cx = rng.coin() ? 1.0 : -1.0;
    const double cy = rng.coin() ? 1.0 : -1.0;
    d.x.at(r, 0) = cx + 0.5 * rng.normal();
    d.x.at(r, 1) = cy + 0.5 * rng.normal();
    d.labels[r] = (cx * cy > 0) ? kHealthy : kDiseased;
    d.subject_ids[r] = r;
  }

  double gb_sum = 0.0, lr_sum = 0.0;
  for (int fold = 0; fold < 5; ++fold) {
    RngStream fold_rng = RngStream(505).child(
        {rng_tag::kFold, static_cast<std::uint64_t>(fold)});
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = n; k > 1; --k)
      std::swap(order[k - 1], order[fold_rng.uniform_int(k)]);
    const std::size_t n_train = 2 * n / 3;

    auto subset = [&](std::size_t from, std::size_t to) {
      Dataset s;
      s.x = Matrix(to - from, 2);
      s.labels.resize(to - from);
      s.subject_ids.resize(to - from);
      for (std::size_t i = from; i < to; ++i) {
        const std::size_t r = order[i];
        std::copy(d.x.row(r).begin(), d.x.row(r).end(),
                  s.x.row(i - from).begin());
        s.labels[i - from] = d.labels[r];
        s.subject_ids[i - from] = d.subject_ids[r];
      }
      return s;
    };
    const Dataset train = subset(0, n_train);
    const Dataset test = subset(n_train, n);

    const auto f1_of = [&](Method method) {
      const TrainedModel model = fit(Hyperparams::make(method), train, 17);
      ConfusionCounts counts;
      for (std::size_t r = 0; r < test.rows(); ++r)
        counts.add(test.labels[r], predict(model, test.x.row(r)));
      return compute_metrics(counts).f1;
    };
    gb_sum += f1_of(Method::GB);
    lr_sum += f1_of(Method::LR);
  }
  const double gb_mean = gb_sum / 5.0, lr_mean = lr_sum / 5.0;
  std::ostringstream detail;
  detail << "GB mean F1 " << gb_mean << " vs LR mean F1 " << lr_mean;
  run.check(gb_mean - lr_mean >= 0.15,
            "GB beats LR by >= 0.15 (" + detail.str() + ")");
  run.check(seconds_since(start) < 30.0, "runtime < 30 s");
}

void criterion_6_pipeline_trend(CriterionRun& run, const DeskScale& desk) {
  std::ostringstream detail;
  detail << "AAA " << desk.aaa_f1 << ", CAS " << desk.cas_f1 << ", SAS "
         << desk.sas_f1;
  run.check(desk.aaa_f1 >= desk.cas_f1,
            "mean AAA F1 >= mean CAS F1 (" + detail.str() + ")");
  run.check(desk.cas_f1 >= desk.sas_f1 - 0.05,
            "mean CAS F1 >= mean SAS F1 - 0.05 (" + detail.str() + ")");
  run.check(desk.build_seconds < 900.0, "desk-scale pipeline under 15 min");
}

void criterion_7_low_severity(CriterionRun& run, const DeskScale& desk) {
  const auto ratios =
      low_severity_ratio_study(desk.aaa_report, desk.aaa_l_report);
  run.check(ratios.size() == 63, "63 per-combination ratios");
  int within = 0;
  for (const double r : ratios)
    if (r <= 1.02) ++within;
  std::ostringstream detail;
  detail << within << "/63 ratios <= 1.02";
  run.check(within * 10 >= 63 * 9,
            "AAA_L/AAA F1 ratio <= 1.02 for >= 90% of cells (" + detail.str() +
                ")");
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("hemoml_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

RunConfig tiny_config(const fs::path& out, std::uint64_t seed) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.seed_set = true;
  cfg.out_dir = out.string();
  cfg.jobs = 0;
  cfg.healthy_count = 24;
  cfg.per_disease_count = 24;
  cfg.aaa_low_count = 24;
  cfg.diseases = {DiseaseKind::AAA};
  cfg.surrogate.nodes_per_segment = 8;
  cfg.learner_defaults.rf.n_trees = 20;
  cfg.learner_defaults.gb.n_trees = 20;
  cfg.learner_defaults.mlp.epochs = 50;
  return cfg;
}

void criterion_8_structure(CriterionRun& run) {
  const auto combos = enumerate_combinations();
  run.check(combos.size() == 63, "63 combinations enumerated");
  std::set<std::string> labels;
  for (const auto& c : combos) labels.insert(appendix_label(c));
  run.check(labels.size() == 63, "combinations are distinct");
  const auto hist = combination_cardinality_histogram(combos);
  run.check(hist == std::array<int, 6>{6, 15, 20, 15, 6, 1},
            "cardinality histogram is [6,15,20,15,6,1]");
  int with_q1 = 0;
  for (const auto& c : combos)
    if (c.contains(Measurement::Q1)) ++with_q1;
  run.check(with_q1 == 32 && 63 - with_q1 == 31, "Q1 partition is 32/31");

  // appendix-style CSV from a real (tiny) sweep over all six methods
  ScratchDir dir("structure");
  RunConfig cfg = tiny_config(dir.path, 90);
  std::ostringstream sink;
  cli::run_generate(cfg, sink);
  cli::SweepOptions options;
  const int rc = cli::run_sweep(cfg, options, sink);
  run.check(rc == cli::kExitOk, "tiny sweep completed without flagged cells");
  const std::string csv = read_file(dir.path / "sweep_aaa_f1.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  run.check(line == "combination,NB,LR,SVM,MLP,RF,GB",
            "CSV header carries the six method columns");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  run.check(rows == 63, "CSV has 63 combination rows");

  // Table-13-style unilateral study
  const auto healthy = read_cohort_file(cfg.cohort_path("H"));
  const auto diseased = read_cohort_file(cfg.cohort_path("AAA"));
  const SplitPlan plan =
      cli::plan_for(cfg, DiseaseKind::AAA, healthy, diseased);
  const auto rows_uni = unilateral_study(
      plan, cohort_waveforms(healthy), cohort_waveforms(diseased),
      MethodParams{cfg.learner_defaults}, cfg.seed, 0);
  run.check(rows_uni.size() == 6, "unilateral table has 6 rows");
}

void criterion_9_importance(CriterionRun& run) {
  // single informative feature among noise
  RngStream rng(909);
  const std::size_t n = 200, dims = 8;
  Dataset d;
  d.x = Matrix(n, dims);
  d.labels.resize(n);
  d.subject_ids.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    d.subject_ids[r] = r;
    for (std::size_t c = 0; c < dims; ++c) d.x.at(r, c) = rng.normal();
    d.labels[r] = d.x.at(r, 0) > 0.0 ? kDiseased : kHealthy;
  }
  Hyperparams hp = Hyperparams::make(Method::GB);
  hp.gb.n_trees = 50;
  hp.gb.max_depth = 3;
  const TrainedModel model = fit(hp, d, 2);
  const auto importance =
      split_improvement_importance(std::get<GbModel>(model.impl));
  double total = 0.0;
  bool non_negative = true;
  for (const double v : importance) {
    total += v;
    non_negative = non_negative && v >= 0.0;
  }
  run.check(non_negative, "importances are non-negative");
  run.check(std::abs(total - 1.0) <= 1e-9, "importances sum to 1 +- 1e-9");
  run.check(importance[0] >= 0.99,
            "informative feature receives >= 0.99 importance");

  // per-measurement aggregation is a partition of unity (132-dim layout)
  RngStream rng2(910);
  std::vector<double> synth(132);
  double s = 0.0;
  for (auto& v : synth) {
    v = rng2.uniform(0, 1);
    s += v;
  }
  for (auto& v : synth) v /= s;
  const auto combo = MeasurementCombination::of(
      {Measurement::Q1, Measurement::Q2, Measurement::Q3, Measurement::P1,
       Measurement::P2, Measurement::P3});
  const auto agg = aggregate_importance_by_measurement(synth, combo);
  double agg_total = 0.0;
  for (const double v : agg) agg_total += v;
  run.check(agg.size() == 6, "aggregation yields one share per measurement");
  run.check(std::abs(agg_total - 1.0) <= 1e-9,
            "per-measurement shares sum to 1 +- 1e-9");
}

void criterion_10_determinism(CriterionRun& run) {
  ScratchDir dir_a("det_a"), dir_b("det_b");
  RunConfig cfg_a = tiny_config(dir_a.path, 777);
  RunConfig cfg_b = tiny_config(dir_b.path, 777);
  cfg_a.healthy_count = cfg_a.per_disease_count = 12;
  cfg_b.healthy_count = cfg_b.per_disease_count = 12;
  std::ostringstream sink;
  cli::run_generate(cfg_a, sink);
  cli::run_generate(cfg_b, sink);
  for (const std::string tag : {"h", "aaa"}) {
    const std::string a = read_file(dir_a.path / ("vpd_" + tag + ".jsonl"));
    const std::string b = read_file(dir_b.path / ("vpd_" + tag + ".jsonl"));
    run.check(!a.empty() && a == b,
              "cohort files byte-identical under the same master seed (" +
                  tag + ")");
  }

  cli::SweepOptions options;
  options.methods = {Method::GB};
  run.check(cli::run_sweep(cfg_a, options, sink) == cli::kExitOk,
            "sweep A completes");
  run.check(cli::run_sweep(cfg_b, options, sink) == cli::kExitOk,
            "sweep B completes");
  const std::string report_a = read_file(dir_a.path / "sweep_aaa_report.json");
  const std::string report_b = read_file(dir_b.path / "sweep_aaa_report.json");
  run.check(!report_a.empty() && report_a == report_b,
            "sweep reports byte-identical under the same master seed");

  // exhaustive leakage audit over all folds of several plans
  for (const std::uint64_t plan_seed : {1ull, 2ull, 3ull, 4ull}) {
    std::vector<std::uint64_t> ids(30);
    std::iota(ids.begin(), ids.end(), plan_seed * 1000);
    const SplitPlan plan =
        build_split_plan(DiseaseKind::PAD, ids, ids, RngStream(plan_seed));
    for (const auto& fold : plan.folds) {
      std::set<std::uint64_t> train(fold.train_ids.begin(),
                                    fold.train_ids.end());
      bool leak = false;
      for (const std::uint64_t id : fold.test_ids)
        if (train.count(id)) leak = true;
      run.check(!leak, "no subject id appears in both train and test");
      run.check(train.size() + fold.test_ids.size() == ids.size(),
                "fold partitions cover the combined set");
    }
  }
}

} // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<void(CriterionRun&)> fn;
  };

  DeskScale desk;
  const unsigned jobs = resolve_jobs(0);

  const std::vector<Entry> entries = {
      {1, "area-profile exactness over 1,000 random disease specs",
       [](CriterionRun& r) { criterion_1_area_profile(r); }},
      {2, "sampler bounds and KS over 100,000 draws per kind",
       [](CriterionRun& r) { criterion_2_sampler(r); }},
      {3, "oracle equivalence (NB Bayes, metric recount, DFT)",
       [](CriterionRun& r) { criterion_3_oracles(r); }},
      {4, "gradient checks (LR 1e-4, MLP 1e-3)",
       [](CriterionRun& r) { criterion_4_gradients(r); }},
      {5, "nonlinearity trend: GB over LR by >= 0.15",
       [](CriterionRun& r) { criterion_5_nonlinearity(r); }},
      {6, "desk-scale pipeline trend (AAA >= CAS >= SAS - 0.05)",
       [&](CriterionRun& r) {
         desk.run(jobs);
         criterion_6_pipeline_trend(r, desk);
       }},
      {7, "low-severity degradation (AAA_L/AAA ratios)",
       [&](CriterionRun& r) { criterion_7_low_severity(r, desk); }},
      {8, "structural counts (63 combos, CSV shape, unilateral rows)",
       [](CriterionRun& r) { criterion_8_structure(r); }},
      {9, "split-improvement importance algebra",
       [](CriterionRun& r) { criterion_9_importance(r); }},
      {10, "determinism and leakage",
       [](CriterionRun& r) { criterion_10_determinism(r); }},
  };

  int failed = 0;
  for (const auto& entry : entries) {
    CriterionRun run;
    const auto start = clk::now();
    try {
      entry.fn(run);
    } catch (const std::exception& e) {
      run.failures.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (run.failures.empty()) {
      std::printf("[%2d] PASS  %s (%.1f s)\n", entry.id, entry.label, elapsed);
    } else {
      ++failed;
      std::printf("[%2d] FAIL  %s (%.1f s)\n", entry.id, entry.label, elapsed);
      std::size_t shown = 0;
      for (const auto& f : run.failures) {
        if (shown++ >= 5) {
          std::printf("        ... and %zu more\n",
                      run.failures.size() - shown + 1);
          break;
        }
        std::printf("        - %s\n", f.c_str());
      }
    }
    std::fflush(stdout);
  }

  if (failed == 0) {
    std::printf("RESULT: all 10 criteria passed\n");
    return 0;
  }
  std::printf("RESULT: %d criterion(s) failed\n", failed);
  return 1;
}
