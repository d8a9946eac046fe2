#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "hemoml/evaluation.hpp"
#include "hemoml/rng.hpp"

using namespace hemoml;

namespace {

// separable synthetic waveforms: diseased subjects get a coefficient shift
WaveformSet synthetic_waves(std::uint64_t id, bool diseased, double shift,
                            std::uint64_t seed) {
  RngStream rng(RngStream(seed).child({id}).key());
  WaveformSet waves;
  waves.patient_id = id;
  for (int k = 0; k < kNumSites; ++k) {
    FourierSeries fs;
    fs.period = 1.0;
    fs.b0 = rng.normal() + (diseased ? shift : 0.0);
    fs.a.resize(5);
    fs.b.resize(5);
    for (int n = 0; n < 5; ++n) {
      fs.a[n] = rng.normal() + (diseased ? shift * 0.5 : 0.0);
      fs.b[n] = rng.normal();
    }
    waves.series[k] = fs;
  }
  return waves;
}

struct TinyCohorts {
  std::vector<WaveformSet> healthy;
  std::vector<WaveformSet> diseased;
  std::vector<std::uint64_t> ids;
};

TinyCohorts make_cohorts(std::size_t n, double shift, std::uint64_t seed) {
  TinyCohorts out;
  for (std::uint64_t i = 0; i < n; ++i) {
    out.healthy.push_back(synthetic_waves(i, false, shift, seed));
    out.diseased.push_back(synthetic_waves(i, true, shift, seed + 1));
    out.ids.push_back(i);
  }
  return out;
}

EvaluationReport rigged_report(const std::vector<Method>& methods,
                               const std::function<double(std::size_t, std::size_t)>& f1_of) {
  EvaluationReport report;
  report.disease = DiseaseKind::CAS;
  report.methods = methods;
  report.combinations = enumerate_combinations();
  report.cells.assign(methods.size() * report.combinations.size() * kNumFolds, {});
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t c = 0; c < report.combinations.size(); ++c)
      for (int f = 0; f < kNumFolds; ++f) {
        CellResult& cell = report.cell(m, c, f);
        cell.counts = ConfusionCounts{1, 0, 0, 1};
        cell.metrics = compute_metrics(cell.counts);
        cell.metrics.f1 = f1_of(m, c);
        cell.metrics.sensitivity = cell.metrics.f1;
        cell.metrics.specificity = cell.metrics.f1;
      }
  return report;
}

} // namespace

TEST_CASE("metric identities on symmetric, perfect and degenerate counts") {
  const Metrics symmetric = compute_metrics(ConfusionCounts{2, 1, 1, 2});
  CHECK(symmetric.sensitivity == doctest::Approx(2.0 / 3.0));
  CHECK(symmetric.specificity == doctest::Approx(2.0 / 3.0));
  CHECK(symmetric.precision == doctest::Approx(2.0 / 3.0));
  CHECK(symmetric.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(symmetric.recall == symmetric.sensitivity);
  CHECK(!symmetric.degenerate);

  const Metrics perfect = compute_metrics(ConfusionCounts{100, 0, 0, 100});
  CHECK(perfect.sensitivity == 1.0);
  CHECK(perfect.specificity == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.f1 == 1.0);

  // no positive predictions: precision undefined -> flagged zero
  const Metrics degen = compute_metrics(ConfusionCounts{0, 5, 0, 5});
  CHECK(degen.degenerate);
  CHECK(degen.precision == 0.0);
  CHECK(degen.f1 == 0.0);

  CHECK_THROWS_AS(compute_metrics(ConfusionCounts{}), std::invalid_argument);
}

TEST_CASE("metrics match a per-sample recount oracle on 1000 predictions") {
  RngStream rng(42);
  ConfusionCounts counts;
  long tp = 0, fn = 0, fp = 0, tn = 0; // independent tally
  for (int i = 0; i < 1000; ++i) {
    const int truth = rng.coin() ? kDiseased : kHealthy;
    const int predicted = rng.u01() < 0.73 ? truth : 1 - truth;
    counts.add(truth, predicted);
    if (truth == kDiseased && predicted == kDiseased) ++tp;
    if (truth == kDiseased && predicted == kHealthy) ++fn;
    if (truth == kHealthy && predicted == kDiseased) ++fp;
    if (truth == kHealthy && predicted == kHealthy) ++tn;
  }
  CHECK(counts.tp == tp);
  CHECK(counts.fn == fn);
  CHECK(counts.fp == fp);
  CHECK(counts.tn == tn);
  CHECK(counts.total() == 1000);
  const Metrics m = compute_metrics(counts);
  CHECK(m.sensitivity == static_cast<double>(tp) / (tp + fn));
  CHECK(m.specificity == static_cast<double>(tn) / (tn + fp));
  CHECK(m.precision == static_cast<double>(tp) / (tp + fp));
  const double f1_oracle = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  CHECK(m.f1 == f1_oracle);
  CHECK(m.f1 >= std::min(m.precision, m.recall));
  CHECK(m.f1 <= std::max(m.precision, m.recall));
}

TEST_CASE("F1 equals 1 exactly when FP and FN are both zero") {
  for (long tp : {1L, 3L, 10L})
    for (long fn : {0L, 1L, 4L})
      for (long fp : {0L, 2L})
        for (long tn : {0L, 5L}) {
          if (tp + fn + fp + tn == 0) continue;
          const Metrics m = compute_metrics(ConfusionCounts{tp, fn, fp, tn});
          CHECK((m.f1 == 1.0) == (fp == 0 && fn == 0));
        }
}

TEST_CASE("split plan: 8 twin-paired subjects give 4+4, train 6 / test 2") {
  std::vector<std::uint64_t> ids{0, 1, 2, 3, 4, 5, 6, 7};
  const SplitPlan plan =
      build_split_plan(DiseaseKind::AAA, ids, ids, RngStream(9));
  CHECK(plan.healthy_ml_ids.size() == 4);
  CHECK(plan.diseased_ml_ids.size() == 4);
  std::set<std::uint64_t> h(plan.healthy_ml_ids.begin(), plan.healthy_ml_ids.end());
  for (const std::uint64_t id : plan.diseased_ml_ids) CHECK(h.count(id) == 0);
  for (const auto& fold : plan.folds) {
    CHECK(fold.train_ids.size() == 6);
    CHECK(fold.test_ids.size() == 2);
    std::set<std::uint64_t> train(fold.train_ids.begin(), fold.train_ids.end());
    for (const std::uint64_t id : fold.test_ids) CHECK(train.count(id) == 0);
  }
  CHECK_NOTHROW(plan.validate());
}

TEST_CASE("split plan handles odd populations with a floor/ceil half split") {
  std::vector<std::uint64_t> ids{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const SplitPlan plan =
      build_split_plan(DiseaseKind::CAS, ids, ids, RngStream(2));
  CHECK(plan.healthy_ml_ids.size() == 5);
  CHECK(plan.diseased_ml_ids.size() == 4);
  CHECK_NOTHROW(plan.validate());
}

TEST_CASE("split plan rejects unpaired populations") {
  std::vector<std::uint64_t> a{0, 1, 2, 3};
  std::vector<std::uint64_t> b{0, 1, 2, 9};
  CHECK_THROWS_AS(build_split_plan(DiseaseKind::CAS, a, b, RngStream(1)),
                  std::invalid_argument);
  std::vector<std::uint64_t> shorter{0, 1, 2};
  CHECK_THROWS_AS(build_split_plan(DiseaseKind::CAS, a, shorter, RngStream(1)),
                  std::invalid_argument);
}

TEST_CASE("no subject id leaks between any train/test partition") {
  std::vector<std::uint64_t> ids(40);
  std::iota(ids.begin(), ids.end(), 100);
  const SplitPlan plan =
      build_split_plan(DiseaseKind::PAD, ids, ids, RngStream(31));
  for (const auto& fold : plan.folds) {
    std::set<std::uint64_t> train(fold.train_ids.begin(), fold.train_ids.end());
    std::set<std::uint64_t> test(fold.test_ids.begin(), fold.test_ids.end());
    CHECK(train.size() + test.size() == 40);
    for (const std::uint64_t id : test) CHECK(train.count(id) == 0);
  }
}

TEST_CASE("combination enumeration: 63 distinct subsets in appendix order") {
  const auto combos = enumerate_combinations();
  REQUIRE(combos.size() == 63);
  std::set<std::string> labels;
  for (const auto& c : combos) {
    CHECK(!c.included.empty());
    labels.insert(appendix_label(c));
  }
  CHECK(labels.size() == 63);

  const auto hist = combination_cardinality_histogram(combos);
  CHECK(hist == std::array<int, 6>{6, 15, 20, 15, 6, 1});

  CHECK(appendix_label(combos[0]) == "Q3");
  CHECK(appendix_label(combos[1]) == "Q2");
  CHECK(appendix_label(combos[2]) == "Q1");
  CHECK(appendix_label(combos[3]) == "P3");
  CHECK(appendix_label(combos[4]) == "P2");
  CHECK(appendix_label(combos[5]) == "P1");
  CHECK(appendix_label(combos[6]) == "Q3+Q2");
  CHECK(appendix_label(combos[62]) == "Q3+Q2+Q1+P3+P2+P1");

  int with_q1 = 0;
  for (const auto& c : combos)
    if (c.contains(Measurement::Q1)) ++with_q1;
  CHECK(with_q1 == 32);
  CHECK(63 - with_q1 == 31);
}

TEST_CASE("single-method single-combination run yields 5 fold cells") {
  const TinyCohorts cohorts = make_cohorts(12, 3.0, 7);
  const SplitPlan plan = build_split_plan(DiseaseKind::AAA, cohorts.ids,
                                          cohorts.ids, RngStream(5));
  const std::vector<MeasurementCombination> combos{
      MeasurementCombination::of({Measurement::Q1})};
  MethodParams params{Hyperparams::make(Method::NB)};
  const EvaluationReport report = run_combination_search(
      DiseaseKind::AAA, {Method::NB}, plan, cohorts.healthy, cohorts.diseased,
      params, 11, 1, &combos);
  CHECK(report.cells.size() == 5);
  CHECK(!report.has_failures());
  const auto agg = report.aggregate(0, 0);
  CHECK(agg.mean.f1 >= 0.0);
  CHECK(agg.mean.f1 <= 1.0);
}

TEST_CASE("two methods over all 63 combinations give 126 aggregates") {
  const TinyCohorts cohorts = make_cohorts(9, 3.0, 3);
  const SplitPlan plan = build_split_plan(DiseaseKind::CAS, cohorts.ids,
                                          cohorts.ids, RngStream(4));
  Hyperparams base = Hyperparams::make(Method::NB);
  base.gb.n_trees = 5;
  base.gb.max_depth = 2;
  MethodParams params{base};
  const EvaluationReport report = run_combination_search(
      DiseaseKind::CAS, {Method::NB, Method::GB}, plan, cohorts.healthy,
      cohorts.diseased, params, 13, 2);
  CHECK(report.cells.size() == 2 * 63 * 5);
  std::size_t aggregates = 0;
  for (std::size_t m = 0; m < report.methods.size(); ++m)
    for (std::size_t c = 0; c < report.combinations.size(); ++c) {
      report.aggregate(m, c);
      ++aggregates;
    }
  CHECK(aggregates == 126);

  // strongly separated synthetic classes: the sweep should detect them
  const auto agg = report.aggregate(1, 62); // GB on all six
  CHECK(agg.mean.f1 > 0.8);
}

TEST_CASE("per-cell failures are flagged without aborting the sweep") {
  const TinyCohorts cohorts = make_cohorts(8, 1.0, 21);
  // plan that references ids the cohorts do not carry
  std::vector<std::uint64_t> bogus_ids{100, 101, 102, 103, 104, 105, 106, 107};
  const SplitPlan plan = build_split_plan(DiseaseKind::SAS, bogus_ids,
                                          bogus_ids, RngStream(2));
  const std::vector<MeasurementCombination> combos{
      MeasurementCombination::of({Measurement::P1})};
  MethodParams params{Hyperparams::make(Method::NB)};
  const EvaluationReport report = run_combination_search(
      DiseaseKind::SAS, {Method::NB}, plan, cohorts.healthy, cohorts.diseased,
      params, 1, 1, &combos);
  CHECK(report.has_failures());
  for (const auto& cell : report.cells) {
    CHECK(cell.failed);
    CHECK(!cell.error.empty());
  }
}

TEST_CASE("identical master seeds give identical reports") {
  const TinyCohorts cohorts = make_cohorts(10, 2.0, 17);
  const SplitPlan plan = build_split_plan(DiseaseKind::AAA, cohorts.ids,
                                          cohorts.ids, RngStream(6));
  const std::vector<MeasurementCombination> combos{
      MeasurementCombination::of({Measurement::Q1}),
      MeasurementCombination::of({Measurement::P3})};
  Hyperparams base = Hyperparams::make(Method::RF);
  base.rf.n_trees = 11;
  base.rf.max_depth = 4;
  MethodParams params{base};
  const auto run = [&](unsigned jobs) {
    return run_combination_search(DiseaseKind::AAA, {Method::RF, Method::MLP},
                                  plan, cohorts.healthy, cohorts.diseased,
                                  params, 99, jobs, &combos);
  };
  const EvaluationReport a = run(1);
  const EvaluationReport b = run(4);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].metrics.f1 == b.cells[i].metrics.f1);
    CHECK(a.cells[i].counts.tp == b.cells[i].counts.tp);
    CHECK(a.cells[i].counts.tn == b.cells[i].counts.tn);
  }
}

TEST_CASE("measurement-count summary groups by cardinality") {
  const auto combos = enumerate_combinations();
  // rig combo 45 (a 4-measurement cell) to stand out
  const EvaluationReport report = rigged_report(
      {Method::GB}, [](std::size_t, std::size_t c) {
        return c == 45 ? 0.99 : 0.5 + 0.001 * static_cast<double>(c);
      });
  const auto rows = measurement_count_summary(report);
  REQUIRE(rows.size() == 6);
  const std::array<int, 6> group_sizes{6, 15, 20, 15, 6, 1};
  for (int k = 1; k <= 6; ++k) {
    const auto& row = rows[k - 1];
    CHECK(row.n_measurements == k);
    int members = 0;
    for (const auto& c : combos)
      if (static_cast<int>(c.included.size()) == k) ++members;
    CHECK(members == group_sizes[k - 1]);
    CHECK(row.max_f1 >= row.mean_f1);
    CHECK(row.mean_f1 >= row.min_f1);
  }
  // combo 45 has 4 measurements: argmax of the k=4 group
  CHECK(combos[45].included.size() == 4);
  CHECK(rows[3].argmax_combo == 45);
  CHECK(rows[3].max_f1 == doctest::Approx(0.99));
  // the k=6 group is the single all-measurement cell
  CHECK(rows[5].argmax_combo == 62);
  CHECK(rows[5].max_f1 == doctest::Approx(rows[5].min_f1));
}

TEST_CASE("Q1 histograms split 32/31 and shift with a rigged bonus") {
  const auto combos = enumerate_combinations();
  const EvaluationReport report =
      rigged_report({Method::GB, Method::RF}, [&](std::size_t, std::size_t c) {
        return combos[c].contains(Measurement::Q1) ? 0.7 : 0.5;
      });
  const auto hists = q1_inclusion_histograms(report, {Method::GB});
  REQUIRE(hists.size() == 1);
  int n_inc = 0, n_exc = 0;
  for (int v : hists[0].include_q1) n_inc += v;
  for (int v : hists[0].exclude_q1) n_exc += v;
  CHECK(n_inc == 32);
  CHECK(n_exc == 31);
  CHECK(hists[0].include_mean - hists[0].exclude_mean ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("ratio study: identity, uniform scaling and coverage mismatch") {
  const EvaluationReport high =
      rigged_report({Method::GB}, [](std::size_t, std::size_t c) {
        return 0.6 + 0.005 * static_cast<double>(c % 20);
      });
  EvaluationReport low = high;
  const auto ones = low_severity_ratio_study(high, high);
  for (double r : ones) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));

  for (auto& cell : low.cells) cell.metrics.f1 *= 0.95;
  const auto scaled = low_severity_ratio_study(high, low);
  for (double r : scaled) CHECK(r == doctest::Approx(0.95).epsilon(1e-12));

  EvaluationReport truncated = high;
  truncated.combinations.pop_back();
  CHECK_THROWS_AS(low_severity_ratio_study(high, truncated),
                  std::invalid_argument);
}

TEST_CASE("unilateral study: 6 rows; bilateral rows match the main sweep") {
  const TinyCohorts cohorts = make_cohorts(12, 2.5, 23);
  const SplitPlan plan = build_split_plan(DiseaseKind::AAA, cohorts.ids,
                                          cohorts.ids, RngStream(8));
  Hyperparams base = Hyperparams::make(Method::GB);
  base.gb.n_trees = 8;
  base.gb.max_depth = 2;
  MethodParams params{base};

  const auto rows = unilateral_study(plan, cohorts.healthy, cohorts.diseased,
                                     params, 55, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].measurement == Measurement::Q1);
  CHECK(rows[0].side == Laterality::RightOnly);
  CHECK(rows[2].side == Laterality::Bilateral);
  CHECK(rows[3].measurement == Measurement::P3);

  const EvaluationReport sweep = run_combination_search(
      DiseaseKind::AAA, {Method::GB}, plan, cohorts.healthy, cohorts.diseased,
      params, 55, 2);
  const auto combos = enumerate_combinations();
  std::size_t q1_index = 0, p3_index = 0;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    if (appendix_label(combos[c]) == "Q1") q1_index = c;
    if (appendix_label(combos[c]) == "P3") p3_index = c;
  }
  const auto q1_agg = sweep.aggregate(0, q1_index);
  CHECK(rows[2].metrics.sensitivity ==
        doctest::Approx(q1_agg.mean.sensitivity).epsilon(1e-12));
  CHECK(rows[2].metrics.specificity ==
        doctest::Approx(q1_agg.mean.specificity).epsilon(1e-12));
  const auto p3_agg = sweep.aggregate(0, p3_index);
  CHECK(rows[5].metrics.sensitivity ==
        doctest::Approx(p3_agg.mean.sensitivity).epsilon(1e-12));
}
