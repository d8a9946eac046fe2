#pragma once

// Evaluation harness: Step 1-3 dataset construction, the five-fold
// protocol, metrics, the 63-combination search and the follow-up studies.
//
// Folds re-sample train/test from the same combined set with independent
// fold streams; standardisation is re-fitted per fold on training rows only.
// Per-cell seeds derive from (master seed, disease, method, combination,
// fold), so the sweep is a parallel map whose output is independent of
// scheduling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hemoml/disease.hpp"
#include "hemoml/features.hpp"
#include "hemoml/learners/model.hpp"
#include "hemoml/rng.hpp"
#include "hemoml/util.hpp"

namespace hemoml {

struct ConfusionCounts {
  long tp = 0;
  long fn = 0;
  long fp = 0;
  long tn = 0;

  long total() const { return tp + fn + fp + tn; }

  void add(int truth, int predicted) {
    if (truth == kDiseased)
      (predicted == kDiseased ? tp : fn) += 1;
    else
      (predicted == kDiseased ? fp : tn) += 1;
  }
};

/// Positive class = diseased. Ratios with zero denominators yield 0 and set
/// the degenerate flag so sweeps stay total and auditable.
struct Metrics {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;
};

inline Metrics compute_metrics(const ConfusionCounts& counts) {
  if (counts.total() <= 0)
    throw std::invalid_argument("compute_metrics: empty counts");
  Metrics m;
  auto ratio = [&m](long num, long den) {
    if (den == 0) {
      m.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.sensitivity = ratio(counts.tp, counts.tp + counts.fn);
  m.specificity = ratio(counts.tn, counts.tn + counts.fp);
  m.precision = ratio(counts.tp, counts.tp + counts.fp);
  m.recall = m.sensitivity;
  const double pr = m.precision + m.recall;
  if (pr > 0.0)
    m.f1 = 2.0 * m.precision * m.recall / pr;
  else {
    m.f1 = 0.0;
    m.degenerate = true;
  }
  return m;
}

inline constexpr int kNumFolds = 5;

/// Step 1-3 plan: which subjects serve as healthy, which as their diseased
/// twins, and the per-fold train/test resampling of the combined set.
struct SplitPlan {
  DiseaseKind disease = DiseaseKind::CAS;
  std::vector<std::uint64_t> healthy_ml_ids;
  std::vector<std::uint64_t> diseased_ml_ids;
  struct Fold {
    std::vector<std::uint64_t> train_ids;
    std::vector<std::uint64_t> test_ids;
  };
  std::array<Fold, kNumFolds> folds;

  bool serves_as_healthy(std::uint64_t id) const {
    return std::binary_search(healthy_sorted_.begin(), healthy_sorted_.end(), id);
  }

  void finalize() {
    healthy_sorted_ = healthy_ml_ids;
    std::sort(healthy_sorted_.begin(), healthy_sorted_.end());
  }

  void validate() const {
    std::set<std::uint64_t> h(healthy_ml_ids.begin(), healthy_ml_ids.end());
    std::set<std::uint64_t> d(diseased_ml_ids.begin(), diseased_ml_ids.end());
    if (h.size() != healthy_ml_ids.size() || d.size() != diseased_ml_ids.size())
      throw std::invalid_argument("SplitPlan: duplicate ids within a half");
    for (std::uint64_t id : d)
      if (h.count(id))
        throw std::invalid_argument("SplitPlan: subject serves in both halves");
    const std::size_t n = h.size() + d.size();
    if (h.size() + 1 < d.size() || d.size() + 1 < h.size())
      throw std::invalid_argument("SplitPlan: combined set not class-balanced");
    for (const Fold& fold : folds) {
      std::set<std::uint64_t> train(fold.train_ids.begin(), fold.train_ids.end());
      std::set<std::uint64_t> test(fold.test_ids.begin(), fold.test_ids.end());
      if (train.size() != fold.train_ids.size() ||
          test.size() != fold.test_ids.size())
        throw std::invalid_argument("SplitPlan: duplicate ids within a fold");
      if (train.size() + test.size() != n)
        throw std::invalid_argument("SplitPlan: fold does not cover the set");
      for (std::uint64_t id : test)
        if (train.count(id))
          throw std::invalid_argument("SplitPlan: id leaks between train and test");
    }
  }

private:
  std::vector<std::uint64_t> healthy_sorted_;
};

/// Step 1: a random half of the twin-paired subjects serve as healthy, the
/// complement as diseased. Step 3 per fold: a stratified random 2/3 : 1/3
/// train/test resampling of the combined set (per-class train count is
/// round(2n/3); odd populations split floor/ceil across the halves).
inline SplitPlan build_split_plan(DiseaseKind disease,
                                  std::span<const std::uint64_t> healthy_ids,
                                  std::span<const std::uint64_t> diseased_twin_ids,
                                  const RngStream& rng) {
  if (healthy_ids.size() != diseased_twin_ids.size())
    throw std::invalid_argument("build_split_plan: populations not twin-paired");
  std::vector<std::uint64_t> sorted_h(healthy_ids.begin(), healthy_ids.end());
  std::vector<std::uint64_t> sorted_d(diseased_twin_ids.begin(),
                                      diseased_twin_ids.end());
  std::sort(sorted_h.begin(), sorted_h.end());
  std::sort(sorted_d.begin(), sorted_d.end());
  if (sorted_h != sorted_d)
    throw std::invalid_argument("build_split_plan: twin id sets differ");
  if (sorted_h.size() < 2)
    throw std::invalid_argument("build_split_plan: need at least 2 subjects");

  auto shuffle = [](std::vector<std::uint64_t>& v, RngStream& stream) {
    for (std::size_t k = v.size(); k > 1; --k)
      std::swap(v[k - 1], v[stream.uniform_int(k)]);
  };

  SplitPlan plan;
  plan.disease = disease;
  std::vector<std::uint64_t> ids = sorted_h;
  RngStream step1 = rng.child({rng_tag::kPlan, 0});
  shuffle(ids, step1);
  const std::size_t n = ids.size();
  const std::size_t n_healthy = (n + 1) / 2;
  plan.healthy_ml_ids.assign(ids.begin(), ids.begin() + n_healthy);
  plan.diseased_ml_ids.assign(ids.begin() + n_healthy, ids.end());

  for (int f = 0; f < kNumFolds; ++f) {
    RngStream fold_stream =
        rng.child({rng_tag::kFold, static_cast<std::uint64_t>(f)});
    auto split_class = [&](const std::vector<std::uint64_t>& members,
                           SplitPlan::Fold& fold) {
      std::vector<std::uint64_t> pool = members;
      shuffle(pool, fold_stream);
      const std::size_t n_train = static_cast<std::size_t>(
          std::llround(2.0 * static_cast<double>(pool.size()) / 3.0));
      fold.train_ids.insert(fold.train_ids.end(), pool.begin(),
                            pool.begin() + n_train);
      fold.test_ids.insert(fold.test_ids.end(), pool.begin() + n_train,
                           pool.end());
    };
    split_class(plan.healthy_ml_ids, plan.folds[f]);
    split_class(plan.diseased_ml_ids, plan.folds[f]);
  }
  plan.finalize();
  plan.validate();
  return plan;
}

/// All 63 non-empty combinations in the appendix row order: grouped by
/// cardinality, lexicographic over the base order Q3, Q2, Q1, P3, P2, P1.
inline std::vector<MeasurementCombination> enumerate_combinations() {
  static constexpr Measurement kBase[6] = {Measurement::Q3, Measurement::Q2,
                                           Measurement::Q1, Measurement::P3,
                                           Measurement::P2, Measurement::P1};
  std::vector<MeasurementCombination> combos;
  combos.reserve(63);
  for (int k = 1; k <= 6; ++k) {
    std::vector<int> pick(k);
    // lexicographically enumerate k-subsets of {0..5}
    for (int i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
      std::vector<Measurement> ms;
      ms.reserve(k);
      for (int i : pick) ms.push_back(kBase[i]);
      combos.push_back(MeasurementCombination::of(std::move(ms)));
      int i = k - 1;
      while (i >= 0 && pick[i] == 6 - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return combos;
}

/// Combination label rendered in the appendix display order (Q3 first).
inline std::string appendix_label(const MeasurementCombination& combo) {
  static constexpr Measurement kBase[6] = {Measurement::Q3, Measurement::Q2,
                                           Measurement::Q1, Measurement::P3,
                                           Measurement::P2, Measurement::P1};
  std::string out;
  for (const Measurement m : kBase) {
    if (!combo.contains(m)) continue;
    if (!out.empty()) out += "+";
    out += to_string(m);
  }
  if (combo.side == Laterality::RightOnly) out += " (R)";
  if (combo.side == Laterality::LeftOnly) out += " (L)";
  return out;
}

struct CellResult {
  ConfusionCounts counts;
  Metrics metrics;
  bool failed = false;
  std::string error;
};

struct EvaluationReport {
  DiseaseKind disease = DiseaseKind::CAS;
  std::uint64_t master_seed = 0;
  std::vector<Method> methods;
  std::vector<MeasurementCombination> combinations;
  std::vector<CellResult> cells; // [method][combination][fold]

  std::size_t cell_index(std::size_t method, std::size_t combo, int fold) const {
    return (method * combinations.size() + combo) * kNumFolds +
           static_cast<std::size_t>(fold);
  }
  CellResult& cell(std::size_t method, std::size_t combo, int fold) {
    return cells[cell_index(method, combo, fold)];
  }
  const CellResult& cell(std::size_t method, std::size_t combo, int fold) const {
    return cells[cell_index(method, combo, fold)];
  }

  struct Aggregate {
    Metrics mean;
    bool any_failed = false;
  };

  Aggregate aggregate(std::size_t method, std::size_t combo) const {
    Aggregate agg;
    int n = 0;
    for (int f = 0; f < kNumFolds; ++f) {
      const CellResult& c = cell(method, combo, f);
      if (c.failed) {
        agg.any_failed = true;
        continue;
      }
      agg.mean.sensitivity += c.metrics.sensitivity;
      agg.mean.specificity += c.metrics.specificity;
      agg.mean.precision += c.metrics.precision;
      agg.mean.recall += c.metrics.recall;
      agg.mean.f1 += c.metrics.f1;
      agg.mean.degenerate = agg.mean.degenerate || c.metrics.degenerate;
      ++n;
    }
    if (n > 0) {
      agg.mean.sensitivity /= n;
      agg.mean.specificity /= n;
      agg.mean.precision /= n;
      agg.mean.recall /= n;
      agg.mean.f1 /= n;
    }
    return agg;
  }

  bool has_failures() const {
    for (const CellResult& c : cells)
      if (c.failed) return true;
    return false;
  }

  std::size_t method_index(Method m) const {
    for (std::size_t i = 0; i < methods.size(); ++i)
      if (methods[i] == m) return i;
    throw std::invalid_argument("report: method not present");
  }
};

namespace detail {

inline std::uint64_t cell_seed(std::uint64_t master_seed, DiseaseKind disease,
                               std::size_t method_index, std::size_t combo_index,
                               int fold) {
  return RngStream(master_seed)
      .child({rng_tag::kCell, static_cast<std::uint64_t>(disease),
              static_cast<std::uint64_t>(method_index),
              static_cast<std::uint64_t>(combo_index),
              static_cast<std::uint64_t>(fold)})
      .key();
}

struct WaveformIndex {
  std::unordered_map<std::uint64_t, const WaveformSet*> healthy;
  std::unordered_map<std::uint64_t, const WaveformSet*> diseased;

  WaveformIndex(std::span<const WaveformSet> healthy_waves,
                std::span<const WaveformSet> diseased_waves) {
    for (const auto& w : healthy_waves) healthy[w.patient_id] = &w;
    for (const auto& w : diseased_waves) diseased[w.patient_id] = &w;
  }

  const WaveformSet& lookup(std::uint64_t id, bool as_healthy) const {
    const auto& map = as_healthy ? healthy : diseased;
    const auto it = map.find(id);
    if (it == map.end())
      throw std::invalid_argument("sweep: subject " + std::to_string(id) +
                                  " missing from " +
                                  (as_healthy ? "healthy" : "diseased") +
                                  " cohort");
    return *it->second;
  }
};

inline Dataset assemble_dataset(const WaveformIndex& index,
                                const SplitPlan& plan,
                                std::span<const std::uint64_t> ids,
                                const MeasurementCombination& combo) {
  Dataset data;
  data.labels.reserve(ids.size());
  data.subject_ids.assign(ids.begin(), ids.end());
  std::vector<std::vector<double>> rows;
  rows.reserve(ids.size());
  std::size_t width = 0;
  for (const std::uint64_t id : ids) {
    const bool as_healthy = plan.serves_as_healthy(id);
    rows.push_back(assemble_features(index.lookup(id, as_healthy), combo));
    width = rows.back().size();
    data.labels.push_back(as_healthy ? kHealthy : kDiseased);
  }
  data.x = Matrix(ids.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), data.x.row(r).begin());
  return data;
}

inline CellResult run_cell(const WaveformIndex& index, const SplitPlan& plan,
                           const MeasurementCombination& combo,
                           const Hyperparams& hp, std::uint64_t seed,
                           int fold) {
  CellResult result;
  try {
    Dataset train =
        assemble_dataset(index, plan, plan.folds[fold].train_ids, combo);
    Dataset test =
        assemble_dataset(index, plan, plan.folds[fold].test_ids, combo);
    const StandardizationStats stats = fit_standardizer(train.x);
    train.x = apply_standardizer(stats, train.x);
    test.x = apply_standardizer(stats, test.x);
    const TrainedModel model = fit(hp, train, seed);
    for (std::size_t r = 0; r < test.rows(); ++r)
      result.counts.add(test.labels[r], predict(model, test.x.row(r)));
    result.metrics = compute_metrics(result.counts);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

} // namespace detail

/// Per-method hyperparameters used by a sweep; the method field of each
/// entry is set by the driver.
struct MethodParams {
  Hyperparams base;

  Hyperparams for_method(Method m) const {
    Hyperparams hp = base;
    hp.method = m;
    return hp;
  }
};

/// Train and test every (method x combination x fold) cell. Cell failures
/// are flagged in place and never abort the sweep.
inline EvaluationReport run_combination_search(
    DiseaseKind disease, const std::vector<Method>& methods,
    const SplitPlan& plan, std::span<const WaveformSet> healthy_waves,
    std::span<const WaveformSet> diseased_waves, const MethodParams& params,
    std::uint64_t master_seed, unsigned jobs = 1,
    const std::vector<MeasurementCombination>* combos_override = nullptr) {
  if (methods.empty())
    throw std::invalid_argument("run_combination_search: no methods");
  plan.validate();

  EvaluationReport report;
  report.disease = disease;
  report.master_seed = master_seed;
  report.methods = methods;
  report.combinations =
      combos_override ? *combos_override : enumerate_combinations();
  report.cells.assign(
      methods.size() * report.combinations.size() * kNumFolds, {});

  const detail::WaveformIndex index(healthy_waves, diseased_waves);
  const std::size_t n_cells = report.cells.size();
  parallel_for(n_cells, jobs, [&](std::size_t flat) {
    const int fold = static_cast<int>(flat % kNumFolds);
    const std::size_t mc = flat / kNumFolds;
    const std::size_t combo = mc % report.combinations.size();
    const std::size_t method = mc / report.combinations.size();
    const std::uint64_t seed =
        detail::cell_seed(master_seed, disease, method, combo, fold);
    report.cells[flat] =
        detail::run_cell(index, plan, report.combinations[combo],
                         params.for_method(methods[method]), seed, fold);
  });
  return report;
}

/// Binomial cardinality histogram of the 63 combinations: [6,15,20,15,6,1].
inline std::array<int, 6> combination_cardinality_histogram(
    const std::vector<MeasurementCombination>& combos) {
  std::array<int, 6> hist{};
  for (const auto& c : combos) hist[c.included.size() - 1] += 1;
  return hist;
}

struct CountSummaryRow {
  Method method;
  int n_measurements = 0;
  double mean_f1 = 0.0;
  double max_f1 = 0.0;
  double min_f1 = 1.0;
  std::size_t argmax_combo = 0;
};

/// Group the combinations by cardinality and reduce mean/max/min F1 per
/// method. Requires a complete (failure-free) report.
inline std::vector<CountSummaryRow> measurement_count_summary(
    const EvaluationReport& report) {
  if (report.has_failures())
    throw std::invalid_argument("measurement_count_summary: incomplete report");
  std::vector<CountSummaryRow> rows;
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    for (int k = 1; k <= 6; ++k) {
      CountSummaryRow row;
      row.method = report.methods[m];
      row.n_measurements = k;
      int count = 0;
      for (std::size_t c = 0; c < report.combinations.size(); ++c) {
        if (static_cast<int>(report.combinations[c].included.size()) != k)
          continue;
        const double f1 = report.aggregate(m, c).mean.f1;
        row.mean_f1 += f1;
        if (count == 0 || f1 > row.max_f1) {
          row.max_f1 = f1;
          row.argmax_combo = c;
        }
        row.min_f1 = count == 0 ? f1 : std::min(row.min_f1, f1);
        ++count;
      }
      if (count == 0) continue;
      row.mean_f1 /= count;
      rows.push_back(row);
    }
  }
  return rows;
}

struct Q1Histograms {
  Method method;
  double bucket_width = 0.05;
  std::vector<int> include_q1; // 20 buckets over [0, 1]
  std::vector<int> exclude_q1;
  double include_mean = 0.0;
  double exclude_mean = 0.0;
};

/// F1 histograms over combinations that include Q1 (32) vs exclude it (31).
inline std::vector<Q1Histograms> q1_inclusion_histograms(
    const EvaluationReport& report, const std::vector<Method>& methods) {
  std::vector<Q1Histograms> out;
  for (const Method method : methods) {
    const std::size_t m = report.method_index(method);
    Q1Histograms h;
    h.method = method;
    h.include_q1.assign(20, 0);
    h.exclude_q1.assign(20, 0);
    int n_inc = 0, n_exc = 0;
    for (std::size_t c = 0; c < report.combinations.size(); ++c) {
      const double f1 = report.aggregate(m, c).mean.f1;
      int bucket = static_cast<int>(f1 / h.bucket_width);
      bucket = std::min(19, std::max(0, bucket));
      if (report.combinations[c].contains(Measurement::Q1)) {
        h.include_q1[bucket] += 1;
        h.include_mean += f1;
        ++n_inc;
      } else {
        h.exclude_q1[bucket] += 1;
        h.exclude_mean += f1;
        ++n_exc;
      }
    }
    if (n_inc > 0) h.include_mean /= n_inc;
    if (n_exc > 0) h.exclude_mean /= n_exc;
    out.push_back(std::move(h));
  }
  return out;
}

/// Element-wise F1 ratio (low-severity over high-severity) per combination
/// for one method. Reports must cover identical combinations.
inline std::vector<double> low_severity_ratio_study(
    const EvaluationReport& report_high, const EvaluationReport& report_low,
    Method method = Method::GB) {
  if (report_high.combinations.size() != report_low.combinations.size())
    throw std::invalid_argument("ratio study: combination coverage differs");
  for (std::size_t c = 0; c < report_high.combinations.size(); ++c)
    if (appendix_label(report_high.combinations[c]) !=
        appendix_label(report_low.combinations[c]))
      throw std::invalid_argument("ratio study: combination order differs");
  const std::size_t mh = report_high.method_index(method);
  const std::size_t ml = report_low.method_index(method);
  std::vector<double> ratios(report_high.combinations.size());
  for (std::size_t c = 0; c < ratios.size(); ++c) {
    const double hi = report_high.aggregate(mh, c).mean.f1;
    const double lo = report_low.aggregate(ml, c).mean.f1;
    ratios[c] = hi > 0.0 ? lo / hi : 0.0;
  }
  return ratios;
}

struct UnilateralRow {
  Measurement measurement;
  Laterality side;
  Metrics metrics; // mean over folds
};

/// GB sensitivities/specificities for {Q1, P3} x {right, left, both}.
/// Seeds reuse the main-search derivation for the base combination, so the
/// bilateral rows reproduce the corresponding sweep cells exactly.
inline std::vector<UnilateralRow> unilateral_study(
    const SplitPlan& plan, std::span<const WaveformSet> healthy_waves,
    std::span<const WaveformSet> diseased_waves, const MethodParams& params,
    std::uint64_t master_seed, unsigned jobs = 1) {
  plan.validate();
  const std::vector<MeasurementCombination> all = enumerate_combinations();
  const detail::WaveformIndex index(healthy_waves, diseased_waves);
  const Hyperparams hp = params.for_method(Method::GB);

  struct Task {
    Measurement m;
    Laterality side;
  };
  const std::vector<Task> tasks = {
      {Measurement::Q1, Laterality::RightOnly},
      {Measurement::Q1, Laterality::LeftOnly},
      {Measurement::Q1, Laterality::Bilateral},
      {Measurement::P3, Laterality::RightOnly},
      {Measurement::P3, Laterality::LeftOnly},
      {Measurement::P3, Laterality::Bilateral},
  };

  auto combo_index_of = [&](Measurement m) {
    for (std::size_t c = 0; c < all.size(); ++c)
      if (all[c].included.size() == 1 && all[c].included[0] == m) return c;
    throw std::logic_error("unilateral_study: base combination not found");
  };

  std::vector<UnilateralRow> rows(tasks.size());
  std::vector<CellResult> cells(tasks.size() * kNumFolds);
  parallel_for(cells.size(), jobs, [&](std::size_t flat) {
    const int fold = static_cast<int>(flat % kNumFolds);
    const std::size_t t = flat / kNumFolds;
    const MeasurementCombination combo =
        MeasurementCombination::of({tasks[t].m}, tasks[t].side);
    const std::uint64_t seed = detail::cell_seed(
        master_seed, plan.disease, /*method=*/0, combo_index_of(tasks[t].m),
        fold);
    cells[flat] = detail::run_cell(index, plan, combo, hp, seed, fold);
  });

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    UnilateralRow row;
    row.measurement = tasks[t].m;
    row.side = tasks[t].side;
    int n = 0;
    for (int f = 0; f < kNumFolds; ++f) {
      const CellResult& c = cells[t * kNumFolds + f];
      if (c.failed) throw std::runtime_error("unilateral_study: " + c.error);
      row.metrics.sensitivity += c.metrics.sensitivity;
      row.metrics.specificity += c.metrics.specificity;
      row.metrics.precision += c.metrics.precision;
      row.metrics.recall += c.metrics.recall;
      row.metrics.f1 += c.metrics.f1;
      ++n;
    }
    row.metrics.sensitivity /= n;
    row.metrics.specificity /= n;
    row.metrics.precision /= n;
    row.metrics.recall /= n;
    row.metrics.f1 /= n;
    rows[t] = row;
  }
  return rows;
}

} // namespace hemoml
