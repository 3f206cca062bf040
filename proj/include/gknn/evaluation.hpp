#pragma once

#include "gknn/classifiers.hpp"
#include "gknn/metrics.hpp"
#include "gknn/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gknn {

struct TuningGrid {
    std::vector<double> gamma_real;   // multipliers for real positives
    std::vector<double> gamma_synth;  // multipliers for synthetic positives
    std::vector<double> ratios;       // sampler target ratios

    // gamma_real {0.1 .. 1.0}, gamma_synth {0.1 .. 2.0}, ratios
    // {0.1 .. 1.0}, all step 0.1. Zero is excluded everywhere: the scaled
    // values act as distance multipliers and must stay positive.
    static TuningGrid defaults();
};

// Sampler callback used inside cross-validation; the seam lets tests
// instrument exactly which rows the sampler is fitted on.
using SamplerFn =
    std::function<SamplerResult(const Dataset& fold_train, double ratio, std::uint64_t seed)>;

struct TuneResult {
    double gamma_real = 1.0;
    double gamma_synth = 1.0;
    double ratio = 0.0;  // 0 when tuning ran without a sampler
    double cv_f1 = 0.0;  // mean validation F1 of the winning grid point
    int folds_used = 0;
    std::vector<std::string> warnings;
};

// Stratified-CV grid search maximizing mean validation F1. The normalizer
// and the sampler are fit inside each CV-train fold; validation rows never
// reach either. gamma_synth is swept only when the sampler actually
// produced synthetic points, otherwise it is pinned to gamma_real. Ties
// break toward larger gamma_real, then gamma_synth closest to 1, then the
// smaller gamma_synth, then the smaller ratio. Folds auto-reduce to the
// minority count with a logged warning. sequential = true tunes
// (ratio, gamma) with a single shared gamma first and the synthetic gamma
// second, instead of the default joint grid.
TuneResult tune_gamma(const Dataset& train, int k, const TuningGrid& grid,
                      const std::optional<SamplerConfig>& sampler, int folds, std::uint64_t seed,
                      bool sequential = false);

// As tune_gamma but with an arbitrary sampler callback (nullptr = none).
TuneResult tune_gamma_with(const Dataset& train, int k, const TuningGrid& grid,
                           const SamplerFn* sampler_fn, int folds, std::uint64_t seed,
                           bool sequential = false);

struct HeatmapResult {
    std::vector<double> gamma_real;   // row axis
    std::vector<double> gamma_synth;  // column axis
    Eigen::MatrixXd f1;               // mean CV F1, indexed [row, col]
};

// The tuning objective surface over (gamma_real, gamma_synth) at one fixed
// sampler ratio. Fold splits and sampler seeds match tune_gamma's for the
// same base seed, so the matrix argmax reproduces the tuned pair when the
// ratio grids coincide.
HeatmapResult heatmap_matrix(const Dataset& train, int k, const TuningGrid& grid,
                             const SamplerConfig& sampler, int folds, std::uint64_t seed);

struct RunRecord {
    std::uint64_t seed = 0;
    double gamma_real = 1.0;
    double gamma_synth = 1.0;
    double ratio = 0.0;
    ConfusionCounts counts;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalReport {
    std::string dataset;
    std::string classifier;
    std::string sampler;       // "none" when absent
    int k = 3;
    std::uint64_t base_seed = 0;
    std::vector<RunRecord> per_run;
    double mean_f1 = 0.0;
    double std_f1 = 0.0;       // sample standard deviation (n - 1); 0 for a single run
};

// Per run r in [0, runs): stratified 80/20 split with seed base_seed + r,
// min-max normalization fit on the training side, hyperparameter tuning on
// the training side (gammaknn only; baselines use the sampler config as
// given), refit on the full training side, then test-set metrics.
EvalReport run_experiment(const Dataset& data, ClassifierKind classifier,
                          const std::optional<SamplerConfig>& sampler, int k, int runs,
                          std::uint64_t base_seed, const TuningGrid& grid = TuningGrid::defaults(),
                          int folds = 10, bool sequential = false);

std::string to_json(const EvalReport& report);

// Aligned text table, one row per report: dataset, method, mean F1, std.
std::string format_table(const std::vector<EvalReport>& reports);

struct SweepPoint {
    double ir;          // achieved imbalance ratio after subsampling
    double gamma_real;  // tuned on the subsampled training portion
    double cv_f1;
};

// Hold the data fixed, thin the minority: split once, then for each keep
// fraction (descending) subsample the training positives, tune gamma, and
// record (achieved IR, tuned gamma_real).
std::vector<SweepPoint> gamma_ir_sweep(const Dataset& data, const std::vector<double>& keep_fractions,
                                       int k, std::uint64_t seed, int folds = 10);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gknn
