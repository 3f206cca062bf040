#pragma once

#include "gknn/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gknn {

struct NormalizationParams {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
};

// Column-wise min/max of the training features. Fit on the training portion
// only; applying train-fit params to test data is the leakage-safe order.
NormalizationParams fit_normalizer(const Dataset& train);

// x' = 2 (x - min) / (max - min) - 1, feature-wise. Constant features map
// to 0. Values outside the fitted range are not clamped, so test features
// may land outside [-1, 1]; clamping would silently distort distances.
Dataset apply_normalizer(const Dataset& data, const NormalizationParams& params);

// Per-class random split preserving class proportions. Test-set counts
// round half-up per class and are clamped so both sides keep at least one
// point of each class. Deterministic in (data, fraction, seed).
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

// Validation-fold index sets: per class, a seeded shuffle dealt round-robin,
// so every fold's class ratio is within one count of the global ratio.
// Throws if a class has fewer points than folds (reduce folds).
std::vector<std::vector<Eigen::Index>> stratified_fold_indices(const Dataset& data, int folds,
                                                               std::uint64_t seed);

// (train, validation) datasets built from stratified_fold_indices.
std::vector<std::pair<Dataset, Dataset>> stratified_kfold(const Dataset& data, int folds,
                                                          std::uint64_t seed);

// Keep ceil(keep_fraction * m+) positives, chosen uniformly without
// replacement; negatives untouched. Row order of survivors is preserved.
Dataset subsample_minority(const Dataset& data, double keep_fraction, std::uint64_t seed);

}  // namespace gknn
