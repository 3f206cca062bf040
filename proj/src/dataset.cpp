#include "gknn/dataset.hpp"

#include "gknn/rng.hpp"

#include <algorithm>
#include <cmath>

namespace gknn {

NormalizationParams fit_normalizer(const Dataset& train) {
    if (train.rows() < 1) throw data_error("cannot fit normalizer on an empty dataset");
    NormalizationParams params;
    params.min = train.X.colwise().minCoeff();
    params.max = train.X.colwise().maxCoeff();
    return params;
}

Dataset apply_normalizer(const Dataset& data, const NormalizationParams& params) {
    if (params.min.size() != data.dim() || params.max.size() != data.dim()) {
        throw data_error("normalizer dimension does not match dataset");
    }
    Dataset out = data;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        const double lo = params.min[j];
        const double range = params.max[j] - lo;
        if (range == 0.0) {
            out.X.col(j).setZero();
        } else {
            out.X.col(j) = (2.0 * ((data.X.col(j).array() - lo) / range) - 1.0).matrix();
        }
    }
    return out;
}

namespace {

// Half-up class count for the test side, clamped so both sides keep at
// least one point.
Eigen::Index test_count(Eigen::Index class_size, double fraction) {
    const auto wanted = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(class_size) + 0.5));
    return std::clamp<Eigen::Index>(wanted, 1, class_size - 1);
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw data_error("test fraction must lie in (0, 1)");
    }
    Rng rng(derive_seed(seed, 1));
    std::vector<Eigen::Index> train_rows, test_rows;
    for (int label : {positive_label, negative_label}) {
        std::vector<Eigen::Index> idx = data.indices_of(label);
        if (idx.size() < 2) {
            throw data_error("class " + std::to_string(label) +
                             " needs at least 2 points to split");
        }
        rng.shuffle(idx);
        const Eigen::Index n_test = test_count(static_cast<Eigen::Index>(idx.size()), test_fraction);
        test_rows.insert(test_rows.end(), idx.begin(), idx.begin() + n_test);
        train_rows.insert(train_rows.end(), idx.begin() + n_test, idx.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {data.select(train_rows), data.select(test_rows)};
}

std::vector<std::vector<Eigen::Index>> stratified_fold_indices(const Dataset& data, int folds,
                                                               std::uint64_t seed) {
    if (folds < 2) throw data_error("need at least 2 folds");
    Rng rng(derive_seed(seed, 2));
    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(folds));
    for (int label : {positive_label, negative_label}) {
        std::vector<Eigen::Index> idx = data.indices_of(label);
        if (static_cast<int>(idx.size()) < folds) {
            throw data_error("class " + std::to_string(label) + " has " +
                             std::to_string(idx.size()) + " points, fewer than " +
                             std::to_string(folds) + " folds; reduce the fold count");
        }
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out[i % static_cast<std::size_t>(folds)].push_back(idx[i]);
        }
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

std::vector<std::pair<Dataset, Dataset>> stratified_kfold(const Dataset& data, int folds,
                                                          std::uint64_t seed) {
    const auto val_sets = stratified_fold_indices(data, folds, seed);
    std::vector<std::pair<Dataset, Dataset>> out;
    out.reserve(val_sets.size());
    std::vector<bool> in_val(static_cast<std::size_t>(data.rows()));
    for (const auto& val : val_sets) {
        std::fill(in_val.begin(), in_val.end(), false);
        for (Eigen::Index i : val) in_val[static_cast<std::size_t>(i)] = true;
        std::vector<Eigen::Index> train_rows;
        train_rows.reserve(static_cast<std::size_t>(data.rows()) - val.size());
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            if (!in_val[static_cast<std::size_t>(i)]) train_rows.push_back(i);
        }
        out.emplace_back(data.select(train_rows), data.select(val));
    }
    return out;
}

Dataset subsample_minority(const Dataset& data, double keep_fraction, std::uint64_t seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw data_error("keep fraction must lie in (0, 1]");
    }
    if (keep_fraction == 1.0) return data;
    std::vector<Eigen::Index> pos = data.indices_of(positive_label);
    if (pos.empty()) throw data_error("dataset has no positives to subsample");
    const auto keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(pos.size())));
    Rng rng(derive_seed(seed, 3));
    rng.shuffle(pos);
    pos.resize(keep);
    std::vector<Eigen::Index> rows = data.indices_of(negative_label);
    rows.insert(rows.end(), pos.begin(), pos.end());
    std::sort(rows.begin(), rows.end());
    return data.select(rows);
}

}  // namespace gknn
