#include "gknn/neighbors.hpp"

#include <algorithm>

namespace gknn {

namespace {

double row_distance(const Dataset& train, Eigen::Index row, const Query& query) {
    return euclidean_distance(train.X.row(row), query);
}

}  // namespace

NeighborList class_knn_search(const Dataset& train, const Query& query, int k, int label) {
    if (k < 1) throw data_error("k must be at least 1");
    if (train.dim() != query.size()) throw data_error("query dimension does not match training set");

    NeighborList all;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        if (train.y[i] != label) continue;
        all.push_back({i, row_distance(train, i, query)});
    }
    const auto by_distance_then_index = [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                      by_distance_then_index);
    all.resize(take);
    return all;
}

namespace {

NeighborList ranked_search(const Dataset& train, const Query& query, int k,
                           const GammaDistanceParams& params) {
    if (k < 1) throw data_error("k must be at least 1");
    if (train.dim() != query.size()) throw data_error("query dimension does not match training set");

    NeighborList all;
    all.reserve(static_cast<std::size_t>(train.rows()));
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        const double base = row_distance(train, i, query);
        all.push_back(
            {i, gamma_distance(base, train.y[i], train.provenance[static_cast<std::size_t>(i)], params)});
    }
    const auto order = [&train](const Neighbor& a, const Neighbor& b) {
        return neighbor_before(a.distance, train.y[a.index], a.index, b.distance, train.y[b.index],
                               b.index);
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), order);
    all.resize(take);
    return all;
}

}  // namespace

NeighborList knn_search(const Dataset& train, const Query& query, int k) {
    return ranked_search(train, query, k, GammaDistanceParams{});
}

NeighborList gamma_knn_search(const Dataset& train, const Query& query, int k,
                              const GammaDistanceParams& params) {
    return ranked_search(train, query, k, params);
}

}  // namespace gknn
