#pragma once

#include "gknn/types.hpp"

#include <vector>

namespace gknn {

struct Neighbor {
    Eigen::Index index;  // training-row id
    double distance;
};

// Ascending by distance; ties broken as in neighbor_before.
using NeighborList = std::vector<Neighbor>;

template <typename DerivedA, typename DerivedB>
double squared_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.size() != b.size()) throw data_error("dimension mismatch in distance computation");
    return (a.derived() - b.derived()).squaredNorm();
}

template <typename DerivedA, typename DerivedB>
double euclidean_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    return std::sqrt(squared_distance(a, b));
}

// Separate multipliers for real and synthetic positives; negatives are never
// scaled. gamma_real = gamma_synth = 1 recovers the base distance.
struct GammaDistanceParams {
    double gamma_real = 1.0;
    double gamma_synth = 1.0;
};

inline double gamma_scale(int label, Provenance prov, const GammaDistanceParams& params) {
    if (label != positive_label) return 1.0;
    return prov == Provenance::synthetic ? params.gamma_synth : params.gamma_real;
}

// The class-asymmetric dissimilarity: base distance to negatives, scaled
// distance to positives. Not symmetric, not a metric; tests must not assert
// metric axioms on it.
inline double gamma_distance(double base_distance, int label, Provenance prov,
                             const GammaDistanceParams& params) {
    return gamma_scale(label, prov, params) * base_distance;
}

// Shared ordering for every ranked neighbor list: distance ascending, then
// positives ahead of negatives, then lower training-row index. The label
// rule is what makes the merged-list classifier and the full-sort
// classifier agree exactly.
inline bool neighbor_before(double da, int ya, Eigen::Index ia, double db, int yb, Eigen::Index ib) {
    if (da != db) return da < db;
    if (ya != yb) return ya > yb;
    return ia < ib;
}

using Query = Eigen::Ref<const Eigen::RowVectorXd>;

// The k nearest points of the given class under the base distance, exact
// brute force. Ties break by lower row index. Returns fewer than k entries
// only when the class has fewer than k points; an absent class gives an
// empty list.
NeighborList class_knn_search(const Dataset& train, const Query& query, int k, int label);

// The k nearest over the whole training set under the base distance,
// ordered by neighbor_before.
NeighborList knn_search(const Dataset& train, const Query& query, int k);

// Full-sort top-k under the gamma distance; the reference ranking the
// two-list merge in gamma_knn_classify is tested against.
NeighborList gamma_knn_search(const Dataset& train, const Query& query, int k,
                              const GammaDistanceParams& params);

}  // namespace gknn
