#pragma once

#include "gknn/neighbors.hpp"
#include "gknn/types.hpp"

#include <string>
#include <vector>

namespace gknn {

struct GammaKnnModel {
    const Dataset* train = nullptr;
    int k = 3;
    GammaDistanceParams params;
};

struct Prediction {
    int label;                    // +1 iff 2 * positive_votes >= k
    int positive_votes;
    NeighborList merged;          // top-k under the gamma distance
};

// k nearest negatives and k nearest positives by base distance, positive
// distances scaled entrywise per provenance, both lists merged ascending,
// majority vote over the first k. Vote ties (even k) and merge distance
// ties resolve positive.
Prediction gamma_knn_classify(const GammaKnnModel& model, const Query& query);

// Plain majority vote over the k nearest by base distance. Deliberately a
// different code path (one full ranking instead of a two-list merge) with
// the same tie rule, so agreement with gamma_knn_classify at gamma = 1 is a
// meaningful check.
int knn_classify(const Dataset& train, const Query& query, int k);

// Sign of sum(y_i / d_i) over the k nearest. A zero-distance neighbor's
// label wins outright (1/d is undefined there and any cap is arbitrary);
// a zero score resolves positive like every other tie here.
int weighted_knn_classify(const Dataset& train, const Query& query, int k);

// (m_i / m)^(1/p) * d, the class-weighted distance; p is the feature
// dimension. Small classes get pulled closer.
double class_weighted_distance(double base_distance, Eigen::Index class_count, Eigen::Index m,
                               Eigen::Index p);

// Majority vote over the top k of a full ranking under the class-weighted
// distance. Class counts default to the training set's; pass explicit
// counts to keep fit-time weights across later resampling.
int cw_knn_classify(const Dataset& train, const Query& query, int k);
int cw_knn_classify(const Dataset& train, const Query& query, int k, Eigen::Index m_plus,
                    Eigen::Index m_minus);

struct DupTrainResult {
    Dataset data;
    // For every output row, the input row it copies. Duplicates stay
    // provenance-real: they are copies of real points, not new ones.
    std::vector<Eigen::Index> duplicate_of;
};

// Each positive replicated floor(m-/m+) times (at least once); negatives
// untouched. Classify the result with knn_classify and k > 1.
DupTrainResult dup_knn_train(const Dataset& train);

enum class ClassifierKind { knn, wknn, cwknn, dupknn, gammaknn };

ClassifierKind classifier_from_name(const std::string& name);
std::string to_string(ClassifierKind kind);

}  // namespace gknn
