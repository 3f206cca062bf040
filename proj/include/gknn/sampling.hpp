#pragma once

#include "gknn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gknn {

enum class SamplerStrategy { none, smote, borderline_smote, adasyn, smote_enn, smote_tomek };

SamplerStrategy sampler_from_name(const std::string& name);
std::string to_string(SamplerStrategy strategy);

struct SamplerConfig {
    SamplerStrategy strategy = SamplerStrategy::none;
    double target_ratio = 1.0;    // desired m+/m- after sampling, in (0, 1]
    int k_neighbors = 5;
    std::uint64_t seed = 0;
    bool include_noise = false;   // borderline only: keep all-negative neighborhoods as seeds
};

// How one synthetic point was built: output = (1-t) * X.row(seed_index)
//                                            + t * X.row(neighbor_index),
// indices into the sampler's *input* dataset. Input rows survive sampling
// and cleaning (cleaning only drops negatives), so records stay replayable.
struct SyntheticRecord {
    Eigen::Index seed_index;
    Eigen::Index neighbor_index;
    double t;
};

struct SamplerResult {
    Dataset data;
    // Aligned with the synthetic rows of `data` in order of appearance.
    std::vector<SyntheticRecord> records;
    bool warning = false;
    std::string message;
};

// Appends G = round(target_ratio * m-) - m+ synthetic positives. Seed
// points cycle round-robin through the positives in row order; the partner
// is drawn uniformly from the seed's k nearest positive neighbors and the
// interpolation parameter t uniformly from [0, 1) (one index draw then one
// t draw per point). Throws if m+ < 2 or target_ratio does not exceed the
// current ratio; G <= 0 after rounding returns the input unchanged.
SamplerResult smote(const Dataset& train, const SamplerConfig& config);

// SMOTE restricted to DANGER seeds: positives whose k-neighborhood over the
// whole set is negative-majority but, by default, not all-negative (those
// count as noise; include_noise keeps them). Interpolation partners still
// come from the whole positive class. An empty DANGER set returns the input
// unchanged with the warning flag set.
SamplerResult borderline_smote(const Dataset& train, const SamplerConfig& config);

// The DANGER seed rows, exposed for inspection: positives with n negatives
// among their k nearest neighbors where k/2 <= n < k (<= k with
// include_noise).
std::vector<Eigen::Index> borderline_danger_set(const Dataset& train, int k_neighbors,
                                                bool include_noise);

// SMOTE with per-seed budgets proportional to hardness: r_i = fraction of
// negatives among the k nearest neighbors of positive i. All-zero hardness
// falls back to a uniform allocation with the warning flag set.
SamplerResult adasyn(const Dataset& train, const SamplerConfig& config);

// Integer budgets g_i summing exactly to total: floor the shares, then give
// the leftovers to the largest fractional parts (ties: lower index).
// Independent rounding could drift the total by half the class size.
std::vector<long> adasyn_allocation(const std::vector<double>& hardness, long total);

// Drops every negative whose k nearest neighbors (self excluded, computed
// once on the input, removed simultaneously) vote it misclassified under
// the shared positive-ties-win rule. Positives are never dropped. Throws if
// the negative class would empty.
Dataset enn_clean(const Dataset& train, int k);

// Removes the negative member of every Tomek link: a cross-class pair of
// strict mutual nearest neighbors (any equidistant third point dissolves
// the link). Detection on the frozen input, removal simultaneous.
Dataset tomek_clean(const Dataset& train);

// Dispatch on config.strategy; smote_enn cleans with enn_clean(k = 3),
// smote_tomek with tomek_clean. none passes the input through.
SamplerResult apply_sampler(const Dataset& train, const SamplerConfig& config);

}  // namespace gknn
