#include "gknn/sampling.hpp"

#include "gknn/neighbors.hpp"
#include "gknn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gknn {

SamplerStrategy sampler_from_name(const std::string& name) {
    if (name == "none") return SamplerStrategy::none;
    if (name == "smote") return SamplerStrategy::smote;
    if (name == "borderline") return SamplerStrategy::borderline_smote;
    if (name == "adasyn") return SamplerStrategy::adasyn;
    if (name == "smote-enn") return SamplerStrategy::smote_enn;
    if (name == "smote-tomek") return SamplerStrategy::smote_tomek;
    throw data_error("unknown sampler '" + name +
                     "' (have none, smote, borderline, adasyn, smote-enn, smote-tomek)");
}

std::string to_string(SamplerStrategy strategy) {
    switch (strategy) {
        case SamplerStrategy::none: return "none";
        case SamplerStrategy::smote: return "smote";
        case SamplerStrategy::borderline_smote: return "borderline";
        case SamplerStrategy::adasyn: return "adasyn";
        case SamplerStrategy::smote_enn: return "smote-enn";
        case SamplerStrategy::smote_tomek: return "smote-tomek";
    }
    return "unknown";
}

namespace {

// k nearest over the whole set with row `self` excluded, shared ordering.
NeighborList knn_excluding_self(const Dataset& train, Eigen::Index self, int k) {
    NeighborList all;
    all.reserve(static_cast<std::size_t>(train.rows()) - 1);
    for (Eigen::Index j = 0; j < train.rows(); ++j) {
        if (j == self) continue;
        all.push_back({j, euclidean_distance(train.X.row(j), train.X.row(self))});
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

int negatives_among(const Dataset& train, const NeighborList& nbrs) {
    int n = 0;
    for (const Neighbor& nb : nbrs) {
        if (train.y[nb.index] == negative_label) ++n;
    }
    return n;
}

// k nearest positive neighbors of a positive row, itself excluded.
NeighborList positive_neighbors(const Dataset& train, Eigen::Index row, int k) {
    NeighborList nbrs = class_knn_search(train, train.X.row(row), k + 1, positive_label);
    nbrs.erase(std::remove_if(nbrs.begin(), nbrs.end(),
                              [row](const Neighbor& n) { return n.index == row; }),
               nbrs.end());
    if (static_cast<int>(nbrs.size()) > k) nbrs.resize(static_cast<std::size_t>(k));
    return nbrs;
}

long synthetic_budget(const Dataset& train, double target_ratio) {
    const auto m_plus = train.positives();
    const auto m_minus = train.negatives();
    if (m_plus < 2) throw data_error("oversampling needs at least 2 positives");
    if (m_minus < 1) throw data_error("oversampling needs at least 1 negative");
    if (!(target_ratio > 0.0 && target_ratio <= 1.0)) {
        throw data_error("target ratio must lie in (0, 1]");
    }
    const double current = static_cast<double>(m_plus) / static_cast<double>(m_minus);
    if (!(target_ratio > current)) {
        throw data_error("target ratio " + std::to_string(target_ratio) +
                         " does not exceed the current ratio " + std::to_string(current));
    }
    return std::llround(target_ratio * static_cast<double>(m_minus)) - m_plus;
}

SamplerResult unchanged(const Dataset& train) {
    SamplerResult out;
    out.data = train;
    return out;
}

// Appends the synthetic rows described by (seed row, budget) pairs. Per
// point: one neighbor index draw, then one t draw.
SamplerResult generate_synthetics(const Dataset& train, const std::vector<Eigen::Index>& seeds,
                                  const std::vector<long>& budget, int k_neighbors,
                                  std::uint64_t seed) {
    const long total = std::accumulate(budget.begin(), budget.end(), 0L);
    SamplerResult out;
    out.records.reserve(static_cast<std::size_t>(total));

    std::vector<NeighborList> nbrs(seeds.size());
    Rng rng(seed);

    RowMatrixXd synth(total, train.dim());
    long row = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        if (budget[s] == 0) continue;
        if (nbrs[s].empty()) nbrs[s] = positive_neighbors(train, seeds[s], k_neighbors);
        if (nbrs[s].empty()) throw data_error("positive seed has no positive neighbor");
        for (long c = 0; c < budget[s]; ++c) {
            const std::size_t pick = rng.uniform_index(nbrs[s].size());
            const double t = rng.uniform01();
            const Eigen::Index a = seeds[s];
            const Eigen::Index b = nbrs[s][pick].index;
            synth.row(row) = train.X.row(a) + t * (train.X.row(b) - train.X.row(a));
            out.records.push_back({a, b, t});
            ++row;
        }
    }

    Dataset& data = out.data;
    data.X.resize(train.rows() + total, train.dim());
    data.X.topRows(train.rows()) = train.X;
    data.X.bottomRows(total) = synth;
    data.y.resize(train.rows() + total);
    data.y.head(train.rows()) = train.y;
    data.y.tail(total).setConstant(positive_label);
    data.provenance = train.provenance;
    data.provenance.resize(static_cast<std::size_t>(train.rows() + total), Provenance::synthetic);
    data.feature_names = train.feature_names;
    data.name = train.name;
    return out;
}

// Round-robin budgets: the first (total mod n) seeds get one extra.
std::vector<long> round_robin_budget(std::size_t n, long total) {
    std::vector<long> budget(n, total / static_cast<long>(n));
    for (long i = 0; i < total % static_cast<long>(n); ++i) budget[static_cast<std::size_t>(i)] += 1;
    return budget;
}

}  // namespace

SamplerResult smote(const Dataset& train, const SamplerConfig& config) {
    const long total = synthetic_budget(train, config.target_ratio);
    if (total <= 0) return unchanged(train);
    const std::vector<Eigen::Index> seeds = train.indices_of(positive_label);
    return generate_synthetics(train, seeds, round_robin_budget(seeds.size(), total),
                               config.k_neighbors, config.seed);
}

std::vector<Eigen::Index> borderline_danger_set(const Dataset& train, int k_neighbors,
                                                bool include_noise) {
    std::vector<Eigen::Index> danger;
    for (Eigen::Index i : train.indices_of(positive_label)) {
        const NeighborList nbrs = knn_excluding_self(train, i, k_neighbors);
        const int k = static_cast<int>(nbrs.size());
        const int n = negatives_among(train, nbrs);
        if (2 * n >= k && (n < k || include_noise)) danger.push_back(i);
    }
    return danger;
}

SamplerResult borderline_smote(const Dataset& train, const SamplerConfig& config) {
    const long total = synthetic_budget(train, config.target_ratio);
    if (total <= 0) return unchanged(train);
    const std::vector<Eigen::Index> danger =
        borderline_danger_set(train, config.k_neighbors, config.include_noise);
    if (danger.empty()) {
        SamplerResult out = unchanged(train);
        out.warning = true;
        out.message = "borderline: DANGER set is empty, no points generated";
        return out;
    }
    return generate_synthetics(train, danger, round_robin_budget(danger.size(), total),
                               config.k_neighbors, config.seed);
}

std::vector<long> adasyn_allocation(const std::vector<double>& hardness, long total) {
    const double sum = std::accumulate(hardness.begin(), hardness.end(), 0.0);
    if (!(sum > 0.0)) throw data_error("hardness weights must not all be zero");

    std::vector<long> budget(hardness.size());
    std::vector<std::pair<double, std::size_t>> fractional;  // (-fraction, index)
    long assigned = 0;
    for (std::size_t i = 0; i < hardness.size(); ++i) {
        const double share = hardness[i] / sum * static_cast<double>(total);
        budget[i] = static_cast<long>(std::floor(share));
        assigned += budget[i];
        fractional.emplace_back(-(share - std::floor(share)), i);
    }
    std::sort(fractional.begin(), fractional.end());
    for (long r = 0; r < total - assigned; ++r) {
        budget[fractional[static_cast<std::size_t>(r)].second] += 1;
    }
    return budget;
}

SamplerResult adasyn(const Dataset& train, const SamplerConfig& config) {
    const long total = synthetic_budget(train, config.target_ratio);
    if (total <= 0) return unchanged(train);
    const std::vector<Eigen::Index> seeds = train.indices_of(positive_label);

    std::vector<double> hardness(seeds.size());
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const NeighborList nbrs = knn_excluding_self(train, seeds[s], config.k_neighbors);
        hardness[s] = nbrs.empty() ? 0.0
                                   : static_cast<double>(negatives_among(train, nbrs)) /
                                         static_cast<double>(nbrs.size());
        sum += hardness[s];
    }

    SamplerResult out;
    if (sum == 0.0) {
        // No positive sees a negative in its neighborhood; nothing is
        // "hard", so fall back to a uniform allocation.
        std::fill(hardness.begin(), hardness.end(), 1.0);
        out = generate_synthetics(train, seeds, adasyn_allocation(hardness, total),
                                  config.k_neighbors, config.seed);
        out.warning = true;
        out.message = "adasyn: all hardness weights are zero, fell back to uniform allocation";
        return out;
    }
    return generate_synthetics(train, seeds, adasyn_allocation(hardness, total), config.k_neighbors,
                               config.seed);
}

Dataset enn_clean(const Dataset& train, int k) {
    if (k < 1) throw data_error("k must be at least 1");
    if (train.rows() <= k) throw data_error("too few points for ENN cleaning");

    std::vector<Eigen::Index> keep;
    long removed = 0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        if (train.y[i] != negative_label) {
            keep.push_back(i);
            continue;
        }
        const NeighborList nbrs = knn_excluding_self(train, i, k);
        const int pos = static_cast<int>(nbrs.size()) - negatives_among(train, nbrs);
        // Same vote rule as the classifiers, ties to the positive side: the
        // neighborhood classifies this negative as positive iff 2*pos >= k.
        if (2 * pos >= k) {
            ++removed;
        } else {
            keep.push_back(i);
        }
    }
    if (removed == train.negatives() && removed > 0) {
        throw data_error("ENN cleaning would remove every negative");
    }
    return train.select(keep);
}

Dataset tomek_clean(const Dataset& train) {
    if (train.rows() < 2) throw data_error("too few points for Tomek cleaning");
    const Eigen::Index m = train.rows();

    // Strict unique nearest neighbor per row, -1 when tied.
    std::vector<Eigen::Index> nn(static_cast<std::size_t>(m), -1);
    for (Eigen::Index i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_j = -1;
        bool tied = false;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = euclidean_distance(train.X.row(i), train.X.row(j));
            if (d < best) {
                best = d;
                best_j = j;
                tied = false;
            } else if (d == best) {
                tied = true;
            }
        }
        nn[static_cast<std::size_t>(i)] = tied ? -1 : best_j;
    }

    std::vector<bool> drop(static_cast<std::size_t>(m), false);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j = nn[static_cast<std::size_t>(i)];
        if (j <= i) continue;  // record each link once
        if (nn[static_cast<std::size_t>(j)] != i) continue;
        if (train.y[i] == train.y[j]) continue;
        const Eigen::Index negative = (train.y[i] == negative_label) ? i : j;
        drop[static_cast<std::size_t>(negative)] = true;
    }

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
    }
    return train.select(keep);
}

SamplerResult apply_sampler(const Dataset& train, const SamplerConfig& config) {
    switch (config.strategy) {
        case SamplerStrategy::none:
            return unchanged(train);
        case SamplerStrategy::smote:
            return smote(train, config);
        case SamplerStrategy::borderline_smote:
            return borderline_smote(train, config);
        case SamplerStrategy::adasyn:
            return adasyn(train, config);
        case SamplerStrategy::smote_enn: {
            SamplerResult out = smote(train, config);
            out.data = enn_clean(out.data, 3);
            return out;
        }
        case SamplerStrategy::smote_tomek: {
            SamplerResult out = smote(train, config);
            out.data = tomek_clean(out.data);
            return out;
        }
    }
    throw data_error("unhandled sampler strategy");
}

}  // namespace gknn
