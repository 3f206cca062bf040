#include "gknn/classifiers.hpp"

#include <algorithm>
#include <cmath>

namespace gknn {

Prediction gamma_knn_classify(const GammaKnnModel& model, const Query& query) {
    const Dataset& train = *model.train;
    if (train.positives() == 0 || train.negatives() == 0) {
        throw data_error("gamma k-NN needs at least one point of each class");
    }

    NeighborList neg = class_knn_search(train, query, model.k, negative_label);

    // The positive candidates are selected under the scaled distance, not
    // the base distance: with distinct real/synthetic multipliers a farther
    // point of the cheaper group can outrank every nearer point of the
    // other, and selecting first would drop it. With a single multiplier
    // the two orders coincide.
    NeighborList pos;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        if (train.y[i] != positive_label) continue;
        const double base = euclidean_distance(train.X.row(i), query);
        pos.push_back({i, gamma_distance(base, positive_label,
                                         train.provenance[static_cast<std::size_t>(i)],
                                         model.params)});
    }
    const auto by_distance_then_index = [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    };
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(model.k), pos.size());
    std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(take), pos.end(),
                      by_distance_then_index);
    pos.resize(take);

    Prediction out;
    out.merged.reserve(static_cast<std::size_t>(model.k));
    out.positive_votes = 0;
    std::size_t ip = 0, in = 0;
    while (out.merged.size() < static_cast<std::size_t>(model.k) &&
           (ip < pos.size() || in < neg.size())) {
        bool take_pos;
        if (ip == pos.size()) {
            take_pos = false;
        } else if (in == neg.size()) {
            take_pos = true;
        } else {
            take_pos = neighbor_before(pos[ip].distance, positive_label, pos[ip].index,
                                       neg[in].distance, negative_label, neg[in].index);
        }
        if (take_pos) {
            out.merged.push_back(pos[ip++]);
            ++out.positive_votes;
        } else {
            out.merged.push_back(neg[in++]);
        }
    }
    out.label = (2 * out.positive_votes >= model.k) ? positive_label : negative_label;
    return out;
}

namespace {

int vote_top_k(const Dataset& train, const NeighborList& ranked, int k) {
    int positive_votes = 0;
    for (const Neighbor& n : ranked) {
        if (train.y[n.index] == positive_label) ++positive_votes;
    }
    return (2 * positive_votes >= k) ? positive_label : negative_label;
}

}  // namespace

int knn_classify(const Dataset& train, const Query& query, int k) {
    return vote_top_k(train, knn_search(train, query, k), k);
}

int weighted_knn_classify(const Dataset& train, const Query& query, int k) {
    const NeighborList ranked = knn_search(train, query, k);
    if (ranked.empty()) throw data_error("empty training set");
    if (ranked.front().distance == 0.0) return train.y[ranked.front().index];
    double score = 0.0;
    for (const Neighbor& n : ranked) {
        score += static_cast<double>(train.y[n.index]) / n.distance;
    }
    return score >= 0.0 ? positive_label : negative_label;
}

double class_weighted_distance(double base_distance, Eigen::Index class_count, Eigen::Index m,
                               Eigen::Index p) {
    return std::pow(static_cast<double>(class_count) / static_cast<double>(m),
                    1.0 / static_cast<double>(p)) *
           base_distance;
}

int cw_knn_classify(const Dataset& train, const Query& query, int k) {
    return cw_knn_classify(train, query, k, train.positives(), train.negatives());
}

int cw_knn_classify(const Dataset& train, const Query& query, int k, Eigen::Index m_plus,
                    Eigen::Index m_minus) {
    const Eigen::Index m = m_plus + m_minus;
    // The class weights act exactly like per-class gamma multipliers.
    GammaDistanceParams params;
    const double w_plus = class_weighted_distance(1.0, m_plus, m, train.dim());
    const double w_minus = class_weighted_distance(1.0, m_minus, m, train.dim());
    params.gamma_real = params.gamma_synth = w_plus / w_minus;
    // Dividing both classes by w_minus leaves the ranking unchanged; the
    // gamma search scales positives only, so feed it the weight ratio.
    return vote_top_k(train, gamma_knn_search(train, query, k, params), k);
}

DupTrainResult dup_knn_train(const Dataset& train) {
    const Eigen::Index m_plus = train.positives();
    const Eigen::Index m_minus = train.negatives();
    if (m_plus < 1) throw data_error("no positives to duplicate");
    const Eigen::Index copies = std::max<Eigen::Index>(1, m_minus / m_plus);

    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> source;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
        rows.push_back(i);
        source.push_back(i);
    }
    for (Eigen::Index c = 1; c < copies; ++c) {
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            if (train.y[i] == positive_label) {
                rows.push_back(i);
                source.push_back(i);
            }
        }
    }
    DupTrainResult out;
    out.data = train.select(rows);
    out.duplicate_of = std::move(source);
    return out;
}

ClassifierKind classifier_from_name(const std::string& name) {
    if (name == "knn") return ClassifierKind::knn;
    if (name == "wknn") return ClassifierKind::wknn;
    if (name == "cwknn") return ClassifierKind::cwknn;
    if (name == "dupknn") return ClassifierKind::dupknn;
    if (name == "gammaknn") return ClassifierKind::gammaknn;
    throw data_error("unknown classifier '" + name + "' (have knn, wknn, cwknn, dupknn, gammaknn)");
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::wknn: return "wknn";
        case ClassifierKind::cwknn: return "cwknn";
        case ClassifierKind::dupknn: return "dupknn";
        case ClassifierKind::gammaknn: return "gammaknn";
    }
    return "unknown";
}

}  // namespace gknn
