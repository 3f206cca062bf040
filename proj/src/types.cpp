#include "gknn/types.hpp"

#include <algorithm>
#include <cmath>

namespace gknn {

Eigen::Index Dataset::count(int label) const {
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == label) ++n;
    }
    return n;
}

bool Dataset::has_synthetic() const {
    return std::any_of(provenance.begin(), provenance.end(),
                       [](Provenance p) { return p == Provenance::synthetic; });
}

std::vector<Eigen::Index> Dataset::indices_of(int label) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == label) out.push_back(i);
    }
    return out;
}

Dataset Dataset::select(const std::vector<Eigen::Index>& rows_wanted) const {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows_wanted.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(rows_wanted.size()));
    out.provenance.reserve(rows_wanted.size());
    for (std::size_t i = 0; i < rows_wanted.size(); ++i) {
        const Eigen::Index r = rows_wanted[i];
        if (r < 0 || r >= rows()) throw data_error("row index out of range in Dataset::select");
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
        out.y[static_cast<Eigen::Index>(i)] = y[r];
        out.provenance.push_back(provenance[r]);
    }
    out.feature_names = feature_names;
    out.name = name;
    return out;
}

void Dataset::validate() const {
    if (y.size() != X.rows()) throw data_error("label count does not match row count");
    if (static_cast<Eigen::Index>(provenance.size()) != X.rows()) {
        throw data_error("provenance count does not match row count");
    }
    if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != X.cols()) {
        throw data_error("feature name count does not match column count");
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != positive_label && y[i] != negative_label) {
            throw data_error("labels must be +1 or -1");
        }
    }
    if (!X.allFinite()) throw data_error("non-finite feature value");
}

}  // namespace gknn
