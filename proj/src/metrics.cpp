#include "gknn/metrics.hpp"

namespace gknn {

ConfusionCounts confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
    if (y_true.size() != y_pred.size()) throw data_error("label vectors differ in length");
    ConfusionCounts c;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        const bool truth = y_true[i] == positive_label;
        const bool pred = y_pred[i] == positive_label;
        if (truth && pred) ++c.tp;
        else if (!truth && pred) ++c.fp;
        else if (truth && !pred) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f_measure(const ConfusionCounts& c) {
    const double denom = static_cast<double>(2 * c.tp + c.fn + c.fp);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(c.tp) / denom;
}

std::pair<double, double> precision_recall(const ConfusionCounts& c) {
    const double precision =
        (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall =
        (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {precision, recall};
}

double imbalance_ratio(const Dataset& data) {
    const Eigen::Index m_plus = data.positives();
    if (m_plus == 0) throw data_error("imbalance ratio undefined without positives");
    return static_cast<double>(data.negatives()) / static_cast<double>(m_plus);
}

}  // namespace gknn
