#pragma once

#include "gknn/types.hpp"

#include <utility>

namespace gknn {

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;

    long total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

// 2 TP / (2 TP + FN + FP); 0 when the denominator is 0.
double f_measure(const ConfusionCounts& c);

// (precision, recall), each 0 when its denominator is 0.
std::pair<double, double> precision_recall(const ConfusionCounts& c);

// m- / m+.
double imbalance_ratio(const Dataset& data);

}  // namespace gknn
