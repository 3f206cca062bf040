#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gknn {

// Thrown for malformed inputs: unreadable files, bad labels, dimension
// mismatches, degenerate class sizes. The CLI maps it to exit code 2.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int positive_label = 1;
constexpr int negative_label = -1;

enum class Provenance : std::uint8_t { real, synthetic };

// Row-major so that X.row(i) is contiguous; the neighbor searches stream
// over rows.
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A labeled binary-classification sample. Labels are +1 (positive, minority
// by convention) and -1. Provenance tells real points apart from
// sampler-generated ones; freshly loaded data is all real.
struct Dataset {
    RowMatrixXd X;                           // m x p
    Eigen::VectorXi y;                       // m entries, each +1 or -1
    std::vector<Provenance> provenance;      // m entries
    std::vector<std::string> feature_names;  // p entries, or empty
    std::string name;

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }

    Eigen::Index count(int label) const;
    Eigen::Index positives() const { return count(positive_label); }
    Eigen::Index negatives() const { return count(negative_label); }
    bool has_synthetic() const;

    std::vector<Eigen::Index> indices_of(int label) const;

    // New dataset holding the given rows, in the given order.
    Dataset select(const std::vector<Eigen::Index>& rows_wanted) const;

    // Throws data_error if the invariants do not hold: matching sizes,
    // labels in {+1,-1}, all features finite.
    void validate() const;
};

}  // namespace gknn
