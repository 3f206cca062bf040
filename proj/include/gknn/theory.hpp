#pragma once

#include "gknn/rng.hpp"
#include "gknn/types.hpp"

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace gknn {

// (1 - p)^m evaluated as exp(m * log1p(-p)) for every m: one code path,
// no underflow at large m, and exact on round cases the direct pow drifts
// off by an ulp (0.9^5 = 0.59049).
double survival_power(double p, double m);

using SphereProbability = std::function<double(double radius)>;

// Probability that none of m+ positives lands within epsilon/gamma of the
// query, i.e. the query keeps a negative nearest neighbor under the scaled
// distance: FN_gamma = (1 - P(epsilon/gamma))^{m+}. The query's position is
// baked into p_in_sphere.
double fn_probability(double gamma, double epsilon, const SphereProbability& p_in_sphere,
                      double m_plus);

// Mirror image for false positives: FP_gamma = (1 - P(gamma*epsilon))^{m-}.
double fp_probability(double gamma, double epsilon, const SphereProbability& p_in_sphere,
                      double m_minus);

struct UniformBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

struct IsotropicGaussian {
    Eigen::VectorXd mean;
    double sigma = 1.0;
};

struct TwoGaussianMixture {
    Eigen::VectorXd mean1;
    Eigen::VectorXd mean2;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double weight1 = 0.5;
};

using Generator = std::variant<UniformBox, IsotropicGaussian, TwoGaussianMixture>;

Eigen::VectorXd sample(const Generator& gen, Rng& rng);
Eigen::Index generator_dim(const Generator& gen);

// "uniform-box" (unit box), "gaussian" (origin, sigma 1), "two-gaussian"
// (origin and 1.5*e1, sigma 1, equal weights).
Generator generator_from_name(const std::string& name, Eigen::Index dim);

struct SphereModel {
    Generator generator;
    long m_plus = 1;
    long m_minus = 1;
    long trials = 100000;
    std::uint64_t seed = 0;
};

struct ProbEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Empirical mass of the L2 ball under the model's generator.
ProbEstimate monte_carlo_sphere_prob(const SphereModel& model, const Eigen::VectorXd& center,
                                     double radius);

// One sample stream shared across all radii, so the estimates are exactly
// monotone in the radius.
std::vector<ProbEstimate> monte_carlo_sphere_profile(const SphereModel& model,
                                                     const Eigen::VectorXd& center,
                                                     const std::vector<double>& radii);

// Exact ball mass for 1-D and 2-D uniform boxes (closed-form
// circle-rectangle overlap); lets the bridge checks avoid nested Monte
// Carlo.
double uniform_box_ball_probability(const UniformBox& box, const Eigen::VectorXd& center,
                                    double radius);

struct TheoryRow {
    double gamma;
    double fn;
    double fn_se;
    double fp;
    double fp_se;
};

// (gamma, FN_gamma, FP_gamma) rows with delta-method standard errors. Ball
// masses come from one shared-sample profile, so both columns are exactly
// monotone across the gamma grid.
std::vector<TheoryRow> theory_table(const SphereModel& model, const Eigen::VectorXd& query,
                                    double epsilon, const std::vector<double>& gammas);

struct BridgeResult {
    double observed = 0.0;   // mean misclassification indicator
    double predicted = 0.0;  // mean closed-form probability, per-trial epsilon
    double std_error = 0.0;  // sqrt(sum p_t (1 - p_t)) / trials
    long trials = 0;

    bool within(double sigmas) const;
};

// 1-NN simulation on the 2-D unit square. Per trial: draw the query and the
// negatives, measure epsilon to the nearest negative, evaluate the closed
// form with the exact box-ball mass, then draw the positives and record
// whether the query actually keeps a negative nearest neighbor under the
// scaled distance.
BridgeResult fn_bridge(double gamma, long m_plus, long m_minus, long trials, std::uint64_t seed);

// Mirror image: epsilon to the nearest positive, misclassification when no
// negative undercuts the scaled positive distance gamma * epsilon.
BridgeResult fp_bridge(double gamma, long m_plus, long m_minus, long trials, std::uint64_t seed);

}  // namespace gknn
