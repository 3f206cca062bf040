#include "gknn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gknn {

double survival_power(double p, double m) {
    if (m == 0.0) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    return std::exp(m * std::log1p(-p));
}

double fn_probability(double gamma, double epsilon, const SphereProbability& p_in_sphere,
                      double m_plus) {
    if (!(gamma > 0.0)) throw data_error("gamma must be positive");
    if (!(epsilon > 0.0)) throw data_error("epsilon must be positive");
    return survival_power(p_in_sphere(epsilon / gamma), m_plus);
}

double fp_probability(double gamma, double epsilon, const SphereProbability& p_in_sphere,
                      double m_minus) {
    if (!(gamma > 0.0)) throw data_error("gamma must be positive");
    if (!(epsilon > 0.0)) throw data_error("epsilon must be positive");
    return survival_power(p_in_sphere(gamma * epsilon), m_minus);
}

Eigen::VectorXd sample(const Generator& gen, Rng& rng) {
    if (const auto* box = std::get_if<UniformBox>(&gen)) {
        Eigen::VectorXd x(box->lo.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.uniform(box->lo[j], box->hi[j]);
        return x;
    }
    if (const auto* g = std::get_if<IsotropicGaussian>(&gen)) {
        Eigen::VectorXd x(g->mean.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.gaussian(g->mean[j], g->sigma);
        return x;
    }
    const auto& mix = std::get<TwoGaussianMixture>(gen);
    const bool first = rng.uniform01() < mix.weight1;
    const Eigen::VectorXd& mean = first ? mix.mean1 : mix.mean2;
    const double sigma = first ? mix.sigma1 : mix.sigma2;
    Eigen::VectorXd x(mean.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.gaussian(mean[j], sigma);
    return x;
}

Eigen::Index generator_dim(const Generator& gen) {
    if (const auto* box = std::get_if<UniformBox>(&gen)) return box->lo.size();
    if (const auto* g = std::get_if<IsotropicGaussian>(&gen)) return g->mean.size();
    return std::get<TwoGaussianMixture>(gen).mean1.size();
}

Generator generator_from_name(const std::string& name, Eigen::Index dim) {
    if (dim < 1) throw data_error("generator dimension must be at least 1");
    if (name == "uniform-box") {
        return UniformBox{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
    }
    if (name == "gaussian") {
        return IsotropicGaussian{Eigen::VectorXd::Zero(dim), 1.0};
    }
    if (name == "two-gaussian") {
        Eigen::VectorXd m2 = Eigen::VectorXd::Zero(dim);
        m2[0] = 1.5;
        return TwoGaussianMixture{Eigen::VectorXd::Zero(dim), m2, 1.0, 1.0, 0.5};
    }
    throw data_error("unknown distribution '" + name +
                     "' (have uniform-box, gaussian, two-gaussian)");
}

std::vector<ProbEstimate> monte_carlo_sphere_profile(const SphereModel& model,
                                                     const Eigen::VectorXd& center,
                                                     const std::vector<double>& radii) {
    if (model.trials < 1) throw data_error("trials must be at least 1");
    Rng rng(derive_seed(model.seed, 7));
    std::vector<long> hits(radii.size(), 0);
    for (long t = 0; t < model.trials; ++t) {
        const double d = (sample(model.generator, rng) - center).norm();
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (d <= radii[i]) ++hits[i];
        }
    }
    std::vector<ProbEstimate> out(radii.size());
    const double trials = static_cast<double>(model.trials);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double p = static_cast<double>(hits[i]) / trials;
        out[i] = {p, std::sqrt(p * (1.0 - p) / trials)};
    }
    return out;
}

ProbEstimate monte_carlo_sphere_prob(const SphereModel& model, const Eigen::VectorXd& center,
                                     double radius) {
    return monte_carlo_sphere_profile(model, center, {radius}).front();
}

namespace {

// Area of {x <= a} ∩ {y <= b} ∩ disk(origin, r), the corner building block
// of the circle-rectangle overlap.
double corner_area(double a, double b, double r) {
    a = std::clamp(a, -r, r);
    b = std::clamp(b, -r, r);
    const auto chord_integral = [r](double x) {  // antiderivative of sqrt(r^2 - x^2)
        const double h = std::sqrt(std::max(0.0, r * r - x * x));
        return 0.5 * (x * h + r * r * std::asin(std::clamp(x / r, -1.0, 1.0)));
    };
    const double xb = std::sqrt(std::max(0.0, r * r - b * b));
    double area = 0.0;
    if (b >= 0.0) {  // left of -xb the full chord lies below b
        const double hi = std::min(a, -xb);
        if (hi > -r) area += 2.0 * (chord_integral(hi) - chord_integral(-r));
    }
    {  // between -xb and xb the chord is cut at height b
        const double lo = -xb;
        const double hi = std::min(a, xb);
        if (hi > lo) area += b * (hi - lo) + (chord_integral(hi) - chord_integral(lo));
    }
    if (b >= 0.0 && a > xb) {  // right of xb, full chords again
        area += 2.0 * (chord_integral(a) - chord_integral(xb));
    }
    return area;
}

double disk_box_overlap(double cx, double cy, double r, double lx, double hx, double ly, double hy) {
    return corner_area(hx - cx, hy - cy, r) - corner_area(lx - cx, hy - cy, r) -
           corner_area(hx - cx, ly - cy, r) + corner_area(lx - cx, ly - cy, r);
}

}  // namespace

double uniform_box_ball_probability(const UniformBox& box, const Eigen::VectorXd& center,
                                    double radius) {
    if (box.lo.size() != center.size()) throw data_error("center dimension does not match box");
    if (radius < 0.0) throw data_error("radius must be non-negative");
    if (box.lo.size() == 1) {
        const double lo = std::max(box.lo[0], center[0] - radius);
        const double hi = std::min(box.hi[0], center[0] + radius);
        return std::max(0.0, hi - lo) / (box.hi[0] - box.lo[0]);
    }
    if (box.lo.size() == 2) {
        const double area = disk_box_overlap(center[0], center[1], radius, box.lo[0], box.hi[0],
                                             box.lo[1], box.hi[1]);
        const double box_area = (box.hi[0] - box.lo[0]) * (box.hi[1] - box.lo[1]);
        return std::clamp(area / box_area, 0.0, 1.0);
    }
    throw data_error("closed-form ball mass implemented for 1-D and 2-D boxes only");
}

std::vector<TheoryRow> theory_table(const SphereModel& model, const Eigen::VectorXd& query,
                                    double epsilon, const std::vector<double>& gammas) {
    if (!(epsilon > 0.0)) throw data_error("epsilon must be positive");
    std::vector<double> radii;
    radii.reserve(2 * gammas.size());
    for (double g : gammas) {
        if (!(g > 0.0)) throw data_error("gamma grid values must be positive");
        radii.push_back(epsilon / g);
        radii.push_back(g * epsilon);
    }
    const std::vector<ProbEstimate> masses = monte_carlo_sphere_profile(model, query, radii);

    std::vector<TheoryRow> rows;
    rows.reserve(gammas.size());
    const double mp = static_cast<double>(model.m_plus);
    const double mm = static_cast<double>(model.m_minus);
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const ProbEstimate& fn_mass = masses[2 * i];
        const ProbEstimate& fp_mass = masses[2 * i + 1];
        TheoryRow row;
        row.gamma = gammas[i];
        row.fn = survival_power(fn_mass.value, mp);
        row.fp = survival_power(fp_mass.value, mm);
        // Delta method: |d/dP (1-P)^m| = m (1-P)^(m-1).
        row.fn_se = mp * survival_power(fn_mass.value, mp - 1.0) * fn_mass.std_error;
        row.fp_se = mm * survival_power(fp_mass.value, mm - 1.0) * fp_mass.std_error;
        rows.push_back(row);
    }
    return rows;
}

bool BridgeResult::within(double sigmas) const {
    return std::abs(observed - predicted) <= sigmas * std_error + 1e-12;
}

namespace {

BridgeResult run_bridge(double gamma, long m_eps, long m_obs, long exponent, long trials,
                        std::uint64_t seed, bool fn_side) {
    if (!(gamma > 0.0)) throw data_error("gamma must be positive");
    if (trials < 1 || m_eps < 1 || m_obs < 1) throw data_error("bridge needs positive counts");

    const UniformBox box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
    const Generator gen = box;
    Rng rng(derive_seed(seed, fn_side ? 11 : 13));

    double predicted_sum = 0.0;
    double var_sum = 0.0;
    long observed_hits = 0;
    for (long t = 0; t < trials; ++t) {
        const Eigen::VectorXd z = sample(gen, rng);
        double eps = std::numeric_limits<double>::infinity();
        for (long j = 0; j < m_eps; ++j) {
            eps = std::min(eps, (sample(gen, rng) - z).norm());
        }
        // FN side: the query is misclassified when no positive lands within
        // eps/gamma. FP side: when no negative lands within gamma*eps.
        const double radius = fn_side ? eps / gamma : gamma * eps;
        const double mass = uniform_box_ball_probability(box, z, radius);
        const double q = survival_power(mass, static_cast<double>(exponent));
        predicted_sum += q;
        var_sum += q * (1.0 - q);

        double dmin = std::numeric_limits<double>::infinity();
        for (long j = 0; j < m_obs; ++j) {
            dmin = std::min(dmin, (sample(gen, rng) - z).norm());
        }
        if (dmin > radius) ++observed_hits;
    }

    BridgeResult out;
    out.trials = trials;
    out.observed = static_cast<double>(observed_hits) / static_cast<double>(trials);
    out.predicted = predicted_sum / static_cast<double>(trials);
    out.std_error = std::sqrt(var_sum) / static_cast<double>(trials);
    return out;
}

}  // namespace

BridgeResult fn_bridge(double gamma, long m_plus, long m_minus, long trials, std::uint64_t seed) {
    return run_bridge(gamma, m_minus, m_plus, m_plus, trials, seed, true);
}

BridgeResult fp_bridge(double gamma, long m_plus, long m_minus, long trials, std::uint64_t seed) {
    return run_bridge(gamma, m_plus, m_minus, m_minus, trials, seed, false);
}

}  // namespace gknn
