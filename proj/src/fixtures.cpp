#include "gknn/fixtures.hpp"

#include "gknn/rng.hpp"

#include <utility>

namespace gknn {

Dataset make_two_gaussian(Eigen::Index m_plus, Eigen::Index m_minus, const Eigen::Vector2d& mu_plus,
                          const Eigen::Vector2d& mu_minus, double sigma_plus, double sigma_minus,
                          std::uint64_t seed, std::string name) {
    Dataset out;
    const Eigen::Index m = m_plus + m_minus;
    out.X.resize(m, 2);
    out.y.resize(m);
    out.provenance.assign(static_cast<std::size_t>(m), Provenance::real);
    out.name = std::move(name);

    Rng rng(derive_seed(seed, 0));
    for (Eigen::Index i = 0; i < m_plus; ++i) {
        out.X(i, 0) = rng.gaussian(mu_plus.x(), sigma_plus);
        out.X(i, 1) = rng.gaussian(mu_plus.y(), sigma_plus);
        out.y[i] = positive_label;
    }
    for (Eigen::Index i = m_plus; i < m; ++i) {
        out.X(i, 0) = rng.gaussian(mu_minus.x(), sigma_minus);
        out.X(i, 1) = rng.gaussian(mu_minus.y(), sigma_minus);
        out.y[i] = negative_label;
    }
    return out;
}

Dataset make_two_gaussian(Eigen::Index m_plus, Eigen::Index m_minus, std::uint64_t seed,
                          std::string name) {
    return make_two_gaussian(m_plus, m_minus, Eigen::Vector2d(1.5, 0.0), Eigen::Vector2d(0.0, 0.0),
                             1.0, 1.0, seed, std::move(name));
}

Dataset fixture_ir1() { return make_two_gaussian(200, 200, 101, "fixture-ir1"); }

Dataset fixture_ir5() { return make_two_gaussian(80, 400, 105, "fixture-ir5"); }

Dataset fixture_ir20() { return make_two_gaussian(50, 1000, 120, "fixture-ir20"); }

}  // namespace gknn
