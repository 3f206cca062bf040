#pragma once

#include "gknn/types.hpp"

#include <cstdint>
#include <string>

namespace gknn {

Dataset make_two_gaussian(Eigen::Index m_plus, Eigen::Index m_minus, const Eigen::Vector2d& mu_plus,
                          const Eigen::Vector2d& mu_minus, double sigma_plus, double sigma_minus,
                          std::uint64_t seed, std::string name);

// Two unit-variance Gaussians in 2-D: positives at (1.5, 0), negatives at
// the origin. Enough overlap that the minority suffers under a plain vote.
Dataset make_two_gaussian(Eigen::Index m_plus, Eigen::Index m_minus, std::uint64_t seed,
                          std::string name);

// The bundled synthetic benchmarks, reachable from the CLI as fixture:ir1,
// fixture:ir5, fixture:ir20.
Dataset fixture_ir1();   // 200 / 200
Dataset fixture_ir5();   // 80 / 400
Dataset fixture_ir20();  // 50 / 1000

}  // namespace gknn
