#pragma once

#include <cstdint>
#include <vector>

#include "sghum/fem_assembly.hpp"

namespace sghum {

/// Named initial/target states.
struct Profile {
  enum class Kind { zero, gaussian, bump, eigenmode, random_modes };
  Kind kind = Kind::zero;
  cplx amplitude{1.0, 0.0};
  // gaussian: amplitude * exp(-((x - center)/width)^2) on `edge`
  // bump: amplitude * cos^4(pi (x - center) / (2 width)) for |x - center| < width, on `edge`
  int edge = 1;
  double center = 0.0;
  double width = 0.1;
  // eigenmode: M-normalized generalized eigenvector `index` of (K, M), counted from 0
  int index = 0;
  // random_modes: seeded complex Gaussian combination of the lowest `n_modes` eigenvectors,
  // rescaled to M-norm |amplitude|
  int n_modes = 8;
  std::uint64_t seed = 0;
};

/// Generalized eigenpairs of (K, M), ascending, M-orthonormal. The sign of each vector makes its
/// M-product with a fixed smooth reference function positive.
struct ModeBasis {
  RVector eigenvalues;
  Eigen::MatrixXd vectors;
};

ModeBasis mode_basis(const Discretization& disc);

/// Sum of the profiles as free coefficients. Throws std::invalid_argument for bad parameters.
CVector build_state(const Discretization& disc, const std::vector<Profile>& parts);

}  // namespace sghum
