#pragma once

#include <array>

namespace sghum::hermite {

/// Cubic Hermite basis on an element of length h, local coordinate s in [0, 1].
/// Order of the four functions: value-left, slope-left, value-right, slope-right.
/// Returns d^k/dx^k of each basis function (physical derivative) for k = 0..3.
inline std::array<std::array<double, 4>, 4> basis(double s, double h) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double ih = 1.0 / h;
  const double ih2 = ih * ih;
  const double ih3 = ih2 * ih;
  return {{
      {1.0 - 3.0 * s2 + 2.0 * s3, h * (s - 2.0 * s2 + s3), 3.0 * s2 - 2.0 * s3, h * (s3 - s2)},
      {(-6.0 * s + 6.0 * s2) * ih, 1.0 - 4.0 * s + 3.0 * s2, (6.0 * s - 6.0 * s2) * ih, 3.0 * s2 - 2.0 * s},
      {(-6.0 + 12.0 * s) * ih2, (-4.0 + 6.0 * s) * ih, (6.0 - 12.0 * s) * ih2, (-2.0 + 6.0 * s) * ih},
      {12.0 * ih3, 6.0 * ih2, -12.0 * ih3, 6.0 * ih2},
  }};
}

/// Gauss-Legendre rule on [0, 1]; six points integrate polynomials up to degree 11 exactly.
struct GaussRule {
  std::array<double, 6> nodes;
  std::array<double, 6> weights;
};

inline const GaussRule& gauss6() {
  static const GaussRule rule = [] {
    constexpr std::array<double, 3> x = {0.2386191860831969086305017, 0.6612093864662645136613996,
                                         0.9324695142031520278123016};
    constexpr std::array<double, 3> w = {0.4679139345726910473898703, 0.3607615730481386075698335,
                                         0.1713244923791703450402961};
    GaussRule r{};
    for (int i = 0; i < 3; ++i) {
      r.nodes[2 * i] = 0.5 * (1.0 - x[i]);
      r.nodes[2 * i + 1] = 0.5 * (1.0 + x[i]);
      r.weights[2 * i] = 0.5 * w[i];
      r.weights[2 * i + 1] = 0.5 * w[i];
    }
    return r;
  }();
  return rule;
}

/// Element matrices int phi_a^(k) phi_b^(k) dx for k = 0, 1, 2 on an element of length h.
struct ElementMatrices {
  std::array<std::array<double, 4>, 4> mass{};
  std::array<std::array<double, 4>, 4> stiff1{};
  std::array<std::array<double, 4>, 4> stiff2{};
};

inline ElementMatrices element_matrices(double h) {
  ElementMatrices e;
  const auto& g = gauss6();
  for (size_t q = 0; q < g.nodes.size(); ++q) {
    const auto b = basis(g.nodes[q], h);
    const double w = g.weights[q] * h;
    for (int a = 0; a < 4; ++a) {
      for (int c = 0; c < 4; ++c) {
        e.mass[a][c] += w * b[0][a] * b[0][c];
        e.stiff1[a][c] += w * b[1][a] * b[1][c];
        e.stiff2[a][c] += w * b[2][a] * b[2][c];
      }
    }
  }
  return e;
}

}  // namespace sghum::hermite
