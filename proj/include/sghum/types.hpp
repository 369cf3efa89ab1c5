#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sghum {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using CSparseMatrix = Eigen::SparseMatrix<cplx>;

/// Coefficient vector of a graph function at one time instant.
struct GraphState {
  CVector coeffs;
  double time = 0.0;
};

}  // namespace sghum
