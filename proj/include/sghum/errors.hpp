#pragma once

#include <stdexcept>
#include <string>

namespace sghum {

/// An iterative method (CG, Lanczos) stopped at its iteration cap before reaching tolerance.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  [[nodiscard]] int iterations() const { return iterations_; }
  [[nodiscard]] double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace sghum
