#pragma once

#include <functional>

namespace gjcm {

struct QuadratureResult {
  double value;
  double error_estimate;
};

// Adaptive 15-point Gauss-Kronrod on [a, b], bisecting panels whose embedded
// 7-point Gauss estimate disagrees. `tolerance` is relative to the
// result, falling back to absolute when the integral vanishes. Throws
// ConvergenceError if the estimate stays above tolerance at maximum depth.
QuadratureResult quadrature(const std::function<double(double)>& integrand, double a, double b,
                            double tolerance, unsigned max_depth = 20);

}  // namespace gjcm
