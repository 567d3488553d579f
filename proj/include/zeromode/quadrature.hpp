#pragma once

#include <functional>

namespace zeromode {

/// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a, b] by recursive
/// bisection. Tolerance is split proportionally to subinterval length.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 0.0);

}  // namespace zeromode
