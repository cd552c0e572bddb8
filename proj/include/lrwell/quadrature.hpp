#pragma once

#include <lrwell/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

namespace lrwell {

struct QuadratureResult {
    double value;
    double error_estimate;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b].  Throws numeric_error when the
/// error estimate stays above max(abs_tol, rel_tol * L1 norm).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 1e-14) {
    double error = 0.0, l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, 20, rel_tol, &error, &l1);
    if (!std::isfinite(value) || error > std::max(abs_tol, 10.0 * rel_tol * l1))
        throw numeric_error("integrate: no convergence on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(error));
    return {value, error};
}

}  // namespace lrwell
