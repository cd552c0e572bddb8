#pragma once

// Eigenproblem of I = p^2 + |x|: levels, matched eigenfunctions, densities.

#include <lrwell/airy.hpp>
#include <lrwell/errors.hpp>
#include <lrwell/quadrature.hpp>
#include <lrwell/time_profile.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <string>

namespace lrwell {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct SpectralLevel {
    int n;
    Parity parity;
    double lambda;
    double norm_const;
};

inline constexpr int max_level = 40;

namespace detail {

inline SpectralLevel compute_level(int n) {
    if (n % 2 == 0) {
        const double a = airy::airy_derivative_zero(n / 2 + 1).location;
        return {n, Parity::even, -a, 1.0 / (std::sqrt(-2.0 * a) * airy::ai(a))};
    }
    const double a = airy::airy_function_zero((n + 1) / 2).location;
    return {n, Parity::odd, -a, 1.0 / (std::sqrt(2.0) * airy::ai_prime(a))};
}

inline const std::array<SpectralLevel, max_level + 1>& level_table() {
    static const auto table = [] {
        std::array<SpectralLevel, max_level + 1> out{};
        for (int n = 0; n <= max_level; ++n) out[static_cast<std::size_t>(n)] = compute_level(n);
        return out;
    }();
    return table;
}

}  // namespace detail

inline const SpectralLevel& level(int n) {
    if (n < 0 || n > max_level) throw range_error("level index " + std::to_string(n) + " outside [0, 40]");
    return detail::level_table()[static_cast<std::size_t>(n)];
}

/// Ai(u) with u beyond the evaluation range flushed to zero (|Ai(40)| < 1e-70).
inline double decaying_ai(double u) { return u > airy::max_modulus ? 0.0 : airy::ai(u); }

/// phi_n(x) = N_n sgn(x)^n Ai(|x| - lambda_n), sgn(0) = 0.
inline double eigenfunction(int n, double x) {
    const auto& lv = level(n);
    const double value = lv.norm_const * decaying_ai(std::abs(x) - lv.lambda);
    if (lv.parity == Parity::even) return value;
    if (x == 0.0) return 0.0;
    return x > 0.0 ? value : -value;
}

/// Analytic continuation of the region-j branch: region 1 is N Ai(z - lambda),
/// region 2 is (+/-) N Ai(-z - lambda) with the odd sign from sgn.
inline std::complex<double> eigenfunction_continued(int n, std::complex<double> z, Region region) {
    const auto& lv = level(n);
    if (region == Region::positive) return lv.norm_const * airy::airy_eval(z - lv.lambda).ai;
    const double sign = lv.parity == Parity::odd ? -1.0 : 1.0;
    return sign * lv.norm_const * airy::airy_eval(-z - lv.lambda).ai;
}

inline double density(int n, double x) {
    const double v = eigenfunction(n, x);
    return v * v;
}

/// Truncation radius for spatial quadrature: Ai^2 < 1e-25 beyond it.
inline double truncation_radius(int n) { return level(n).lambda + 15.0; }

/// int of phi_n^2 over one half-line by adaptive quadrature, split at the turning point.
inline double half_line_probability(int n, Region region) {
    const double lambda = level(n).lambda, edge = truncation_radius(n);
    const double s = region == Region::positive ? 1.0 : -1.0;
    auto integrand = [n, s](double u) { return density(n, s * u); };
    return integrate(integrand, 0.0, lambda).value + integrate(integrand, lambda, edge).value;
}

inline double full_line_probability(int n) {
    return half_line_probability(n, Region::positive) + half_line_probability(n, Region::negative);
}

/// int phi_m phi_n over the line.
inline double overlap(int m, int n) {
    const double edge = std::max(truncation_radius(m), truncation_radius(n));
    const double turn = std::max(level(m).lambda, level(n).lambda);
    double total = 0.0;
    for (double s : {1.0, -1.0}) {
        auto integrand = [m, n, s](double u) { return eigenfunction(m, s * u) * eigenfunction(n, s * u); };
        total += integrate(integrand, 0.0, turn, 1e-12, 1e-13).value + integrate(integrand, turn, edge, 1e-12, 1e-13).value;
    }
    return total;
}

}  // namespace lrwell
