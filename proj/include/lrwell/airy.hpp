#pragma once

// Airy functions Ai, Bi and their first derivatives for complex argument,
// plus the negative real zeros of Ai and Ai'.
//
// |z| <= series_radius: Maclaurin series.  Where Ai is exponentially small
// (Re z > 0) the series cancels badly, so it is accumulated in double-double
// arithmetic there; elsewhere long double is plenty.
// |z| >  series_radius: Poincare expansions in the two Ai sectors, Bi via the
// connection formula Bi(z) = e^{i pi/6} Ai(z w) + e^{-i pi/6} Ai(z / w),
// w = e^{2 pi i / 3}.

#include <lrwell/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace lrwell::airy {

using cplx = std::complex<double>;

inline constexpr double series_radius = 7.0;
inline constexpr double max_modulus = 40.0;
inline constexpr int max_zero_index = 50;

struct AiryPair {
    cplx ai;
    cplx ai_prime;
    cplx bi;
    cplx bi_prime;
};

enum class ZeroKind { function, derivative };

struct AiryZero {
    ZeroKind kind;
    int index;
    double location;
};

namespace detail {

// Unevaluated sum hi + lo of two doubles (~106 significant bits).  Only what
// the series needs: +, -, *, / and narrowing.
struct double_double {
    double hi = 0.0;
    double lo = 0.0;

    constexpr double_double() = default;
    constexpr double_double(double x) : hi(x) {}  // NOLINT: implicit by design of R(1) etc.
    constexpr double_double(int x) : hi(x) {}     // NOLINT
    constexpr double_double(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }

    static double_double quick_two_sum(double a, double b) {
        const double s = a + b;
        return {s, b - (s - a)};
    }
    static double_double two_sum(double a, double b) {
        const double s = a + b;
        const double bb = s - a;
        return {s, (a - (s - bb)) + (b - bb)};
    }

    friend double_double operator+(double_double a, double_double b) {
        double_double s = two_sum(a.hi, b.hi);
        const double_double t = two_sum(a.lo, b.lo);
        s.lo += t.hi;
        s = quick_two_sum(s.hi, s.lo);
        s.lo += t.lo;
        return quick_two_sum(s.hi, s.lo);
    }
    friend double_double operator-(double_double a) { return {-a.hi, -a.lo}; }
    friend double_double operator-(double_double a, double_double b) { return a + (-b); }
    friend double_double operator*(double_double a, double_double b) {
        const double p = a.hi * b.hi;
        const double e = std::fma(a.hi, b.hi, -p) + (a.hi * b.lo + a.lo * b.hi);
        return quick_two_sum(p, e);
    }
    friend double_double operator/(double_double a, double_double b) {
        const double q1 = a.hi / b.hi;
        double_double r = a - b * double_double(q1);
        const double q2 = r.hi / b.hi;
        r = r - b * double_double(q2);
        const double q3 = r.hi / b.hi;
        return quick_two_sum(q1, q2) + double_double(q3);
    }
};

using wide_real = double_double;

template <class R>
inline constexpr double unit_roundoff = static_cast<double>(std::numeric_limits<R>::epsilon());

template <>
inline constexpr double unit_roundoff<double_double> = 4.93038065763132e-32;  // 2^-104

template <class R>
struct wcomplex {
    R re;
    R im;
};

template <class R>
inline wcomplex<R> operator+(wcomplex<R> a, wcomplex<R> b) {
    return {a.re + b.re, a.im + b.im};
}

template <class R>
inline wcomplex<R> operator-(wcomplex<R> a, wcomplex<R> b) {
    return {a.re - b.re, a.im - b.im};
}

template <class R>
inline wcomplex<R> operator*(wcomplex<R> a, wcomplex<R> b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class R>
inline wcomplex<R> operator*(wcomplex<R> a, R s) {
    return {a.re * s, a.im * s};
}

template <class R>
inline double magnitude(wcomplex<R> a) {
    return std::abs(static_cast<double>(a.re)) + std::abs(static_cast<double>(a.im));
}

template <class R>
inline cplx narrow(wcomplex<R> a) {
    return {static_cast<double>(a.re), static_cast<double>(a.im)};
}

// Ai(0), -Ai'(0) and sqrt(3) as double-double pairs.
inline constexpr double c1_hi = 0.3550280538878172, c1_lo = 2.0523363243621184e-17;
inline constexpr double c2_hi = 0.2588194037928068, c2_lo = -2.5222431116108315e-17;
inline constexpr double sqrt3_hi = 1.7320508075688772, sqrt3_lo = 1.0035084221806899e-16;

inline constexpr int max_series_terms = 160;

// 1/((3k-1)3k), 1/(3k(3k+1)), 1/(3k(3k-2)), 1/((3k-3)(3k-1)) for k >= 1.
template <class R>
struct series_denominators {
    std::array<std::array<R, 4>, max_series_terms> inv{};

    series_denominators() {
        for (int k = 1; k < max_series_terms; ++k) {
            const R r3 = R(3 * k);
            inv[k][0] = R(1) / ((r3 - R(1)) * r3);
            inv[k][1] = R(1) / (r3 * (r3 + R(1)));
            inv[k][2] = R(1) / (r3 * (r3 - R(2)));
            inv[k][3] = k >= 2 ? R(1) / ((r3 - R(3)) * (r3 - R(1))) : R(0);
        }
    }
};

template <class R>
const series_denominators<R>& denominators() {
    static const series_denominators<R> table;
    return table;
}

template <class R>
AiryPair maclaurin(cplx z) {
    using C = wcomplex<R>;
    const C zc{R(z.real()), R(z.imag())};
    const C z3 = zc * zc * zc;
    const auto& den = denominators<R>().inv;

    // f, g are the two canonical solutions; t, u, d, e their current terms.
    C f{R(1), R(0)}, g = zc, fp{R(0), R(0)}, gp{R(1), R(0)};
    C t{R(1), R(0)}, u = zc, d = zc * zc * R(0.5), e{R(1), R(0)};
    fp = d;

    const double eps = unit_roundoff<R>;
    double peak = std::max({1.0, magnitude(u), magnitude(d)});
    for (int k = 1; k < max_series_terms; ++k) {
        t = t * z3 * den[k][0];
        u = u * z3 * den[k][1];
        e = e * z3 * den[k][2];
        f = f + t;
        g = g + u;
        gp = gp + e;
        if (k >= 2) {
            d = d * z3 * den[k][3];
            fp = fp + d;
        }
        // d and e shadow t and u up to a factor 3k/|z|, so they need no separate test.
        const double largest = std::max(magnitude(t), magnitude(u)) * (1.0 + 3.0 * k);
        peak = std::max(peak, largest);
        if (k > 2 && largest < eps * peak) break;
    }

    const R c1 = R(c1_hi) + R(c1_lo);
    const R c2 = R(c2_hi) + R(c2_lo);
    const R s3 = R(sqrt3_hi) + R(sqrt3_lo);
    return {narrow(f * c1 - g * c2), narrow(fp * c1 - gp * c2), narrow((f * c1 + g * c2) * s3),
            narrow((fp * c1 + gp * c2) * s3)};
}

inline constexpr int asymptotic_terms = 60;

// u_k and v_k of the Poincare expansions.
struct expansion_coefficients {
    std::array<double, asymptotic_terms> u{};
    std::array<double, asymptotic_terms> v{};

    expansion_coefficients() {
        u[0] = 1.0;
        v[0] = 1.0;
        for (int k = 1; k < asymptotic_terms; ++k) {
            const double kk = k;
            u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216 * kk);
            v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
        }
    }
};

inline const expansion_coefficients& coefficients() {
    static const expansion_coefficients table;
    return table;
}

struct ai_value {
    cplx ai;
    cplx ai_prime;
};

// Ai, Ai' for |z| large.  Sector |arg z| <= 2 pi / 3 uses the exponential form,
// the rest the oscillatory form in -z.
inline ai_value ai_asymptotic(cplx z) {
    constexpr double pi = std::numbers::pi;
    const double sqrt_pi = std::sqrt(pi);
    const auto& cf = coefficients();

    if (std::abs(std::arg(z)) <= 2.0 * pi / 3.0) {
        const cplx zeta = (2.0 / 3.0) * z * std::sqrt(z);
        const cplx inv = 1.0 / zeta;
        cplx su = 0.0, sv = 0.0, power = 1.0;
        double previous = HUGE_VAL;
        for (int k = 0; k < asymptotic_terms; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const cplx tu = sign * cf.u[k] * power;
            const cplx tv = sign * cf.v[k] * power;
            const double size = std::abs(tu) + std::abs(tv);
            if (size > previous) break;
            su += tu;
            sv += tv;
            if (size < 1e-17 * (std::abs(su) + std::abs(sv))) break;
            previous = size;
            power *= inv;
        }
        const cplx quarter = std::sqrt(std::sqrt(z));
        const cplx decay = std::exp(-zeta);
        return {decay / (2.0 * sqrt_pi * quarter) * su, -quarter * decay / (2.0 * sqrt_pi) * sv};
    }

    const cplx w = -z;
    const cplx zeta = (2.0 / 3.0) * w * std::sqrt(w);
    const cplx inv = 1.0 / zeta;
    cplx p = 0.0, q = 0.0, r = 0.0, s = 0.0, power = 1.0;
    double previous = HUGE_VAL;
    for (int k = 0; k < asymptotic_terms; ++k) {
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        const cplx tu = sign * cf.u[k] * power;
        const cplx tv = sign * cf.v[k] * power;
        const double size = std::abs(tu) + std::abs(tv);
        if (size > previous) break;
        if (k % 2 == 0) {
            p += tu;
            r += tv;
        } else {
            q += tu;
            s += tv;
        }
        if (size < 1e-17 * (std::abs(p) + std::abs(r))) break;
        previous = size;
        power *= inv;
    }
    const cplx quarter = std::sqrt(std::sqrt(w));
    const cplx phase = zeta - pi / 4.0;
    const cplx c = std::cos(phase), sn = std::sin(phase);
    return {(c * p + sn * q) / (sqrt_pi * quarter), quarter / sqrt_pi * (sn * r - c * s)};
}

}  // namespace detail

/// Maclaurin-series evaluation, valid (to double precision) for |z| <= series_radius.
inline AiryPair airy_series(cplx z) {
    // The largest series term is ~exp|zeta| while |Ai| ~ exp(-Re zeta); long double
    // keeps ~16 digits as long as their ratio stays below ~e^6.
    const cplx zeta = (2.0 / 3.0) * z * std::sqrt(z);
    if (std::abs(zeta) + zeta.real() > 6.0) return detail::maclaurin<detail::wide_real>(z);
    return detail::maclaurin<long double>(z);
}

/// Asymptotic evaluation, accurate for |z| >= series_radius.
inline AiryPair airy_asymptotic(cplx z) {
    constexpr double pi = std::numbers::pi;
    const cplx omega = std::polar(1.0, 2.0 * pi / 3.0);
    const cplx rot_b = std::polar(1.0, pi / 6.0);
    const cplx rot_bp = std::polar(1.0, 5.0 * pi / 6.0);

    const auto a = detail::ai_asymptotic(z);
    const auto up = detail::ai_asymptotic(z * omega);
    const auto down = detail::ai_asymptotic(z * std::conj(omega));
    return {a.ai, a.ai_prime, rot_b * up.ai + std::conj(rot_b) * down.ai,
            rot_bp * up.ai_prime + std::conj(rot_bp) * down.ai_prime};
}

/// Ai, Ai', Bi, Bi' at z.  Throws range_error for |z| > 40 or non-finite z.
inline AiryPair airy_eval(cplx z) {
    const double modulus = std::abs(z);
    if (!std::isfinite(modulus) || modulus > max_modulus)
        throw range_error("airy_eval: |z| = " + std::to_string(modulus) + " outside working range [0, 40]");
    AiryPair out = modulus <= series_radius ? airy_series(z) : airy_asymptotic(z);
    if (z.imag() == 0.0) {
        // Real on the real axis.
        out.ai.imag(0.0);
        out.ai_prime.imag(0.0);
        out.bi.imag(0.0);
        out.bi_prime.imag(0.0);
    }
    return out;
}

inline double ai(double x) { return airy_eval({x, 0.0}).ai.real(); }
inline double ai_prime(double x) { return airy_eval({x, 0.0}).ai_prime.real(); }

namespace detail {

// Leading terms of the standard large-t expansions T(t), U(t) for the zeros.
inline double zero_guess(ZeroKind kind, int k) {
    constexpr double pi = std::numbers::pi;
    if (kind == ZeroKind::function) {
        const double t = 3.0 * pi * (4.0 * k - 1.0) / 8.0;
        const double t2 = 1.0 / (t * t);
        return -std::cbrt(t * t) * (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * 77125.0 / 82944.0)));
    }
    const double t = 3.0 * pi * (4.0 * k - 3.0) / 8.0;
    const double t2 = 1.0 / (t * t);
    return -std::cbrt(t * t) * (1.0 + t2 * (-7.0 / 48.0 + t2 * (35.0 / 288.0 - t2 * 181223.0 / 207360.0)));
}

inline AiryZero refine_zero(ZeroKind kind, int k) {
    if (k < 1 || k > max_zero_index)
        throw range_error("airy zero index " + std::to_string(k) + " outside [1, 50]");

    // target(x) is Ai or Ai'; slope(x) its derivative (Ai'' = x Ai).
    auto target = [kind](double x) {
        const auto v = airy_eval({x, 0.0});
        return kind == ZeroKind::function ? v.ai.real() : v.ai_prime.real();
    };
    auto slope = [kind](double x) {
        const auto v = airy_eval({x, 0.0});
        return kind == ZeroKind::function ? v.ai_prime.real() : x * v.ai.real();
    };

    const double guess = zero_guess(kind, k);
    const double spacing = std::numbers::pi / std::sqrt(std::max(std::abs(guess), 1.0));
    double lo = guess - 0.3 * spacing;
    double hi = std::min(guess + 0.3 * spacing, 0.0);
    double flo = target(lo), fhi = target(hi);
    if (flo * fhi > 0.0)
        throw numeric_error("airy zero " + std::to_string(k) + ": initial guess not bracketed");

    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = target(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    double x = 0.5 * (lo + hi);
    const double bracket_lo = lo - 1e-9, bracket_hi = hi + 1e-9;
    for (int it = 0; it < 100; ++it) {
        const double fx = target(x);
        const double step = fx / slope(x);
        const double next = x - step;
        if (next < bracket_lo || next > bracket_hi)
            throw numeric_error("airy zero " + std::to_string(k) + ": Newton left the bracket");
        x = next;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            if (std::abs(target(x)) > 1e-12)
                throw numeric_error("airy zero " + std::to_string(k) + ": residual above 1e-12");
            return {kind, k, x};
        }
    }
    throw numeric_error("airy zero " + std::to_string(k) + ": Newton did not converge in 100 iterations");
}

}  // namespace detail

/// k-th negative zero a_k of Ai, 1 <= k <= 50.
inline AiryZero airy_function_zero(int k) { return detail::refine_zero(ZeroKind::function, k); }

/// k-th negative zero a'_k of Ai', 1 <= k <= 50.
inline AiryZero airy_derivative_zero(int k) { return detail::refine_zero(ZeroKind::derivative, k); }

}  // namespace lrwell::airy
