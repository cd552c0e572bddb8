#pragma once

// Test-side reference implementations, independent of include/lrwell.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Ai and Ai' on the real line by direct Maclaurin summation in long double.
/// Accurate to ~1e-15 absolute for |x| <= 6.
struct AiryReal {
    long double ai, ai_prime;
};

inline AiryReal series_airy(long double x) {
    const long double c1 = 0.355028053887817239260063186004183176L;
    const long double c2 = 0.258819403792806798405183560189203963L;
    long double f = 0, g = 0, fp = 0, gp = 0;
    long double t = 1, u = x, e = 1, d = x * x / 2;
    const long double x3 = x * x * x;
    for (int k = 0; k < 120; ++k) {
        f += t;
        g += u;
        gp += e;
        if (k >= 1) fp += d;
        t *= x3 / ((3 * k + 3) * (3 * k + 2));
        u *= x3 / ((3 * k + 3) * (3 * k + 4));
        e *= x3 / ((3 * k + 3) * (3 * k + 1));
        if (k >= 1) d *= x3 / ((3 * k) * (3 * k + 2));
    }
    return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

/// Root of fn in [lo, hi] by bisection to width 1e-6, then Newton with slope dfn.
inline double bisect_newton(const std::function<long double(long double)>& fn,
                            const std::function<long double(long double)>& dfn, long double lo, long double hi) {
    long double flo = fn(lo);
    while (hi - lo > 1e-6L) {
        const long double mid = (lo + hi) / 2;
        const long double fm = fn(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    long double x = (lo + hi) / 2;
    for (int i = 0; i < 50; ++i) {
        const long double step = fn(x) / dfn(x);
        x -= step;
        if (std::fabs(step) < 1e-18L) break;
    }
    return static_cast<double>(x);
}

/// k-th zero of Ai (k = 1, 2) bracketed by a sign scan on [-6, 0].
inline double ai_zero(int k) {
    auto fn = [](long double x) { return series_airy(x).ai; };
    auto dfn = [](long double x) { return series_airy(x).ai_prime; };
    int found = 0;
    for (long double x = 0; x > -6; x -= 0.01L)
        if ((fn(x) < 0) != (fn(x - 0.01L) < 0) && ++found == k) return bisect_newton(fn, dfn, x - 0.01L, x);
    return std::nan("");
}

/// k-th zero of Ai' (k = 1, 2); Ai'' = x Ai.
inline double ai_prime_zero(int k) {
    auto fn = [](long double x) { return series_airy(x).ai_prime; };
    auto dfn = [](long double x) { return x * series_airy(x).ai; };
    int found = 0;
    for (long double x = 0; x > -6; x -= 0.01L)
        if ((fn(x) < 0) != (fn(x - 0.01L) < 0) && ++found == k) return bisect_newton(fn, dfn, x - 0.01L, x);
    return std::nan("");
}

/// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

}  // namespace oracle
