#include <lrwell/airy.hpp>
#include <lrwell/quadrature.hpp>

#include "airy_reference_values.hpp"
#include "oracles.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

using namespace lrwell;
using airy::cplx;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(AiryEval, OriginMatchesGammaClosedForm) {
    const auto v = airy::airy_eval(0.0);
    EXPECT_NEAR(v.ai.real(), 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0)), 1e-15);
    EXPECT_NEAR(v.ai_prime.real(), -1.0 / (std::pow(3.0, 1.0 / 3.0) * std::tgamma(1.0 / 3.0)), 1e-15);
    EXPECT_NEAR(v.bi.real(), airy_reference::bi_0, 1e-15);
    EXPECT_NEAR(v.bi_prime.real(), airy_reference::bi_prime_0, 1e-15);
}

TEST(AiryEval, UnitArgumentMatchesHighPrecisionSeries) {
    const auto v = airy::airy_eval(1.0);
    EXPECT_NEAR(v.ai.real(), airy_reference::ai_1, 1e-15);
    EXPECT_NEAR(v.ai_prime.real(), airy_reference::ai_prime_1, 1e-15);
    EXPECT_NEAR(v.bi.real(), airy_reference::bi_1, 2e-15);
    EXPECT_NEAR(v.bi_prime.real(), airy_reference::bi_prime_1, 2e-15);
    EXPECT_EQ(v.ai.imag(), 0.0);
}

TEST(AiryEval, ComplexSpotValues) {
    for (const auto& s : airy_reference::spot_values) {
        SCOPED_TRACE(::testing::Message() << "z = " << s.z);
        const auto v = airy::airy_eval(s.z);
        EXPECT_LT(rel(v.ai, s.ai), 1e-13);
        EXPECT_LT(rel(v.ai_prime, s.ai_prime), 1e-13);
        EXPECT_LT(rel(v.bi, s.bi), 1e-13);
        EXPECT_LT(rel(v.bi_prime, s.bi_prime), 1e-13);
    }
}

TEST(AiryEval, RealAxisAgreesWithBoost) {
    for (double x = -30.0; x <= 30.0; x += 0.37) {
        const auto v = airy::airy_eval(x);
        const double ai_scale = x < 0.0 ? 1.0 : std::abs(boost::math::airy_ai(x));
        EXPECT_LT(std::abs(v.ai.real() - boost::math::airy_ai(x)), 2e-12 * ai_scale) << x;
        EXPECT_LT(std::abs(v.bi.real() - boost::math::airy_bi(x)), 1e-12 * std::max(std::abs(boost::math::airy_bi(x)), 0.5))
            << x;
    }
}

TEST(AiryEval, OdeResidualByFiniteDifferences) {
    const double h = 1e-4;
    for (cplx z : {cplx{0.5, 0.3}, cplx{-3.0, 1.0}, cplx{2.0, -2.0}, cplx{-6.0, -0.5}, cplx{9.0, 4.0}, cplx{-15.0, 2.0}}) {
        const auto lo = airy::airy_eval(z - h), mid = airy::airy_eval(z), hi = airy::airy_eval(z + h);
        const cplx d2_ai = (hi.ai - 2.0 * mid.ai + lo.ai) / (h * h);
        const cplx d2_bi = (hi.bi - 2.0 * mid.bi + lo.bi) / (h * h);
        EXPECT_LT(std::abs(d2_ai - z * mid.ai), 1e-6 * std::abs(z * mid.ai)) << z;
        EXPECT_LT(std::abs(d2_bi - z * mid.bi), 1e-6 * std::abs(z * mid.bi)) << z;
        // First derivatives against the returned primes.
        EXPECT_LT(std::abs((hi.ai - lo.ai) / (2 * h) - mid.ai_prime), 1e-6 * std::abs(mid.ai_prime)) << z;
    }
}

TEST(AiryEval, SeriesAndAsymptoticOverlap) {
    double worst = 0.0;
    for (double r : {7.0, 7.2, 7.5})
        for (int k = 0; k < 48; ++k) {
            const cplx z = std::polar(r, -std::numbers::pi + 2.0 * std::numbers::pi * k / 48.0);
            const auto s = airy::airy_series(z), a = airy::airy_asymptotic(z);
            worst = std::max({worst, rel(s.ai, a.ai), rel(s.ai_prime, a.ai_prime), rel(s.bi, a.bi),
                              rel(s.bi_prime, a.bi_prime)});
        }
    EXPECT_LT(worst, 1e-10);
}

TEST(AiryEval, ContinuousAcrossSwitchRadius) {
    for (int k = 0; k < 24; ++k) {
        const cplx dir = std::polar(1.0, 2.0 * std::numbers::pi * k / 24.0);
        const auto in = airy::airy_eval(dir * (airy::series_radius - 1e-9));
        const auto out = airy::airy_eval(dir * (airy::series_radius + 1e-9));
        const cplx step = dir * 2e-9;
        EXPECT_LT(rel(in.ai + step * in.ai_prime, out.ai), 1e-9);
        EXPECT_LT(rel(in.bi + step * in.bi_prime, out.bi), 1e-9);
    }
}

TEST(AiryEval, WronskianScaleRelativeOnLattice) {
    // Relative to the size of the two products, which is what double rounding permits.
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const cplx z{-8.0 + 16.0 * i / 9.0, -8.0 + 16.0 * j / 9.0};
            const auto v = airy::airy_eval(z);
            const cplx a = v.ai * v.bi_prime, b = v.ai_prime * v.bi;
            const double scale = std::max({1.0 / std::numbers::pi, std::abs(a), std::abs(b)});
            EXPECT_LT(std::abs(a - b - 1.0 / std::numbers::pi) / scale, 1e-13) << z;
        }
}

TEST(AiryEval, WronskianNearRealAxis) {
    for (double x = -10.0; x <= 10.0; x += 0.25)
        for (double y : {0.0, 0.5}) {
            const auto v = airy::airy_eval(cplx{x, y});
            EXPECT_LT(std::abs(v.ai * v.bi_prime - v.ai_prime * v.bi - 1.0 / std::numbers::pi) * std::numbers::pi, 1e-10)
                << x << " " << y;
        }
}

TEST(AiryEval, RangeErrors) {
    EXPECT_THROW(airy::airy_eval(cplx{40.5, 0.0}), range_error);
    EXPECT_THROW(airy::airy_eval(cplx{30.0, 30.0}), range_error);
    EXPECT_THROW(airy::airy_eval(cplx{std::nan(""), 0.0}), range_error);
    EXPECT_NO_THROW(airy::airy_eval(cplx{-40.0, 0.0}));
}

TEST(AiryEval, ConcurrentCallsAgree) {
    std::vector<cplx> results(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < results.size(); ++i)
        threads.emplace_back([&results, i] { results[i] = airy::airy_eval(cplx{6.9, 0.1}).ai; });
    for (auto& t : threads) t.join();
    for (const auto& r : results) EXPECT_EQ(r, results[0]);
}

TEST(AiryZeros, FirstZerosMatchSeriesBisectionOracle) {
    EXPECT_NEAR(airy::airy_function_zero(1).location, oracle::ai_zero(1), 1e-12);
    EXPECT_NEAR(airy::airy_function_zero(2).location, oracle::ai_zero(2), 1e-12);
    EXPECT_NEAR(airy::airy_derivative_zero(1).location, oracle::ai_prime_zero(1), 1e-12);
    EXPECT_NEAR(airy::airy_derivative_zero(2).location, oracle::ai_prime_zero(2), 1e-12);
    EXPECT_NEAR(airy::airy_function_zero(1).location, -2.3381074105, 1e-10);
    EXPECT_NEAR(airy::airy_derivative_zero(1).location, -1.0187929716, 1e-10);
}

TEST(AiryZeros, MatchFrozenReferenceAndBoost) {
    for (const auto& z : airy_reference::zeros) {
        EXPECT_NEAR(airy::airy_function_zero(z.k).location, z.function, 1e-12 * std::abs(z.function));
        EXPECT_NEAR(airy::airy_derivative_zero(z.k).location, z.derivative, 1e-12 * std::abs(z.derivative));
    }
    for (int k = 1; k <= 50; ++k)
        EXPECT_NEAR(airy::airy_function_zero(k).location, boost::math::airy_ai_zero<double>(k), 1e-11) << k;
}

TEST(AiryZeros, ResidualsSignsAndOrdering) {
    double prev_f = 0.0, prev_d = 0.0;
    for (int k = 1; k <= 50; ++k) {
        const auto f = airy::airy_function_zero(k), d = airy::airy_derivative_zero(k);
        EXPECT_EQ(f.kind, airy::ZeroKind::function);
        EXPECT_EQ(d.kind, airy::ZeroKind::derivative);
        EXPECT_EQ(f.index, k);
        EXPECT_LT(f.location, 0.0);
        EXPECT_LT(d.location, 0.0);
        EXPECT_LT(std::abs(airy::ai(f.location)), 1e-12);
        EXPECT_LT(std::abs(airy::ai_prime(d.location)), 1e-12);
        EXPECT_LT(f.location, prev_f);
        EXPECT_LT(d.location, prev_d);
        prev_f = f.location;
        prev_d = d.location;
    }
}

TEST(AiryZeros, DerivativeVanishesAtDerivativeZero) {
    EXPECT_LT(std::abs(airy::airy_eval(airy::airy_derivative_zero(1).location).ai_prime), 1e-10);
}

TEST(AiryZeros, Interlacing) {
    for (int k = 1; k <= 20; ++k) {
        EXPECT_GT(airy::airy_derivative_zero(k).location, airy::airy_function_zero(k).location);
        EXPECT_GT(airy::airy_function_zero(k).location, airy::airy_derivative_zero(k + 1).location);
    }
}

TEST(AiryZeros, IndexOutOfRange) {
    EXPECT_THROW(airy::airy_function_zero(0), range_error);
    EXPECT_THROW(airy::airy_function_zero(51), range_error);
    EXPECT_THROW(airy::airy_derivative_zero(-1), range_error);
}

TEST(AiryQuadrature, SquareIntegralIdentity) {
    for (double a : {airy::airy_derivative_zero(1).location, airy::airy_function_zero(1).location, -1.0, 0.0, 1.0}) {
        double upper = std::max(a, 0.0);
        while (std::pow(airy::ai(upper), 2) >= 1e-30) upper += 0.5;
        auto integrand = [](double x) { return std::pow(airy::ai(x), 2); };
        const double lhs = integrate(integrand, a, upper).value;
        const double rhs = std::pow(airy::ai_prime(a), 2) - a * std::pow(airy::ai(a), 2);
        EXPECT_NEAR(lhs, rhs, 1e-8) << a;
        EXPECT_NEAR(oracle::simpson(integrand, a, upper, 4000), rhs, 1e-8) << a;
    }
}
