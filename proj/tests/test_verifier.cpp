#include <lrwell/verifier.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lrwell;

namespace {

const TimeProfile& unit_profile() {
    static const TimeProfile p(ConstantMass{1.0}, ConstantCoupling{1.0}, 1.0);
    return p;
}
const TimeProfile& free_profile() {
    static const TimeProfile p(ConstantMass{1.0}, ZeroCoupling{}, 1.0);
    return p;
}
const TimeProfile& exp_cos_profile() {
    static const TimeProfile p(ExponentialMass{1.0, 1.0}, SinusoidalCoupling{1.0, 1.0}, 1.0);
    return p;
}

const Grid1D& vn_grid() {
    static const Grid1D g = Grid1D::make(0.0, 10.0, 0.005);
    return g;
}

std::vector<std::vector<cplx>> dense(const BandedMatrix& a) {
    std::vector<std::vector<cplx>> out(a.size(), std::vector<cplx>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out[i][j] = a(i, j);
    return out;
}

BandedMatrix random_banded(std::size_t n, int bw, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BandedMatrix a(n, bw);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a.in_band(i, j)) a.at(i, j) = cplx{u(rng), u(rng)};
    return a;
}

double l2_norm(const std::vector<cplx>& v, double dx) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s * dx);
}

WavefunctionSample gaussian(const Grid1D& grid, double sigma) {
    WavefunctionSample s{0, 0.0, grid.nodes(), {}, {}};
    for (double x : s.x) {
        s.values.push_back(std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) * std::exp(-x * x / (4 * sigma * sigma)));
        s.regions.push_back(x >= 0.0 ? Region::positive : Region::negative);
    }
    return s;
}

}  // namespace

TEST(Grid, ConstructionAndZeroNode) {
    const Grid1D g = Grid1D::make(-20.0, 20.0, 0.01);
    EXPECT_EQ(g.n_points, 4001u);
    ASSERT_TRUE(g.zero_index().has_value());
    EXPECT_EQ(*g.zero_index(), 2000u);
    EXPECT_EQ(g.x(2000), 0.0);
    EXPECT_DOUBLE_EQ(g.x(0), -20.0);
    EXPECT_DOUBLE_EQ(g.x(4000), 20.0);
    const Grid1D right = g.half(Region::positive), left = g.half(Region::negative);
    EXPECT_EQ(right.n_points, 2001u);
    EXPECT_EQ(right.x(0), 0.0);
    EXPECT_EQ(left.x(left.n_points - 1), 0.0);
    EXPECT_THROW(Grid1D::make(-1.0, 1.0, 0.3), domain_error);
    EXPECT_THROW(Grid1D::make(-1.05, 0.95, 0.1), domain_error);
    EXPECT_THROW(Grid1D::make(1.0, -1.0, 0.1), domain_error);
    EXPECT_THROW(Grid1D::from_nodes({0.0, 0.1, 0.3}), domain_error);
    EXPECT_FALSE(Grid1D::make(1.0, 2.0, 0.5).zero_index().has_value());
}

TEST(Hamiltonian, TridiagonalStructure) {
    const Grid1D g = Grid1D::make(-1.0, 1.0, 0.1);
    const auto h = build_hamiltonian(exp_cos_profile(), 0.5, g);
    const double m = std::exp(0.5), f = std::cos(0.5);
    EXPECT_EQ(h.bandwidth(), 1);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        EXPECT_NEAR(h(i, i).real(), 1.0 / (m * g.dx * g.dx), 1e-9);
        EXPECT_NEAR(h(i, i).imag(), f * std::abs(g.x(i)), 1e-14);
        if (i + 1 < g.n_points) {
            EXPECT_NEAR(h(i, i + 1).real(), -0.5 / (m * g.dx * g.dx), 1e-9);
            EXPECT_EQ(h(i, i + 1), h(i + 1, i));
        }
    }
    const auto real = build_hamiltonian(exp_cos_profile(), 0.5, g, PotentialKind::real);
    EXPECT_NEAR(real(3, 3).imag(), 0.0, 1e-15);
}

TEST(Hamiltonian, RealPotentialWithHalfMassIsTheInvariant) {
    // m = 1/2, f = 1 gives p^2 + |x|, whose eigenfunctions are phi_n.
    const TimeProfile p(ConstantMass{0.5}, ConstantCoupling{1.0}, 1.0);
    const Grid1D g = Grid1D::make(-20.0, 20.0, 0.01);
    const auto h = build_hamiltonian(p, 0.2, g, PotentialKind::real);
    for (int n = 0; n <= 3; ++n) {
        std::vector<cplx> phi(g.n_points);
        for (std::size_t i = 0; i < g.n_points; ++i) phi[i] = eigenfunction(n, g.x(i));
        auto r = h.apply(phi);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= level(n).lambda * phi[i];
        EXPECT_LE(detail::l2_ratio(r, phi, 1, g.n_points - 1, g.zero_index()), 1e-4) << n;
    }
}

TEST(Banded, ProductAndApplyMatchDense) {
    std::mt19937_64 rng(3);
    const auto a = random_banded(7, 1, rng), b = random_banded(7, 2, rng);
    const auto c = product(a, b);
    EXPECT_EQ(c.bandwidth(), 3);
    const auto da = dense(a), db = dense(b);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) {
            cplx s{};
            for (std::size_t k = 0; k < 7; ++k) s += da[i][k] * db[k][j];
            EXPECT_LT(std::abs(c(i, j) - s), 1e-14);
        }
    std::vector<cplx> v{1.0, {0.0, 1.0}, -2.0, 0.5, {1.0, 1.0}, 3.0, -1.0};
    const auto av = a.apply(v);
    for (std::size_t i = 0; i < 7; ++i) {
        cplx s{};
        for (std::size_t k = 0; k < 7; ++k) s += da[i][k] * v[k];
        EXPECT_LT(std::abs(av[i] - s), 1e-14);
    }
    const auto sum = a + b;
    EXPECT_EQ(sum.bandwidth(), 2);
    EXPECT_EQ(sum(2, 4), b(2, 4));
    EXPECT_EQ(sum(2, 3), a(2, 3) + b(2, 3));
    EXPECT_THROW(a.apply(std::vector<cplx>(3)), domain_error);
    BandedMatrix copy = a;
    EXPECT_THROW(copy.at(0, 3), range_error);
}

TEST(Banded, TridiagonalSolveAgainstResidual) {
    std::mt19937_64 rng(11);
    auto a = random_banded(50, 1, rng);
    for (std::size_t i = 0; i < 50; ++i) a.at(i, i) += 4.0;
    std::vector<cplx> rhs(50);
    for (std::size_t i = 0; i < 50; ++i) rhs[i] = cplx{std::sin(i * 1.0), std::cos(i * 0.3)};
    const auto x = solve_tridiagonal(a, rhs);
    const auto back = a.apply(x);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_LT(std::abs(back[i] - rhs[i]), 1e-13);
}

TEST(Banded, ZeroPivotIsReported) {
    BandedMatrix a(3, 1);
    a.at(0, 1) = 1.0;
    a.at(1, 0) = 1.0;
    a.at(1, 1) = 1.0;
    a.at(2, 2) = 1.0;
    EXPECT_THROW(solve_tridiagonal(a, {1.0, 1.0, 1.0}), numeric_error);
}

TEST(CrankNicolson, UnitaryForRealPotential) {
    const Grid1D g = Grid1D::make(-10.0, 10.0, 0.02);
    auto state = gaussian(g, 1.0);
    const double start = l2_norm(state.values, g.dx);
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
        const auto r = crank_nicolson_propagate(free_profile(), state, s * 1e-3, (s + 1) * 1e-3, 1e-3,
                                                {PotentialKind::imaginary, false});
        state = r.final_state;
        worst = std::max(worst, std::abs(l2_norm(state.values, g.dx) - start));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(CrankNicolson, RejectsLargeStepsAndCflViolations) {
    const Grid1D g = Grid1D::make(-1.0, 1.0, 0.001);
    const auto state = gaussian(g, 0.2);
    EXPECT_THROW(crank_nicolson_propagate(free_profile(), state, 0.0, 0.1, 2e-3), domain_error);
    EXPECT_THROW(crank_nicolson_propagate(free_profile(), state, 0.0, 0.1, 1e-3), domain_error);
    EXPECT_THROW(crank_nicolson_propagate(free_profile(), state, 0.0, 1.5, 1e-5), domain_error);
    EXPECT_THROW(crank_nicolson_propagate(free_profile(), state, 0.5, 0.1, 1e-5), domain_error);
}

namespace {

double self_convergence_ratio(const TimeProfile& profile, const WavefunctionSample& initial) {
    std::vector<std::vector<cplx>> runs;
    for (double dt : {1e-3, 5e-4, 2.5e-4})
        runs.push_back(crank_nicolson_propagate(profile, initial, 0.0, 0.1, dt, {PotentialKind::imaginary, false})
                           .final_state.values);
    return max_deviation(runs[0], runs[1]) / max_deviation(runs[1], runs[2]);
}

}  // namespace

TEST(CrankNicolson, SecondOrderSelfConvergence) {
    const TimeProfile growing(ExponentialMass{1.0, 1.0}, ZeroCoupling{}, 1.0);
    const double smooth = self_convergence_ratio(growing, gaussian(Grid1D::make(-10.0, 10.0, 0.02), 1.0));
    EXPECT_GT(smooth, 3.9);
    EXPECT_LT(smooth, 4.1);
    const Grid1D coarse = Grid1D::make(-10.0, 10.0, 0.05);
    const auto start = ExactSolution(exp_cos_profile()).assemble_wavefunction(0, 0.0, coarse.nodes());
    const double kinked = self_convergence_ratio(exp_cos_profile(), start);
    EXPECT_GT(kinked, 3.5);
    EXPECT_LT(kinked, 4.5);
}

TEST(CrankNicolson, OrderReductionOnFineGridsWithImaginaryWell) {
    // Stiff modes excited by the kink of |x| degrade the observed order to about one.
    const Grid1D fine = Grid1D::make(-10.0, 10.0, 0.02);
    const auto start = ExactSolution(exp_cos_profile()).assemble_wavefunction(0, 0.0, fine.nodes());
    const double ratio = self_convergence_ratio(exp_cos_profile(), start);
    EXPECT_GT(ratio, 1.5);
    EXPECT_LT(ratio, 3.0);
}

TEST(CrankNicolson, FreeGaussianPacket) {
    const Grid1D g = Grid1D::make(-12.0, 12.0, 0.01);
    const double sigma = 1.0, t = 0.5;
    const auto r = crank_nicolson_propagate(free_profile(), gaussian(g, sigma), 0.0, t, 1e-3);
    const cplx spread = 1.0 + cplx{0.0, t / (2.0 * sigma * sigma)};
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i) {
        const double x = g.x(i);
        const cplx exact = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) / std::sqrt(spread) *
                           std::exp(-x * x / (4.0 * sigma * sigma * spread));
        worst = std::max(worst, std::abs(r.final_state.values[i] - exact));
    }
    EXPECT_LE(worst, 1e-4);
    EXPECT_EQ(r.steps, 500u);
    EXPECT_LE(r.max_local_error, 1e-6);
    EXPECT_LE(r.boundary_probe, 1e-10);
}

TEST(CrankNicolson, DivergenceIsReportedWithStep) {
    const Grid1D g = Grid1D::make(-1.0, 1.0, 0.1);
    auto state = gaussian(g, 0.3);
    state.values[5] = cplx{std::nan(""), 0.0};
    try {
        crank_nicolson_propagate(free_profile(), state, 0.0, 0.01, 1e-3);
        FAIL() << "expected numeric_error";
    } catch (const numeric_error& e) {
        EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
    }
}

TEST(Residuals, BranchResidualIsSecondOrderInDx) {
    for (Region r : {Region::positive, Region::negative}) {
        const double coarse = branch_tdse_residual(1, r, 0.4, Grid1D::make(-16.0, 16.0, 0.02).half(r), unit_profile());
        const double fine = branch_tdse_residual(1, r, 0.4, Grid1D::make(-16.0, 16.0, 0.01).half(r), unit_profile());
        EXPECT_LT(fine, coarse);
        EXPECT_GT(coarse / fine, 3.0);
        EXPECT_LT(coarse / fine, 5.0);
    }
}

TEST(Residuals, InvariantEigenResidual) {
    const Grid1D g = Grid1D::make(-20.0, 20.0, 0.01);
    for (const TimeProfile* p : {&unit_profile(), &exp_cos_profile()})
        for (Region r : {Region::positive, Region::negative})
            for (int n = 0; n <= 2; ++n) {
                EXPECT_LE(invariant_eigen_residual(n, r, 0.0, g.half(r), *p), 1e-4);
                EXPECT_LE(invariant_eigen_residual(n, r, 0.5, g.half(r), *p), 1e-3);
            }
}

TEST(Residuals, VonNeumannVanishesForZeroCoupling) {
    for (Region r : {Region::positive, Region::negative}) {
        const Grid1D half = r == Region::positive ? vn_grid() : Grid1D::make(-10.0, 0.0, 0.005);
        EXPECT_LE(von_neumann_residual(r, 0.5, half, free_profile()), 1e-6);
    }
}

TEST(Residuals, VonNeumannAtWindowEdgesAndFrozenControl) {
    EXPECT_LE(von_neumann_residual(Region::positive, 0.0, vn_grid(), unit_profile()), 1e-4);
    EXPECT_LE(von_neumann_residual(Region::positive, 1.0, vn_grid(), unit_profile()), 1e-4);
    EXPECT_LE(von_neumann_residual(Region::positive, 0.5, vn_grid(), unit_profile()), 1e-4);
    EXPECT_GT(von_neumann_residual(Region::positive, 0.5, vn_grid(), unit_profile(), {0.0, false, true}), 1e-4);
}

TEST(PseudoHermiticity, ExactCoefficientIdentity) {
    for (const TimeProfile* p : {&unit_profile(), &free_profile(), &exp_cos_profile()})
        for (Region r : {Region::positive, Region::negative}) {
            EXPECT_EQ(pseudo_hermiticity_check(0.0, r, *p), 0.0);
            for (double t : {0.2, 0.55, 1.0}) EXPECT_LE(pseudo_hermiticity_check(t, r, *p), 1e-12);
        }
}

TEST(PseudoHermiticity, NegativeControls) {
    for (Region r : {Region::positive, Region::negative}) {
        EXPECT_GE(pseudo_hermiticity_check(0.5, r, unit_profile(), {1e-3, false, false}), 1e-4);
        EXPECT_GE(pseudo_hermiticity_check(0.5, r, unit_profile(), {0.0, true, false}), 1e-4);
    }
}

TEST(NegativeControls, WrongSignKBreaksBranchEquation) {
    const Grid1D g = Grid1D::make(-20.0, 20.0, 0.01);
    for (const TimeProfile* p : {&unit_profile(), &exp_cos_profile()})
        for (Region r : {Region::positive, Region::negative})
            EXPECT_GT(branch_tdse_residual(0, r, 0.5, g.half(r), *p, {true}), 1e-1);
    // k vanishes identically when f = 0, so the control is inert there.
    EXPECT_LE(branch_tdse_residual(0, Region::positive, 0.5, g.half(Region::positive), free_profile(), {true}), 1e-4);
}
