#pragma once

// Grid oracles: Crank-Nicolson propagation, TDSE and invariant residuals,
// coefficient-level pseudo-Hermiticity.

#include <lrwell/banded.hpp>
#include <lrwell/errors.hpp>
#include <lrwell/exact_solution.hpp>
#include <lrwell/spectrum.hpp>
#include <lrwell/time_profile.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lrwell {

/// Uniform grid on [x_min, x_max]; when 0 is inside the interval it is a node.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t n_points;
    double dx;

    static Grid1D make(double x_min, double x_max, double dx) {
        if (!(dx > 0.0) || !(x_max > x_min)) throw domain_error("grid needs dx > 0 and x_max > x_min");
        const double span = (x_max - x_min) / dx;
        const double intervals = std::round(span);
        if (std::abs(span - intervals) > 1e-9 * std::max(1.0, span))
            throw domain_error("grid: (x_max - x_min)/dx is not an integer");
        if (x_min <= 0.0 && x_max >= 0.0) {
            const double offset = -x_min / dx;
            if (std::abs(offset - std::round(offset)) > 1e-9 * std::max(1.0, offset))
                throw domain_error("grid: x = 0 is not a node");
        }
        return {x_min, x_max, static_cast<std::size_t>(intervals) + 1, dx};
    }

    static Grid1D from_nodes(const std::vector<double>& x) {
        if (x.size() < 3) throw domain_error("grid needs at least three nodes");
        const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
        for (std::size_t i = 1; i < x.size(); ++i)
            if (std::abs(x[i] - x[i - 1] - dx) > 1e-9 * dx) throw domain_error("grid nodes are not uniform");
        return make(x.front(), x.back(), dx);
    }

    /// Region half of this grid: [0, x_max] or [x_min, 0].
    Grid1D half(Region region) const {
        return region == Region::positive ? make(0.0, x_max, dx) : make(x_min, 0.0, dx);
    }

    double x(std::size_t i) const {
        if (x_min <= 0.0 && x_max >= 0.0) {
            const auto zero = static_cast<long>(std::llround(-x_min / dx));
            return static_cast<double>(static_cast<long>(i) - zero) * dx;
        }
        return x_min + static_cast<double>(i) * dx;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_points);
        for (std::size_t i = 0; i < n_points; ++i) out[i] = x(i);
        return out;
    }

    std::optional<std::size_t> zero_index() const {
        if (x_min > 0.0 || x_max < 0.0) return std::nullopt;
        return static_cast<std::size_t>(std::llround(-x_min / dx));
    }
};

// Dirichlet finite-difference building blocks.

inline BandedMatrix identity_operator(const Grid1D& grid) {
    BandedMatrix out(grid.n_points, 1);
    for (std::size_t i = 0; i < grid.n_points; ++i) out.at(i, i) = 1.0;
    return out;
}

/// 3-point second difference.
inline BandedMatrix second_difference(const Grid1D& grid) {
    BandedMatrix out(grid.n_points, 1);
    const double h2 = 1.0 / (grid.dx * grid.dx);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        out.at(i, i) = -2.0 * h2;
        if (i > 0) out.at(i, i - 1) = h2;
        if (i + 1 < grid.n_points) out.at(i, i + 1) = h2;
    }
    return out;
}

/// Central first difference.
inline BandedMatrix first_difference(const Grid1D& grid) {
    BandedMatrix out(grid.n_points, 1);
    const double h = 0.5 / grid.dx;
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        if (i > 0) out.at(i, i - 1) = -h;
        if (i + 1 < grid.n_points) out.at(i, i + 1) = h;
    }
    return out;
}

inline BandedMatrix position_operator(const Grid1D& grid, bool absolute = false) {
    BandedMatrix out(grid.n_points, 1);
    for (std::size_t i = 0; i < grid.n_points; ++i) out.at(i, i) = absolute ? std::abs(grid.x(i)) : grid.x(i);
    return out;
}

/// p = -i D1
inline BandedMatrix momentum_operator(const Grid1D& grid) { return cplx{0.0, -1.0} * first_difference(grid); }

/// p^2 = -D2
inline BandedMatrix momentum_squared(const Grid1D& grid) { return -1.0 * second_difference(grid); }

enum class PotentialKind { imaginary, real };

/// H = p^2/(2m) + i f |x|, or + f |x| for the real-potential code path.
inline BandedMatrix build_hamiltonian(const TimeProfile& profile, double t, const Grid1D& grid,
                                      PotentialKind kind = PotentialKind::imaginary) {
    const double m = profile.mass(t);
    if (!(m > 0.0)) throw domain_error("non-positive mass at t = " + std::to_string(t));
    const double f = profile.coupling(t);
    const cplx strength = kind == PotentialKind::imaginary ? cplx{0.0, f} : cplx{f, 0.0};
    BandedMatrix h = (1.0 / (2.0 * m)) * momentum_squared(grid);
    for (std::size_t i = 0; i < grid.n_points; ++i) h.at(i, i) += strength * std::abs(grid.x(i));
    return h;
}

/// c0 p^2 + c1 x + c2 p + c3 on a region grid.
inline BandedMatrix invariant_operator(const InvariantCoefficients& ic, const Grid1D& grid) {
    BandedMatrix out = ic.p2() * momentum_squared(grid);
    out += ic.x() * position_operator(grid);
    out += ic.p() * momentum_operator(grid);
    out += ic.constant() * identity_operator(grid);
    return out;
}

/// rho_j I_j rho_j^{-1} = p^2 +/- g p +/- x (upper sign region 1).
inline BandedMatrix hermitian_invariant_operator(const CoefficientSet& cs, Region region, const Grid1D& grid) {
    const double sigma = region == Region::positive ? 1.0 : -1.0;
    BandedMatrix out = momentum_squared(grid);
    out += (sigma * cs.g) * momentum_operator(grid);
    out += cplx{sigma} * position_operator(grid);
    return out;
}

/// Deliberate corruptions used by negative controls.
struct Perturbation {
    double alpha_shift = 0.0;
    bool flip_k_sign = false;
    bool freeze_beta3 = false;
};

// Norm helpers over a row range, skipping listed indices.
namespace detail {

inline double l2_ratio(const std::vector<cplx>& r, const std::vector<cplx>& ref, std::size_t first, std::size_t last,
                       std::optional<std::size_t> skip = std::nullopt) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        if (skip && *skip == i) continue;
        num += std::norm(r[i]);
        den += std::norm(ref[i]);
    }
    if (!(den > 0.0)) throw numeric_error("residual reference norm vanishes");
    return std::sqrt(num / den);
}

inline std::vector<cplx> branch_values(const ExactSolution& sol, int n, Region region, const Grid1D& grid, double t) {
    std::vector<cplx> out(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) out[i] = sol.branch_value(n, region, grid.x(i), t);
    return out;
}

}  // namespace detail

struct PropagationOptions {
    PotentialKind potential = PotentialKind::imaginary;
    bool estimate_local_error = true;
};

struct PropagationResult {
    WavefunctionSample final_state;
    double max_local_error;
    std::vector<double> local_error;
    double boundary_probe;  // max |psi| two nodes from either edge
    double wall_seconds;
    std::size_t steps;
    double dt;
};

namespace detail {

// One CN step (1 + i h/2 H) psi+ = (1 - i h/2 H) psi with H at the step midpoint.
// Same matrices as build_hamiltonian, assembled into reused buffers.
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(const TimeProfile& profile, const Grid1D& grid, PotentialKind kind)
        : profile_(&profile), kind_(kind), abs_x_(grid.n_points), dx2_(grid.dx * grid.dx), upper_(grid.n_points),
          rhs_(grid.n_points) {
        for (std::size_t i = 0; i < grid.n_points; ++i) abs_x_[i] = std::abs(grid.x(i));
    }

    void step(double t, double h, const std::vector<cplx>& psi, std::vector<cplx>& out) {
        const double tm = t + 0.5 * h;
        const double m = profile_->mass(tm);
        if (!(m > 0.0)) throw domain_error("non-positive mass at t = " + std::to_string(tm));
        const double f = profile_->coupling(tm);
        const cplx strength = kind_ == PotentialKind::imaginary ? cplx{0.0, f} : cplx{f, 0.0};
        const cplx ih2{0.0, 0.5 * h};
        const double kinetic = 1.0 / (2.0 * m * dx2_);
        const cplx off = ih2 * -kinetic;  // i h/2 H_{i,i+1}
        const std::size_t n = psi.size();
        out.resize(n);

        for (std::size_t i = 0; i < n; ++i) {
            const cplx diag = ih2 * (2.0 * kinetic + strength * abs_x_[i]);
            cplx r = (1.0 - diag) * psi[i];
            if (i > 0) r -= off * psi[i - 1];
            if (i + 1 < n) r -= off * psi[i + 1];
            rhs_[i] = r;
        }
        cplx pivot = 1.0 + ih2 * (2.0 * kinetic + strength * abs_x_[0]);
        check_pivot(pivot, 0);
        cplx inv = reciprocal(pivot);
        upper_[0] = off * inv;
        rhs_[0] *= inv;
        for (std::size_t i = 1; i < n; ++i) {
            pivot = 1.0 + ih2 * (2.0 * kinetic + strength * abs_x_[i]) - off * upper_[i - 1];
            check_pivot(pivot, i);
            inv = reciprocal(pivot);
            upper_[i] = off * inv;
            rhs_[i] = (rhs_[i] - off * rhs_[i - 1]) * inv;
        }
        out[n - 1] = rhs_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) out[i] = rhs_[i] - upper_[i] * out[i + 1];
    }

private:
    // Pivots here are O(1) in modulus, so the unscaled formula is safe.
    static cplx reciprocal(cplx p) { return std::conj(p) / std::norm(p); }

    static void check_pivot(cplx p, std::size_t row) {
        if (std::norm(p) == 0.0) throw numeric_error("tridiagonal solve: zero pivot at row " + std::to_string(row));
    }

    const TimeProfile* profile_;
    PotentialKind kind_;
    std::vector<double> abs_x_;
    double dx2_;
    std::vector<cplx> upper_, rhs_;
};

}  // namespace detail

/// Crank-Nicolson from t0 to t1 with H evaluated at each step midpoint.
inline PropagationResult crank_nicolson_propagate(const TimeProfile& profile, const WavefunctionSample& initial,
                                                  double t0, double t1, double dt, PropagationOptions options = {}) {
    const auto started = std::chrono::steady_clock::now();
    if (!(dt > 0.0) || dt > 1e-3) throw domain_error("crank_nicolson_propagate: dt must be in (0, 1e-3]");
    if (!(t1 >= t0)) throw domain_error("crank_nicolson_propagate: t1 < t0");
    (void)profile.mass(t0);
    (void)profile.mass(t1);
    const Grid1D grid = Grid1D::from_nodes(initial.x);
    if (initial.values.size() != grid.n_points) throw domain_error("initial state size does not match its grid");

    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
    const double h = steps > 0 ? (t1 - t0) / static_cast<double>(steps) : 0.0;

    double m_min = profile.mass(t0);
    for (std::size_t s = 0; s < steps; ++s) m_min = std::min(m_min, profile.mass(t0 + (static_cast<double>(s) + 0.5) * h));
    m_min = std::min(m_min, profile.mass(t1));
    if (h / (grid.dx * grid.dx) > 10.0 * m_min)
        throw domain_error("crank_nicolson_propagate: dt/dx^2 exceeds 10 m_min");

    std::vector<cplx> psi = initial.values, next, half, halves;
    PropagationResult out{{initial.n, t1, initial.x, {}, initial.regions}, 0.0, {}, 0.0, 0.0, steps, h};
    out.local_error.reserve(steps);
    detail::CrankNicolsonStepper stepper(profile, grid, options.potential);
    const std::size_t probe_lo = 2, probe_hi = grid.n_points - 3;
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = t0 + static_cast<double>(s) * h;
        stepper.step(t, h, psi, next);
        if (options.estimate_local_error) {
            // Step doubling: |full - two halves| / 3 estimates the local error of the halved pair.
            stepper.step(t, 0.5 * h, psi, half);
            stepper.step(t + 0.5 * h, 0.5 * h, half, halves);
            double worst = 0.0;
            for (std::size_t i = 0; i < psi.size(); ++i) worst = std::max(worst, std::norm(next[i] - halves[i]));
            worst = std::sqrt(worst) / 3.0;
            out.local_error.push_back(worst);
            out.max_local_error = std::max(out.max_local_error, worst);
        }
        for (std::size_t i = 0; i < next.size(); ++i)
            if (!std::isfinite(next[i].real()) || !std::isfinite(next[i].imag()))
                throw numeric_error("crank_nicolson_propagate: divergence at step " + std::to_string(s + 1) + ", node " +
                                    std::to_string(i));
        out.boundary_probe = std::max({out.boundary_probe, std::abs(next[probe_lo]), std::abs(next[probe_hi])});
        std::swap(psi, next);
    }
    out.final_state.values = std::move(psi);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

inline double max_deviation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) throw domain_error("max_deviation: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline constexpr double tdse_time_step = 1e-5;

/// ||i dPsi/dt - H Psi||_2 / ||Psi||_2 for the glued solution on the full grid.
/// Interior nodes only: three nodes dropped at each edge, plus x = 0 for odd n.
inline double tdse_residual(int n, double t, const Grid1D& grid, const TimeProfile& profile, SolutionOptions options = {}) {
    const ExactSolution sol(profile, options);
    const auto x = grid.nodes();
    const auto plus = sol.assemble_wavefunction(n, t + tdse_time_step, x);
    const auto minus = sol.assemble_wavefunction(n, t - tdse_time_step, x);
    const auto now = sol.assemble_wavefunction(n, t, x);
    const auto hpsi = build_hamiltonian(profile, t, grid).apply(now.values);
    std::vector<cplx> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        r[i] = cplx{0.0, 1.0} * (plus.values[i] - minus.values[i]) / (2.0 * tdse_time_step) - hpsi[i];
    const auto skip = level(n).parity == Parity::odd ? grid.zero_index() : std::nullopt;
    return detail::l2_ratio(r, now.values, 3, x.size() - 3, skip);
}

/// TDSE residual of branch j alone on its half grid, interior rows.
inline double branch_tdse_residual(int n, Region region, double t, const Grid1D& half_grid, const TimeProfile& profile,
                                   SolutionOptions options = {}) {
    const ExactSolution sol(profile, options);
    const auto plus = detail::branch_values(sol, n, region, half_grid, t + tdse_time_step);
    const auto minus = detail::branch_values(sol, n, region, half_grid, t - tdse_time_step);
    const auto now = detail::branch_values(sol, n, region, half_grid, t);
    const auto hpsi = build_hamiltonian(profile, t, half_grid).apply(now);
    std::vector<cplx> r(now.size());
    for (std::size_t i = 0; i < now.size(); ++i)
        r[i] = cplx{0.0, 1.0} * (plus[i] - minus[i]) / (2.0 * tdse_time_step) - hpsi[i];
    return detail::l2_ratio(r, now, 1, now.size() - 1);
}

/// ||I_j^ph Psi_{n,j} - lambda_n Psi_{n,j}||_2 / ||Psi_{n,j}||_2 on a region grid.
inline double invariant_eigen_residual(int n, Region region, double t, const Grid1D& half_grid,
                                       const TimeProfile& profile, SolutionOptions options = {}) {
    const ExactSolution sol(profile, options);
    const auto psi = detail::branch_values(sol, n, region, half_grid, t);
    auto r = invariant_operator(invariant_coefficients(profile, t, region), half_grid).apply(psi);
    const double lambda = level(n).lambda;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * psi[i];
    return detail::l2_ratio(r, psi, 1, r.size() - 1);
}

/// Residual of the Hermitian invariant on U_j phi_n: checks the position action of U_j.
inline double hermitian_invariant_residual(int n, Region region, double t, const Grid1D& half_grid,
                                           const TimeProfile& profile) {
    const ExactSolution sol(profile);
    std::vector<cplx> phi(half_grid.n_points);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = sol.transformed_eigenfunction(n, region, half_grid.x(i), t);
    auto r = hermitian_invariant_operator(profile.coefficients_at(t), region, half_grid).apply(phi);
    const double lambda = level(n).lambda;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * phi[i];
    return detail::l2_ratio(r, phi, 1, r.size() - 1);
}

inline constexpr double von_neumann_time_step = 1e-5;

/// Row-sum norm of dI/dt - i[I, H] relative to ||H||, interior rows of a region grid.
/// Central difference in t; one-sided within one step of either window edge.
inline double von_neumann_residual(Region region, double t, const Grid1D& half_grid, const TimeProfile& profile,
                                   Perturbation perturbation = {}) {
    const cplx frozen = invariant_coefficients(profile, t, region).p();
    auto invariant_at = [&](double tau) {
        auto ic = invariant_coefficients(profile, tau, region);
        if (perturbation.freeze_beta3) ic.c[2] = frozen;
        return invariant_operator(ic, half_grid);
    };
    const double delta = von_neumann_time_step;
    double lo = t - delta, hi = t + delta;
    if (lo < 0.0) lo = t;
    if (hi > profile.window_end()) hi = t;
    if (hi == lo) throw domain_error("von_neumann_residual: time window shorter than the difference step");
    BandedMatrix d_inv = invariant_at(hi);
    d_inv -= invariant_at(lo);
    d_inv *= 1.0 / (hi - lo);

    const BandedMatrix inv = invariant_at(t);
    const BandedMatrix ham = build_hamiltonian(profile, t, half_grid);
    BandedMatrix commutator = product(inv, ham);
    commutator -= product(ham, inv);
    BandedMatrix residual = d_inv - cplx{0.0, 1.0} * commutator;
    const std::size_t last = half_grid.n_points - 1;
    return residual.row_sum_norm(1, last) / ham.row_sum_norm(1, last);
}

/// Coefficient-level check of I^dagger = eta I eta^{-1} with x -> x + i beta, p -> p - i alpha.
/// Returns the largest mismatch among the four coefficients.
inline double pseudo_hermiticity_check(double t, Region region, const TimeProfile& profile, Perturbation perturbation = {}) {
    const CoefficientSet cs = profile.coefficients_at(t);
    const InvariantCoefficients ic = invariant_coefficients(cs, region);
    const double k = perturbation.flip_k_sign ? -cs.k : cs.k;
    const double sigma = region == Region::positive ? 1.0 : -1.0;
    const double alpha = sigma * k + perturbation.alpha_shift;
    const double beta = sigma * (cs.g * k - 2.0 * cs.w);
    const cplx i{0.0, 1.0};

    const std::array<cplx, 4> transformed{ic.p2(), ic.x(), ic.p() - 2.0 * i * alpha * ic.p2(),
                                          -alpha * alpha * ic.p2() + i * beta * ic.x() - i * alpha * ic.p() + ic.constant()};
    double worst = 0.0;
    for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(transformed[c] - std::conj(ic.c[c])));
    return worst;
}

}  // namespace lrwell
