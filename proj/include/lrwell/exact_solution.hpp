#pragma once

// Psi_{n,j}(x,t) = exp[i(eps + zeta)] exp(-a x) phi_{n,j}(x + i b, t), with the
// Dyson map rho_j = exp(a x + b p), a = -/+ k/2, b = -/+ (gk/2 - w), and
// phi_{n,j}(y) = exp(i bch) exp(i slope y) phi_n(y +/- c) (region 1 upper signs).

#include <lrwell/errors.hpp>
#include <lrwell/quadrature.hpp>
#include <lrwell/spectrum.hpp>
#include <lrwell/time_profile.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace lrwell {

using cplx = std::complex<double>;

struct TransformSpec {
    Region region;
    double t;
    double shift_c;           // (k^2 - g^2 + 4 s)/4
    double plane_wave_slope;  // -g/2 region 1, +g/2 region 2
    double bch_phase;
    double rho_exponent_x;  // -k/2 region 1, +k/2 region 2
    double rho_shift;       // g k/2 - w
};

struct WavefunctionSample {
    int n;
    double t;
    std::vector<double> x;
    std::vector<cplx> values;
    std::vector<Region> regions;
};

struct SolutionOptions {
    bool flip_k_sign = false;  // negative control
};

enum class EtaRegion { positive, negative, both };

class ExactSolution {
public:
    explicit ExactSolution(const TimeProfile& profile, SolutionOptions options = {})
        : profile_(&profile), options_(options) {}

    const TimeProfile& profile() const { return *profile_; }

    /// Coefficients as used by the solution (k negated under flip_k_sign).
    CoefficientSet coefficients(double t) const {
        CoefficientSet cs = profile_->coefficients_at(t);
        if (options_.flip_k_sign) {
            cs.k = -cs.k;
            cs.zeta = -0.25 * cs.k * (0.5 * cs.g * cs.k - cs.w);
        }
        return cs;
    }

    TransformSpec transform(Region region, double t) const {
        const CoefficientSet cs = coefficients(t);
        const double sigma = region == Region::positive ? 1.0 : -1.0;
        const double epsilon_part = profile_->chi_integral(region, t);  // lambda terms cancel
        const double bch = profile_->solution_phase_integral(t) - epsilon_part - cs.zeta;
        return {region,
                t,
                0.25 * (cs.k * cs.k - cs.g * cs.g + 4.0 * cs.s),
                -sigma * 0.5 * cs.g,
                bch,
                -sigma * 0.5 * cs.k,
                0.5 * cs.g * cs.k - cs.w};
    }

    /// Real phase eps + zeta + bch carried by branch j.
    double total_phase(int n, Region region, double t) const {
        const TransformSpec tr = transform(region, t);
        return phase(*profile_, n, level(n).lambda, region, t).epsilon + coefficients(t).zeta + tr.bch_phase;
    }

    /// phi_{n,j}(y, t) = U_j phi_n in the position representation, continued to complex y.
    cplx transformed_eigenfunction(int n, Region region, cplx y, double t) const {
        return transformed_eigenfunction(n, transform(region, t), y);
    }

    /// Branch j of Psi_n continued analytically in x.
    cplx branch_value(int n, Region region, cplx x, double t) const {
        const TransformSpec tr = transform(region, t);
        return branch_value(n, tr, total_phase(n, region, t), x);
    }

    /// Glued solution: branch 1 for x >= 0, branch 2 for x < 0.
    cplx value(int n, double x, double t) const {
        return branch_value(n, x >= 0.0 ? Region::positive : Region::negative, cplx{x, 0.0}, t);
    }

    WavefunctionSample assemble_wavefunction(int n, double t, const std::vector<double>& grid) const {
        const TransformSpec tr1 = transform(Region::positive, t), tr2 = transform(Region::negative, t);
        const double ph1 = total_phase(n, Region::positive, t), ph2 = total_phase(n, Region::negative, t);
        WavefunctionSample out{n, t, grid, {}, {}};
        out.values.reserve(grid.size());
        out.regions.reserve(grid.size());
        for (double x : grid) {
            const bool positive = x >= 0.0;
            out.values.push_back(positive ? branch_value(n, tr1, ph1, x) : branch_value(n, tr2, ph2, x));
            out.regions.push_back(positive ? Region::positive : Region::negative);
        }
        return out;
    }

    /// (rho_j Psi_{n,j})(x) = exp(-i a b/2) exp(a x) Psi_{n,j}(x - i b).
    cplx dyson_mapped(int n, Region region, double x, double t) const {
        const TransformSpec tr = transform(region, t);
        const double a = tr.rho_exponent_x, b = momentum_exponent(tr);
        const cplx psi = branch_value(n, tr, total_phase(n, region, t), cplx{x, -b});
        return std::exp(cplx{a * x, -0.5 * a * b}) * psi;
    }

    /// |rho_1 Psi_1|^2 on x >= 0 plus |rho_2 Psi_2|^2 on x < 0.
    double reconstructed_density(int n, double x, double t) const {
        return std::norm(dyson_mapped(n, x >= 0.0 ? Region::positive : Region::negative, x, t));
    }

    /// eta-inner product over a region via the reduction |rho_j Psi_{n,j}|^2 = |phi_{n,j}|^2
    /// and unitarity of U_j: the region integral of |phi_n|^2.
    double eta_inner_product(int n, double t, EtaRegion region) const {
        (void)profile_->coefficients_at(t);  // window check
        switch (region) {
            case EtaRegion::positive:
                return half_line_probability(n, Region::positive);
            case EtaRegion::negative:
                return half_line_probability(n, Region::negative);
            case EtaRegion::both:
                break;
        }
        return full_line_probability(n);
    }

    /// Direct quadrature of |rho_j Psi_{n,j}|^2 over region j.
    double eta_norm_direct(int n, double t, Region region) const {
        const TransformSpec tr = transform(region, t);
        const double edge = truncation_radius(n) + std::abs(tr.shift_c);
        const double s = region == Region::positive ? 1.0 : -1.0;
        auto integrand = [&](double u) { return std::norm(dyson_mapped(n, region, s * u, t)); };
        const double turn = std::min(level(n).lambda + std::abs(tr.shift_c), edge);
        return integrate(integrand, 0.0, turn, 1e-10).value + integrate(integrand, turn, edge, 1e-10).value;
    }

private:
    static double momentum_exponent(const TransformSpec& tr) {
        return tr.region == Region::positive ? -tr.rho_shift : tr.rho_shift;
    }

    static cplx transformed_eigenfunction(int n, const TransformSpec& tr, cplx y) {
        const double sigma = tr.region == Region::positive ? 1.0 : -1.0;
        const cplx plane = std::exp(cplx{0.0, 1.0} * (tr.bch_phase + tr.plane_wave_slope * y));
        return plane * eigenfunction_continued(n, y + sigma * tr.shift_c, tr.region);
    }

    static cplx branch_value(int n, const TransformSpec& tr, double total_phase, cplx x) {
        const double a = tr.rho_exponent_x, b = momentum_exponent(tr);
        // exp(i(eps + zeta)) carries everything but bch, which sits inside phi_{n,j}.
        const cplx outer = std::exp(cplx{0.0, total_phase - tr.bch_phase} - a * x);
        return outer * transformed_eigenfunction(n, tr, x + cplx{0.0, b});
    }

    const TimeProfile* profile_;
    SolutionOptions options_;
};

}  // namespace lrwell
