#pragma once

// Model inputs m(t), f(t) and the derived time functions of the invariant
// construction.  Units hbar = 1.  All primitives start at t = 0:
//
//   g = -int 1/m,  k = 2 int f,  s = -int f k,  w = int f g,
//   theta = (f/2)(k g/2 - w),  zeta = -(k/4)(g k/2 - w),
//   chi1 = theta - (k^2 + 3 g^2 + 4 s)/(16 m),  chi2 = theta + (k^2 - g^2 + 4 s)/(16 m).

#include <lrwell/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace lrwell {

enum class Region { positive = 1, negative = 2 };

inline int region_index(Region r) { return r == Region::positive ? 1 : 2; }

/// Piecewise-linear interpolant of (t, value) samples.
class SampledTable {
public:
    SampledTable(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
        if (t_.size() != v_.size() || t_.size() < 2)
            throw domain_error("sampled table needs at least two (t, value) rows");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (!(t_[i] > t_[i - 1])) throw domain_error("sampled table times must be strictly increasing");
        for (double x : v_)
            if (!std::isfinite(x)) throw domain_error("sampled table holds a non-finite value");
    }

    /// Two comma-separated columns; a non-numeric first line is taken as a header.
    static SampledTable from_csv(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw domain_error("cannot open table file " + path.string());
        std::vector<double> t, v;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double a = 0.0, b = 0.0;
            if (!(row >> a >> b)) {
                if (line_no == 1) continue;
                throw domain_error(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
            }
            t.push_back(a);
            v.push_back(b);
        }
        return {std::move(t), std::move(v)};
    }

    double operator()(double x) const {
        if (x < t_.front() || x > t_.back())
            throw domain_error("time " + std::to_string(x) + " outside sampled table range");
        const auto it = std::upper_bound(t_.begin(), t_.end(), x);
        const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - t_.begin(), 1), t_.size() - 1);
        const double w = (x - t_[i - 1]) / (t_[i] - t_[i - 1]);
        return (1.0 - w) * v_[i - 1] + w * v_[i];
    }

    double front() const { return t_.front(); }
    double back() const { return t_.back(); }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> t_;
    std::vector<double> v_;
};

struct ConstantMass {
    double m0;
};
struct ExponentialMass {  // m0 exp(gamma t)
    double m0;
    double gamma;
};
struct PowerMass {  // m0 (1 + gamma t)^alpha
    double m0;
    double gamma;
    double alpha;
};
using MassLaw = std::variant<ConstantMass, ExponentialMass, PowerMass, SampledTable>;

struct ZeroCoupling {};
struct ConstantCoupling {
    double f0;
};
struct LinearCoupling {  // f0 t
    double f0;
};
struct SinusoidalCoupling {  // f0 cos(omega t)
    double f0;
    double omega;
};
using CouplingLaw = std::variant<ZeroCoupling, ConstantCoupling, LinearCoupling, SinusoidalCoupling, SampledTable>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double mass_at(const MassLaw& law, double t) {
    return std::visit(overloaded{[](const ConstantMass& m) { return m.m0; },
                                 [t](const ExponentialMass& m) { return m.m0 * std::exp(m.gamma * t); },
                                 [t](const PowerMass& m) { return m.m0 * std::pow(1.0 + m.gamma * t, m.alpha); },
                                 [t](const SampledTable& m) { return m(t); }},
                      law);
}

inline double coupling_at(const CouplingLaw& law, double t) {
    return std::visit(overloaded{[](const ZeroCoupling&) { return 0.0; },
                                 [](const ConstantCoupling& f) { return f.f0; },
                                 [t](const LinearCoupling& f) { return f.f0 * t; },
                                 [t](const SinusoidalCoupling& f) { return f.f0 * std::cos(f.omega * t); },
                                 [t](const SampledTable& f) { return f(t); }},
                      law);
}

namespace closed_form {

// int_0^t dtau / m
inline std::optional<double> inverse_mass_integral(const MassLaw& law, double t) {
    return std::visit(
        overloaded{[t](const ConstantMass& m) -> std::optional<double> { return t / m.m0; },
                   [t](const ExponentialMass& m) -> std::optional<double> {
                       if (m.gamma == 0.0) return t / m.m0;
                       return -std::expm1(-m.gamma * t) / (m.m0 * m.gamma);
                   },
                   [t](const PowerMass& m) -> std::optional<double> {
                       if (m.gamma == 0.0) return t / m.m0;
                       if (m.alpha == 1.0) return std::log1p(m.gamma * t) / (m.m0 * m.gamma);
                       return (std::pow(1.0 + m.gamma * t, 1.0 - m.alpha) - 1.0) / (m.m0 * m.gamma * (1.0 - m.alpha));
                   },
                   [](const SampledTable&) -> std::optional<double> { return std::nullopt; }},
        law);
}

// int_0^t f
inline std::optional<double> coupling_integral(const CouplingLaw& law, double t) {
    return std::visit(overloaded{[](const ZeroCoupling&) -> std::optional<double> { return 0.0; },
                                 [t](const ConstantCoupling& f) -> std::optional<double> { return f.f0 * t; },
                                 [t](const LinearCoupling& f) -> std::optional<double> { return 0.5 * f.f0 * t * t; },
                                 [t](const SinusoidalCoupling& f) -> std::optional<double> {
                                     if (f.omega == 0.0) return f.f0 * t;
                                     return f.f0 * std::sin(f.omega * t) / f.omega;
                                 },
                                 [](const SampledTable&) -> std::optional<double> { return std::nullopt; }},
                      law);
}

// int_0^t tau f(tau) dtau
inline std::optional<double> first_moment(const CouplingLaw& law, double t) {
    return std::visit(overloaded{[](const ZeroCoupling&) -> std::optional<double> { return 0.0; },
                                 [t](const ConstantCoupling& f) -> std::optional<double> { return 0.5 * f.f0 * t * t; },
                                 [t](const LinearCoupling& f) -> std::optional<double> { return f.f0 * t * t * t / 3.0; },
                                 [t](const SinusoidalCoupling& f) -> std::optional<double> {
                                     const double om = f.omega;
                                     if (om == 0.0) return 0.5 * f.f0 * t * t;
                                     return f.f0 * (t * std::sin(om * t) / om + (std::cos(om * t) - 1.0) / (om * om));
                                 },
                                 [](const SampledTable&) -> std::optional<double> { return std::nullopt; }},
                      law);
}

// int_0^t exp(-gamma tau) f(tau) dtau, gamma != 0
inline std::optional<double> damped_integral(const CouplingLaw& law, double gamma, double t) {
    const double decay = std::exp(-gamma * t);
    return std::visit(overloaded{[](const ZeroCoupling&) -> std::optional<double> { return 0.0; },
                                 [&](const ConstantCoupling& f) -> std::optional<double> {
                                     return -f.f0 * std::expm1(-gamma * t) / gamma;
                                 },
                                 [&](const LinearCoupling& f) -> std::optional<double> {
                                     return f.f0 * (1.0 - decay * (1.0 + gamma * t)) / (gamma * gamma);
                                 },
                                 [&](const SinusoidalCoupling& f) -> std::optional<double> {
                                     const double om = f.omega;
                                     return f.f0 * (decay * (om * std::sin(om * t) - gamma * std::cos(om * t)) + gamma) /
                                            (gamma * gamma + om * om);
                                 },
                                 [](const SampledTable&) -> std::optional<double> { return std::nullopt; }},
                      law);
}

// w(t) = int_0^t f g = -int_0^t f(tau) G(tau) dtau with G = int 1/m.
inline std::optional<double> w_integral(const MassLaw& mass, const CouplingLaw& coupling, double t) {
    if (std::holds_alternative<ZeroCoupling>(coupling)) return 0.0;

    auto constant_mass = [&](double m0) -> std::optional<double> {
        const auto moment = first_moment(coupling, t);
        if (!moment) return std::nullopt;
        return -*moment / m0;
    };

    return std::visit(
        overloaded{[&](const ConstantMass& m) { return constant_mass(m.m0); },
                   [&](const ExponentialMass& m) -> std::optional<double> {
                       if (m.gamma == 0.0) return constant_mass(m.m0);
                       const auto plain = coupling_integral(coupling, t);
                       const auto damped = damped_integral(coupling, m.gamma, t);
                       if (!plain || !damped) return std::nullopt;
                       return -(*plain - *damped) / (m.m0 * m.gamma);
                   },
                   [&](const PowerMass& m) -> std::optional<double> {
                       if (m.gamma == 0.0) return constant_mass(m.m0);
                       const auto* fc = std::get_if<ConstantCoupling>(&coupling);
                       if (!fc) return std::nullopt;
                       const double base = 1.0 + m.gamma * t, gm = m.gamma;
                       double g_integral;  // int_0^t G
                       if (m.alpha == 1.0) {
                           g_integral = (base * std::log(base) - base + 1.0) / (m.m0 * gm * gm);
                       } else {
                           const double beta = 1.0 - m.alpha;
                           const double power_integral = m.alpha == 2.0 ? std::log(base) / gm
                                                                        : (std::pow(base, beta + 1.0) - 1.0) / (gm * (beta + 1.0));
                           g_integral = (power_integral - t) / (m.m0 * gm * beta);
                       }
                       return -fc->f0 * g_integral;
                   },
                   [](const SampledTable&) -> std::optional<double> { return std::nullopt; }},
        mass);
}

}  // namespace closed_form

struct Primitives {
    double g;
    double k;
    double s;
    double w;
};

struct CoefficientSet {
    double t;
    double g, k, s, w;
    double theta;
    double chi1, chi2;
    double zeta;
};

inline CoefficientSet derive_coefficients(double t, double mass, double coupling, const Primitives& p) {
    const double theta = 0.5 * coupling * (0.5 * p.k * p.g - p.w);
    const double chi1 = theta - (p.k * p.k + 3.0 * p.g * p.g + 4.0 * p.s) / (16.0 * mass);
    const double chi2 = theta + (p.k * p.k - p.g * p.g + 4.0 * p.s) / (16.0 * mass);
    const double zeta = -0.25 * p.k * (0.5 * p.g * p.k - p.w);
    return {t, p.g, p.k, p.s, p.w, theta, chi1, chi2, zeta};
}

/// Coefficients of p^2, x, p and 1 in the region-j pseudo-invariant.
struct InvariantCoefficients {
    Region region;
    std::array<std::complex<double>, 4> c;

    std::complex<double> p2() const { return c[0]; }
    std::complex<double> x() const { return c[1]; }
    std::complex<double> p() const { return c[2]; }
    std::complex<double> constant() const { return c[3]; }
};

inline InvariantCoefficients invariant_coefficients(const CoefficientSet& cs, Region region) {
    using cd = std::complex<double>;
    const cd b3{cs.g, cs.k};
    const cd b4{cs.s, cs.w};
    if (region == Region::positive) return {region, {cd{1.0}, cd{1.0}, b3, b4}};
    return {region, {cd{1.0}, cd{-1.0}, -b3, b4}};
}

/// Real Lewis-Riesenfeld phase eps_n^j(t).  Real by type.
struct PhaseValue {
    int n;
    Region region;
    double t;
    double epsilon;
};

class TimeProfile {
public:
    TimeProfile(MassLaw mass, CouplingLaw coupling, double window_end)
        : mass_(std::move(mass)), coupling_(std::move(coupling)), window_end_(window_end) {
        if (!(window_end_ > 0.0) || !std::isfinite(window_end_))
            throw domain_error("time window end must be positive and finite");
        validate();
        table_ = std::make_shared<const CumulativeTable>(build_table());
    }

    double mass(double t) const {
        check_window(t);
        return mass_at(mass_, t);
    }
    double coupling(double t) const {
        check_window(t);
        return coupling_at(coupling_, t);
    }
    double window_end() const { return window_end_; }
    const MassLaw& mass_law() const { return mass_; }
    const CouplingLaw& coupling_law() const { return coupling_; }

    /// g, k, s, w from closed forms, when the family combination has them.
    std::optional<Primitives> closed_form_primitives(double t) const {
        check_window(t);
        const auto big_g = closed_form::inverse_mass_integral(mass_, t);
        const auto big_f = closed_form::coupling_integral(coupling_, t);
        const auto w = closed_form::w_integral(mass_, coupling_, t);
        if (!big_g || !big_f || !w) return std::nullopt;
        const double k = 2.0 * *big_f;
        // s' = -f k = -k k'/2, so s = -k^2/4 for every coupling.
        return Primitives{-*big_g, k, -0.25 * k * k, *w};
    }

    bool has_closed_form() const { return closed_form_primitives(0.0).has_value(); }

    /// g, k, s, w from the cumulative quadrature table.
    Primitives tabulated_primitives(double t) const {
        const auto y = table_state(t);
        return {y[0], y[1], y[2], y[3]};
    }

    CoefficientSet coefficients_at(double t) const {
        const auto p = closed_form_primitives(t);
        return derive_coefficients(t, mass(t), coupling(t), p ? *p : tabulated_primitives(t));
    }

    CoefficientSet tabulated_coefficients_at(double t) const {
        return derive_coefficients(t, mass(t), coupling(t), tabulated_primitives(t));
    }

    /// int_0^t chi^j
    double chi_integral(Region region, double t) const { return table_state(t)[region == Region::positive ? 4 : 5]; }

    /// int_0^t (k^2 - g^2 + 2 s)/(4 m): the lambda-independent part of the phase
    /// that makes each region branch an exact TDSE solution.
    double solution_phase_integral(double t) const { return table_state(t)[6]; }

    std::size_t table_intervals() const { return table_->nodes.size() - 1; }

private:
    static constexpr std::size_t state_size = 7;  // g, k, s, w, int chi1, int chi2, int solution phase
    using State = std::array<double, state_size>;

    struct CumulativeTable {
        double step;
        std::vector<State> nodes;
    };

    void check_window(double t) const {
        if (!(t >= 0.0 && t <= window_end_))
            throw domain_error("time " + std::to_string(t) + " outside window [0, " + std::to_string(window_end_) + "]");
    }

    void validate() const {
        std::visit(overloaded{[](const ConstantMass& m) {
                                  if (!(m.m0 > 0.0)) throw domain_error("mass m0 must be positive");
                              },
                              [](const ExponentialMass& m) {
                                  if (!(m.m0 > 0.0)) throw domain_error("mass m0 must be positive");
                              },
                              [this](const PowerMass& m) {
                                  if (!(m.m0 > 0.0)) throw domain_error("mass m0 must be positive");
                                  if (!(1.0 + m.gamma * window_end_ > 0.0))
                                      throw domain_error("power-law mass base 1 + gamma t vanishes inside the window");
                              },
                              [this](const SampledTable& m) {
                                  if (m.front() > 0.0 || m.back() < window_end_)
                                      throw domain_error("mass table does not cover the time window");
                                  for (double v : m.values())
                                      if (!(v > 0.0)) throw domain_error("non-positive mass sample in table");
                              }},
                   mass_);
        if (const auto* table = std::get_if<SampledTable>(&coupling_)) {
            if (table->front() > 0.0 || table->back() < window_end_)
                throw domain_error("coupling table does not cover the time window");
        }
    }

    State rhs(double t, const State& y) const {
        const double m = mass_at(mass_, t);
        const double f = coupling_at(coupling_, t);
        const double g = y[0], k = y[1], s = y[2], w = y[3];
        const double theta = 0.5 * f * (0.5 * k * g - w);
        return {-1.0 / m,
                2.0 * f,
                -f * k,
                f * g,
                theta - (k * k + 3.0 * g * g + 4.0 * s) / (16.0 * m),
                theta + (k * k - g * g + 4.0 * s) / (16.0 * m),
                (k * k - g * g + 2.0 * s) / (4.0 * m)};
    }

    // Classical RK4; for integrands independent of y it is Simpson's rule.
    State rk4_step(double t, const State& y, double h) const {
        auto axpy = [](const State& a, double c, const State& b) {
            State out;
            for (std::size_t i = 0; i < state_size; ++i) out[i] = a[i] + c * b[i];
            return out;
        };
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        const State k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        const State k4 = rhs(t + h, axpy(y, h, k3));
        State out;
        for (std::size_t i = 0; i < state_size; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }

    CumulativeTable integrate_uniform(std::size_t intervals) const {
        CumulativeTable table{window_end_ / static_cast<double>(intervals), {}};
        table.nodes.reserve(intervals + 1);
        table.nodes.push_back(State{});
        for (std::size_t i = 0; i < intervals; ++i)
            table.nodes.push_back(rk4_step(static_cast<double>(i) * table.step, table.nodes.back(), table.step));
        return table;
    }

    CumulativeTable build_table() const {
        constexpr double tolerance = 1e-10;
        constexpr std::size_t max_intervals = std::size_t{1} << 20;
        CumulativeTable coarse = integrate_uniform(256);
        for (std::size_t n = 512; n <= max_intervals; n *= 2) {
            CumulativeTable fine = integrate_uniform(n);
            double worst = 0.0;
            for (std::size_t i = 0; i < coarse.nodes.size(); ++i)
                for (std::size_t c = 0; c < state_size; ++c) {
                    const double a = coarse.nodes[i][c], b = fine.nodes[2 * i][c];
                    worst = std::max(worst, std::abs(a - b) / 15.0 / std::max(1.0, std::abs(b)));
                }
            if (!std::isfinite(worst)) throw numeric_error("cumulative table: non-finite values");
            if (worst < tolerance) return fine;
            coarse = std::move(fine);
        }
        throw numeric_error("cumulative table: Richardson estimate above 1e-10 at 2^20 intervals");
    }

    State table_state(double t) const {
        check_window(t);
        const auto& tab = *table_;
        const std::size_t last = tab.nodes.size() - 1;
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t / tab.step), last);
        const double ti = static_cast<double>(i) * tab.step;
        if (t == ti) return tab.nodes[i];
        return rk4_step(ti, tab.nodes[i], t - ti);
    }

    MassLaw mass_;
    CouplingLaw coupling_;
    double window_end_;
    std::shared_ptr<const CumulativeTable> table_;
};

inline InvariantCoefficients invariant_coefficients(const TimeProfile& profile, double t, Region region) {
    return invariant_coefficients(profile.coefficients_at(t), region);
}

/// eps_n^j(t) = int_0^t (chi^j - lambda / (2 m)).  Uses int 1/(2m) = -g/2.
inline PhaseValue phase(const TimeProfile& profile, int n, double lambda, Region region, double t) {
    const double g = profile.tabulated_primitives(t).g;
    return {n, region, t, profile.chi_integral(region, t) + 0.5 * lambda * g};
}

}  // namespace lrwell
