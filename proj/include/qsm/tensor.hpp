#pragma once

// Adding a dummy variable: u(x) becomes u(x) on a strip x in the 1-D domain,
// t in a bounded interval, tested against phi(x) phi2(t) where phi2 is a
// trapezoid. The x-direction uses the 1-D grid coordinate with unit weight.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "qsm/error.hpp"
#include "qsm/oracle.hpp"
#include "qsm/pl_profile.hpp"
#include "qsm/quadrature.hpp"

namespace qsm {

/// Trapezoid with unit ramps and a plateau of length m: 0 outside (0, m+2),
/// t on [0,1], 1 on [1, m+1], m+2-t on [m+1, m+2].
inline double ramp_phi2(double t, double m) {
    if (!(m > 0.0)) throw DomainError("ramp_phi2: m must be positive");
    if (t <= 0.0 || t >= m + 2.0) return 0.0;
    if (t < 1.0) return t;
    if (t <= m + 1.0) return 1.0;
    return m + 2.0 - t;
}

/// The same trapezoid with ramps of width omega.
inline double ramp_phi2(double t, double m, double omega) {
    if (!(omega > 0.0)) throw DomainError("ramp_phi2: ramp width must be positive");
    return omega * ramp_phi2(t / omega, m / omega);
}

struct StripTestConfig {
    PiecewiseLinearProfile base_profile;
    PiecewiseLinearProfile base_phi;
    double m = 1.0;
    double p = 2.0;
    double ramp_width = 1.0;

    void validate() const {
        detail::require(m > 0.0, "strip test: m must be positive");
        detail::require(p > 1.0, "strip test: p must exceed 1");
        detail::require(ramp_width > 0.0, "strip test: ramp width must be positive");
        if (!base_profile.grid.same_as(base_phi.grid)) throw DomainError("strip test: profile and phi grids differ");
        const std::size_t last = base_phi.values.size() - 1;
        if (base_phi.value(0) != 0.0 || base_phi.value(last) != 0.0)
            throw DomainError("strip test: phi must vanish at the boundary nodes");
        for (std::size_t i = 0; i <= last; ++i)
            if (base_phi.value(i) < 0.0) throw DomainError("strip test: phi must be nonnegative");
    }
};

/// The m-independent pieces of the strip ratio, for one profile, phi and ramp width.
struct StripEnergies {
    double energy_u = 0.0;     ///< E_u over {phi != 0}
    double energy_w = 0.0;     ///< E_{u+phi} over {phi != 0}
    double ramp = 0.0;         ///< integral over tau in (0,1) of the ramp energy density
    double ramp_width = 1.0;
    double ramp_error = 0.0;
    bool degenerate = false;   ///< phi vanishes identically

    double ratio_1d() const { return support_ratio(energy_u, energy_w); }
};

namespace detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kGl8x = {0.1834346424956498049394761, 0.5255324099163289858177390,
                                                0.7966664774136267395915539, 0.9602898564975362316835609};
inline constexpr std::array<double, 4> kGl8w = {0.3626837833783619829651504, 0.3137066458778872873379622,
                                                0.2223810344533744705443560, 0.1012285362903762591525314};

} // namespace detail

/// E_u, E_{u+phi} and the ramp term
///   R = int_0^1 int_{phi != 0} ((u' + tau phi')^2 + (phi / omega)^2)^{p/2} dx dtau.
/// The x-integral is 8-point Gauss-Legendre per cell (exact for p = 2); the
/// tau-integral is adaptive.
inline StripEnergies strip_energies(const PiecewiseLinearProfile& u, const PiecewiseLinearProfile& phi, double p,
                                    double ramp_width = 1.0, const QuadratureOptions& opt = {1e-13, 1e-11, 60, 20000}) {
    if (!u.grid.same_as(phi.grid)) throw DomainError("strip_energies: profile and phi grids differ");
    const auto& g = u.grid;
    struct Cell {
        double h, du, dphi, phi0, phi1;
    };
    std::vector<Cell> cells;
    StripEnergies e;
    e.ramp_width = ramp_width;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const double f0 = phi.value(i), f1 = phi.value(i + 1);
        if (f0 == 0.0 && f1 == 0.0) continue;
        const double h = g.width(i);
        const double du = u.slope(i);
        const double dphi = (f1 - f0) / h;
        e.energy_u += detail::cell_energy(du, h, p);
        e.energy_w += detail::cell_energy(du + dphi, h, p);
        cells.push_back({h, du, dphi, f0, f1});
    }
    if (cells.empty()) {
        e.degenerate = true;
        return e;
    }
    const double inv_w = 1.0 / ramp_width;
    auto density = [&](double tau) {
        double sum = 0.0;
        for (const auto& c : cells) {
            const double a = c.du + tau * c.dphi;
            const double a2 = a * a;
            double cell = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                for (double sign : {-1.0, 1.0}) {
                    const double xi = 0.5 * (1.0 + sign * detail::kGl8x[k]);
                    const double f = (c.phi0 + (c.phi1 - c.phi0) * xi) * inv_w;
                    const double q = a2 + f * f;
                    cell += detail::kGl8w[k] * (p == 2.0 ? q : std::pow(q, 0.5 * p));
                }
            }
            sum += 0.5 * c.h * cell;
        }
        return sum;
    };
    const auto r = integrate(density, 0.0, 1.0, opt);
    e.ramp = r.value;
    e.ramp_error = r.error;
    return e;
}

struct StripReport {
    double m = 0.0;
    double ratio_1d = 1.0;
    double strip_ratio = 1.0;
    double claimed_q = 1.0;
    double numerator = 0.0;
    double denominator = 0.0;
    bool degenerate = false;
};

/// Ratio of the strip energies over {phi2 phi != 0}:
///   (m + 2w) E_u / (m E_{u+phi} + 2w R),
/// with w the ramp width. The numerator carries no t-dependence.
inline StripReport strip_ratio(const StripEnergies& e, double m, double claimed_q = 1.0) {
    if (!(m > 0.0)) throw DomainError("strip_ratio: m must be positive");
    StripReport r;
    r.m = m;
    r.claimed_q = claimed_q;
    r.ratio_1d = e.ratio_1d();
    r.degenerate = e.degenerate;
    if (e.degenerate) return r;
    const double w = e.ramp_width;
    r.numerator = (m + 2.0 * w) * e.energy_u;
    r.denominator = m * e.energy_w + 2.0 * w * e.ramp;
    r.strip_ratio = support_ratio(r.numerator, r.denominator);
    if (r.denominator == 0.0) r.degenerate = true;
    return r;
}

inline StripReport strip_ratio(const StripTestConfig& config, double claimed_q = 1.0) {
    config.validate();
    return strip_ratio(strip_energies(config.base_profile, config.base_phi, config.p, config.ramp_width), config.m, claimed_q);
}

struct ExhaustionRow {
    double length;
    double m;
    double ramp_width;
    double extremal_ratio;  ///< strip ratio of the supplied phi
    double max_ratio;       ///< over the supplied phi and the random perturbations
    std::size_t failures;
};

struct ExhaustionReport {
    double claimed_q = 1.0;
    double threshold = 1.0;
    std::vector<ExhaustionRow> rows;

    bool pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const ExhaustionRow& r) { return r.failures == 0; });
    }
};

struct ExhaustionOptions {
    std::size_t random_trials = 200;
    std::uint64_t seed = 0;
    double allowance_c = 5.0;
    double relative_tolerance = 1e-9;
    QuadratureOptions quadrature{1e-13, 1e-11, 60, 20000};
};

/// Strips of increasing total length L in t. A strip of length L >= 4 uses
/// unit ramps and plateau L - 2; shorter strips shrink the ramps to L/4.
/// For each length, the strip ratio of phi and of random nonnegative
/// perturbations of u must stay below claimed_q.
inline ExhaustionReport exhaustion_check(const PiecewiseLinearProfile& u, const PiecewiseLinearProfile& phi,
                                         double claimed_q, const std::vector<double>& strip_lengths, double p,
                                         const ExhaustionOptions& opt = {}) {
    detail::require(!strip_lengths.empty(), "exhaustion_check: no strip lengths");
    for (std::size_t i = 0; i < strip_lengths.size(); ++i) {
        detail::require(strip_lengths[i] > 0.0, "exhaustion_check: strip lengths must be positive");
        if (i > 0) detail::require(strip_lengths[i] > strip_lengths[i - 1], "exhaustion_check: strip lengths must increase");
    }
    ExhaustionReport report;
    report.claimed_q = claimed_q;
    report.threshold = claimed_q * (1.0 + opt.relative_tolerance) + opt.allowance_c * u.grid.max_width();

    // Random perturbations are regenerated as full-grid profiles once.
    std::vector<PiecewiseLinearProfile> randoms;
    randoms.reserve(opt.random_trials);
    for (std::size_t t = 0; t < opt.random_trials; ++t) {
        const auto pert = generate_perturbation(u, opt.seed, t, PerturbationSign::Nonnegative);
        std::vector<double> values(u.values.size(), 0.0);
        std::copy(pert.values.begin(), pert.values.end(), values.begin() + static_cast<std::ptrdiff_t>(pert.first));
        randoms.push_back(PiecewiseLinearProfile::make(u.grid, std::move(values)));
    }

    for (double L : strip_lengths) {
        const double w = std::min(1.0, L / 4.0);
        const double m = L - 2.0 * w;
        ExhaustionRow row{L, m, w, 1.0, 1.0, 0};
        auto consider = [&](const PiecewiseLinearProfile& f) {
            const auto r = strip_ratio(strip_energies(u, f, p, w, opt.quadrature), m, claimed_q);
            if (!r.degenerate && r.strip_ratio > report.threshold) ++row.failures;
            if (!r.degenerate) row.max_ratio = std::max(row.max_ratio, r.strip_ratio);
            return r;
        };
        const auto ext = consider(phi);
        row.extremal_ratio = ext.degenerate ? 1.0 : ext.strip_ratio;
        for (const auto& f : randoms) consider(f);
        report.rows.push_back(row);
    }
    return report;
}

} // namespace qsm
