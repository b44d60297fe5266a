#pragma once

// Brute-force checks of the quasi(super)minimizer inequality
//
//     E_u({phi != 0}) <= Q * E_{u+phi}({phi != 0})
//
// on piecewise-linear radial profiles, where every energy is exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qsm/composition.hpp"
#include "qsm/error.hpp"
#include "qsm/logpower.hpp"
#include "qsm/pl_profile.hpp"

namespace qsm {

// ---------------------------------------------------------------------------
// Grids suited to the profiles

namespace detail {

// Width of the boundary cell such that the energy q * y^c left inside it is
// below about 1e-9, clamped to what double can represent.
inline double boundary_cell_for(double q, double energy_exponent, double bulk_width) {
    double y = std::pow(1e-9 / q, 1.0 / energy_exponent);
    if (!(y > 1e-300)) y = 1e-300;
    return std::min(y, bulk_width * 1e-3);
}

// A singular end d^alpha holds energy ~ d^c per e-fold of d, and a cell of
// log-width w loses a fraction ~ w^2 of its energy to interpolation. Spreading
// cells like (d^c)^{1/3} per e-fold equalizes that loss across the layer.
inline double layer_decay(double c) { return c / 3.0; }

} // namespace detail

/// LogRadius grid over the profile's annulus, graded toward its singular end.
inline RadialGrid oracle_grid(const LogPowerProfile& profile, std::size_t cells) {
    const auto& A = profile.annulus;
    const double lo = A.log_inner(), hi = A.log_outer();
    const int n = A.n;
    const double c = n * profile.alpha - n + 1.0;
    const double q = q_of_alpha(profile.alpha, ConformalParams::conformal(n));
    const double smallest = detail::boundary_cell_for(q, c, (hi - lo) / static_cast<double>(cells));
    return RadialGrid::graded(lo, hi, cells, cells / 2, smallest, profile.orientation == Orientation::Outer, n,
                              Coordinate::LogRadius, {}, detail::layer_decay(c));
}

/// LogRadius grid on [-1, 0] graded toward the outer sphere, with a node at the crossing.
inline RadialGrid oracle_grid(const MinProfile& profile, std::size_t cells) {
    const int n = profile.n;
    const double c = n * profile.alpha2 - n + 1.0;
    const double q2 = q_of_alpha(profile.alpha2, ConformalParams::conformal(n));
    const double smallest = detail::boundary_cell_for(q2, c, 1.0 / static_cast<double>(cells));
    const double kink[] = {profile.log_crossing()};
    return RadialGrid::graded(-1.0, 0.0, cells, cells / 2, smallest, true, n, Coordinate::LogRadius, kink,
                              detail::layer_decay(c));
}

// ---------------------------------------------------------------------------
// Discrete Dirichlet minimizer

struct MinimizerOptions {
    int max_iterations = 500;
    double step_tolerance = 1e-14;
    /// Starting nodal values; the boundary entries are overwritten. Empty means
    /// the interpolant linear in the grid coordinate.
    std::vector<double> initial;
};

/// Minimizes the exact energy over interior nodal values with the two boundary
/// values fixed. Damped Newton on the strictly convex energy; the Hessian is
/// tridiagonal.
inline PiecewiseLinearProfile discrete_minimizer(const RadialGrid& grid, std::pair<double, double> boundary,
                                                 std::optional<double> exponent = std::nullopt,
                                                 const MinimizerOptions& opt = {}) {
    const double p = exponent.value_or(default_exponent(grid));
    detail::require(p > 1.0, "discrete_minimizer: exponent must exceed 1");
    const std::size_t nodes = grid.node_count();
    const std::size_t cells = grid.cell_count();
    std::vector<double> v(nodes);
    if (opt.initial.empty()) {
        // Linear in the node index would put slopes of order 1/h_min into the
        // finest cells of a graded grid and overflow the energy.
        const double length = grid.hi() - grid.lo();
        for (std::size_t i = 0; i < nodes; ++i)
            v[i] = boundary.first + (boundary.second - boundary.first) * ((grid.node(i) - grid.lo()) / length);
    } else {
        detail::require(opt.initial.size() == nodes, "discrete_minimizer: initial guess has the wrong size");
        v = opt.initial;
    }
    v.front() = boundary.first;
    v.back() = boundary.second;

    std::vector<double> weight(cells), width(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        weight[i] = grid.cell_weight(i);
        width[i] = grid.width(i);
    }
    auto energy = [&](const std::vector<double>& x) {
        double e = 0.0;
        for (std::size_t i = 0; i < cells; ++i) e += detail::cell_energy((x[i + 1] - x[i]) / width[i], weight[i], p);
        return e;
    };

    const std::size_t m = nodes - 2;  // unknowns v[1..nodes-2]
    std::vector<double> grad(m), diag(m), off(m), step(m), trial(nodes);
    std::vector<double> flux(cells), stiff(cells);
    double e_now = energy(v);
    const double scale = 1.0 + std::max(std::abs(boundary.first), std::abs(boundary.second));

    for (int it = 0; it < opt.max_iterations; ++it) {
        double gmax = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double s = (v[i + 1] - v[i]) / width[i];
            const double a = std::max(std::abs(s), 1e-12 * scale);
            const double apm2 = std::pow(a, p - 2.0);
            flux[i] = p * weight[i] * apm2 * s / width[i];  // dE_i / d v[i+1]
            stiff[i] = p * (p - 1.0) * weight[i] * apm2 / (width[i] * width[i]);
        }
        for (std::size_t j = 0; j < m; ++j) {
            grad[j] = flux[j] - flux[j + 1];
            diag[j] = stiff[j] + stiff[j + 1];
            off[j] = -stiff[j + 1];  // coupling between unknown j and j+1
            gmax = std::max(gmax, std::abs(grad[j]));
        }
        if (gmax == 0.0) return PiecewiseLinearProfile::make(grid, v);

        // Thomas algorithm for diag/off * step = -grad.
        std::vector<double> c(m), d(m);
        c[0] = off[0] / diag[0];
        d[0] = -grad[0] / diag[0];
        for (std::size_t j = 1; j < m; ++j) {
            const double denom = diag[j] - off[j - 1] * c[j - 1];
            c[j] = off[j] / denom;
            d[j] = (-grad[j] - off[j - 1] * d[j - 1]) / denom;
        }
        step[m - 1] = d[m - 1];
        for (std::size_t j = m - 1; j-- > 0;) step[j] = d[j] - c[j] * step[j + 1];

        double slope = 0.0, smax = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            slope += grad[j] * step[j];
            smax = std::max(smax, std::abs(step[j]));
        }
        double t = 1.0;
        double e_trial = 0.0;
        for (int ls = 0; ls < 60; ++ls) {
            trial = v;
            for (std::size_t j = 0; j < m; ++j) trial[j + 1] += t * step[j];
            e_trial = energy(trial);
            if (e_trial <= e_now + 1e-4 * t * slope || t * smax <= opt.step_tolerance * scale) break;
            t *= 0.5;
        }
        const bool small_step = t * smax <= opt.step_tolerance * scale;
        if (e_trial <= e_now) {
            v.swap(trial);
            e_now = e_trial;
        }
        if (small_step || (t == 1.0 && smax <= 1e-13 * scale)) return PiecewiseLinearProfile::make(grid, v);
    }
    throw ConvergenceError("discrete_minimizer: iteration budget exceeded", opt.max_iterations);
}

// ---------------------------------------------------------------------------
// The inequality itself

enum class PerturbationSign { Nonnegative, Nonpositive };

struct CellRange {
    std::size_t first;
    std::size_t last;  // one past
};

struct RatioVerdict {
    double energy_u = 0.0;
    double energy_competitor = 0.0;
    double ratio = 1.0;
    std::vector<CellRange> support;
    double claimed_q = 1.0;
    double threshold = 1.0;
    bool pass = true;
    double slack = 0.0;
};

struct VerdictTolerance {
    double relative = 1e-9;
    double allowance = 0.0;  ///< absolute discretization allowance added to the threshold
};

/// Ratio on a support; phi == 0 gives a vacuous pass with ratio 1.
inline double support_ratio(double energy_u, double energy_competitor) {
    if (energy_competitor > 0.0) return energy_u / energy_competitor;
    return energy_u > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

/// Tests u against the competitor u + phi on the cells where phi is not identically zero.
/// With Nonnegative (superminimizer mode) phi must be >= 0; with Nonpositive, <= 0.
inline RatioVerdict quasi_inequality_test(const PiecewiseLinearProfile& u, const PiecewiseLinearProfile& phi,
                                          double claimed_q, PerturbationSign sign = PerturbationSign::Nonnegative,
                                          const VerdictTolerance& tol = {}, std::optional<double> exponent = std::nullopt) {
    if (!u.grid.same_as(phi.grid)) throw DomainError("quasi_inequality_test: u and phi live on different grids");
    if (!(claimed_q >= 1.0)) throw DomainError("quasi_inequality_test: claimed Q must be >= 1");
    const double p = exponent.value_or(default_exponent(u.grid));
    const std::size_t nodes = u.grid.node_count();
    if (phi.value(0) != 0.0 || phi.value(nodes - 1) != 0.0)
        throw DomainError("quasi_inequality_test: phi must vanish at the boundary nodes");
    for (std::size_t i = 0; i < nodes; ++i) {
        const double f = phi.value(i);
        if (sign == PerturbationSign::Nonnegative && f < 0.0)
            throw DomainError("quasi_inequality_test: negative phi in superminimizer mode");
        if (sign == PerturbationSign::Nonpositive && f > 0.0)
            throw DomainError("quasi_inequality_test: positive phi in subminimizer mode");
    }

    RatioVerdict v;
    v.claimed_q = claimed_q;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        const double f0 = phi.value(i), f1 = phi.value(i + 1);
        if (f0 == 0.0 && f1 == 0.0) continue;
        if (!v.support.empty() && v.support.back().last == i)
            v.support.back().last = i + 1;
        else
            v.support.push_back({i, i + 1});
        const double w = u.grid.cell_weight(i);
        const double h = u.grid.width(i);
        v.energy_u += detail::cell_energy(u.slope(i), w, p);
        v.energy_competitor += detail::cell_energy(u.slope(i) + (f1 - f0) / h, w, p);
    }
    v.ratio = support_ratio(v.energy_u, v.energy_competitor);
    v.threshold = claimed_q * (1.0 + tol.relative) + tol.allowance;
    v.pass = v.ratio <= v.threshold;
    v.slack = v.threshold - v.ratio;
    return v;
}

// ---------------------------------------------------------------------------
// Randomized stress suite

struct SuiteOptions {
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    PerturbationSign sign = PerturbationSign::Nonnegative;
    bool include_extremal = true;  ///< trial 0 replaces u by the discrete minimizer on the whole domain
    double allowance_c = 5.0;      ///< allowance = allowance_c * max cell width
    double relative_tolerance = 1e-9;
    unsigned jobs = 1;
    std::optional<double> exponent;
};

struct Bump {
    double center;
    double half_width;
    double height;
};

enum class PerturbationKind { Extremal, Bumps, Replacement };

inline const char* to_string(PerturbationKind k) {
    switch (k) {
    case PerturbationKind::Extremal: return "extremal";
    case PerturbationKind::Bumps: return "bumps";
    case PerturbationKind::Replacement: return "replacement";
    }
    return "?";
}

/// Enough to regenerate one perturbation: kind, support window, bump list or
/// replacement scale.
struct Witness {
    std::size_t trial = 0;
    PerturbationKind kind = PerturbationKind::Bumps;
    double ratio = 1.0;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::vector<Bump> bumps;
    double scale = 1.0;
};

struct SuiteReport {
    double claimed_q = 1.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double allowance = 0.0;
    double threshold = 1.0;
    double max_ratio = 0.0;
    Witness argmax;
    std::vector<Witness> failures;
    std::size_t passed = 0;

    bool pass() const { return failures.empty(); }
};

/// One generated perturbation restricted to the node window [first, first + values.size()).
struct Perturbation {
    Witness witness;
    std::size_t first = 0;
    std::vector<double> values;
};

namespace detail {

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

inline void apply_sign(std::vector<double>& phi, PerturbationSign sign) {
    for (double& f : phi) f = sign == PerturbationSign::Nonnegative ? std::max(f, 0.0) : std::min(f, 0.0);
}

} // namespace detail

/// Deterministic perturbation for (seed, trial). Support windows have
/// log-uniform left ends accumulating at the inner boundary.
inline Perturbation generate_perturbation(const PiecewiseLinearProfile& u, std::uint64_t seed, std::size_t trial,
                                          PerturbationSign sign) {
    const auto& g = u.grid;
    const std::size_t nodes = g.node_count();
    auto rng = detail::trial_rng(seed, trial);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double lo = g.lo(), hi = g.hi(), length = hi - lo;
    const double decades = std::max(1.0, std::log10(length / g.width(0)));
    const double a = lo + length * std::pow(10.0, -decades * unit(rng));
    const double b = unit(rng) < 0.25 ? hi : a + (hi - a) * unit(rng);

    const auto nodes_span = g.nodes();
    std::size_t ia = static_cast<std::size_t>(std::upper_bound(nodes_span.begin(), nodes_span.end(), a) - nodes_span.begin());
    ia = ia == 0 ? 0 : ia - 1;
    ia = std::min(ia, nodes - 3);
    std::size_t ib = static_cast<std::size_t>(std::lower_bound(nodes_span.begin(), nodes_span.end(), b) - nodes_span.begin());
    ib = std::clamp(ib, ia + 2, nodes - 1);

    Perturbation out;
    out.first = ia;
    out.values.assign(ib - ia + 1, 0.0);
    out.witness.trial = trial;
    out.witness.support_lo = g.node(ia);
    out.witness.support_hi = g.node(ib);

    double umin = u.values[0], umax = u.values[0];
    for (double v : u.values) {
        umin = std::min(umin, v);
        umax = std::max(umax, v);
    }
    const double range = std::max(umax - umin, 1e-300);
    const double xa = g.node(ia), xb = g.node(ib);

    if (unit(rng) < 0.5) {
        out.witness.kind = PerturbationKind::Bumps;
        const int count = 1 + static_cast<int>(unit(rng) * 4.0);
        for (int k = 0; k < std::min(count, 4); ++k) {
            Bump bump;
            bump.center = xa + (xb - xa) * unit(rng);
            bump.half_width = (xb - xa) * (0.01 + 0.49 * unit(rng));
            bump.height = 2.0 * range * unit(rng);
            out.witness.bumps.push_back(bump);
        }
        for (std::size_t i = ia + 1; i < ib; ++i) {
            const double x = g.node(i);
            double f = 0.0;
            for (const auto& bump : out.witness.bumps)
                f += bump.height * std::max(0.0, 1.0 - std::abs(x - bump.center) / bump.half_width);
            out.values[i - ia] = sign == PerturbationSign::Nonnegative ? f : -f;
        }
    } else {
        out.witness.kind = PerturbationKind::Replacement;
        out.witness.scale = 1.0 - unit(rng);
        const double ua = u.values[ia], ub = u.values[ib];
        for (std::size_t i = ia + 1; i < ib; ++i) {
            const double chord = ua + (ub - ua) * (g.node(i) - xa) / (xb - xa);
            out.values[i - ia] = out.witness.scale * (chord - u.values[i]);
        }
        detail::apply_sign(out.values, sign);
    }
    return out;
}

/// Whole-domain replacement of u by the discrete minimizer with u's boundary values.
inline Perturbation extremal_perturbation(const PiecewiseLinearProfile& u, PerturbationSign sign, std::optional<double> exponent) {
    const auto w = discrete_minimizer(u.grid, {u.values.front(), u.values.back()}, exponent);
    Perturbation out;
    out.first = 0;
    out.values.resize(u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i) out.values[i] = w.values[i] - u.values[i];
    out.values.front() = 0.0;
    out.values.back() = 0.0;
    detail::apply_sign(out.values, sign);
    out.witness.kind = PerturbationKind::Extremal;
    out.witness.support_lo = u.grid.lo();
    out.witness.support_hi = u.grid.hi();
    return out;
}

/// Energies of u and u + phi over the cells of the window where phi is not identically zero.
inline std::pair<double, double> window_energies(const PiecewiseLinearProfile& u, const std::vector<double>& u_cell_energy,
                                                 const Perturbation& phi, double p) {
    double eu = 0.0, ew = 0.0;
    const auto& g = u.grid;
    for (std::size_t k = 0; k + 1 < phi.values.size(); ++k) {
        const double f0 = phi.values[k], f1 = phi.values[k + 1];
        if (f0 == 0.0 && f1 == 0.0) continue;
        const std::size_t i = phi.first + k;
        eu += u_cell_energy[i];
        ew += detail::cell_energy(u.slope(i) + (f1 - f0) / g.width(i), g.cell_weight(i), p);
    }
    return {eu, ew};
}

/// Runs `trials` random perturbations (plus the extremal one, when enabled, as
/// trial 0) against u and collects every violation of
/// ratio <= claimed_q (1 + relative_tolerance) + allowance_c * h.
/// Trials are independent; results are merged by trial index, so the report
/// does not depend on `jobs`.
inline SuiteReport random_perturbation_suite(const PiecewiseLinearProfile& u, double claimed_q, const SuiteOptions& opt) {
    detail::require(opt.trials >= 1, "random_perturbation_suite: trials must be >= 1");
    detail::require(claimed_q >= 1.0, "random_perturbation_suite: claimed Q must be >= 1");
    const double p = opt.exponent.value_or(default_exponent(u.grid));

    std::vector<double> u_cell(u.grid.cell_count());
    for (std::size_t i = 0; i < u_cell.size(); ++i) u_cell[i] = cell_energy(u, i, p);

    SuiteReport report;
    report.claimed_q = claimed_q;
    report.trials = opt.trials;
    report.seed = opt.seed;
    report.allowance = opt.allowance_c * u.grid.max_width();
    report.threshold = claimed_q * (1.0 + opt.relative_tolerance) + report.allowance;

    std::optional<Perturbation> extremal;
    if (opt.include_extremal) extremal = extremal_perturbation(u, opt.sign, p);

    auto make = [&](std::size_t trial) {
        if (extremal && trial == 0) return *extremal;
        return generate_perturbation(u, opt.seed, trial, opt.sign);
    };
    auto ratio_of = [&](const Perturbation& phi) {
        const auto [eu, ew] = window_energies(u, u_cell, phi, p);
        return support_ratio(eu, ew);
    };

    std::vector<double> ratios(opt.trials);
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(opt.trials)));
    auto worker = [&](unsigned id) {
        for (std::size_t t = id; t < opt.trials; t += jobs) ratios[t] = ratio_of(make(t));
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned id = 0; id < jobs; ++id) pool.emplace_back(worker, id);
        for (auto& th : pool) th.join();
    }

    std::size_t best = 0;
    for (std::size_t t = 0; t < opt.trials; ++t) {
        if (ratios[t] > ratios[best]) best = t;
        if (ratios[t] <= report.threshold) {
            ++report.passed;
        } else {
            auto w = make(t).witness;
            w.trial = t;
            w.ratio = ratios[t];
            report.failures.push_back(std::move(w));
        }
    }
    report.max_ratio = ratios[best];
    report.argmax = make(best).witness;
    report.argmax.trial = best;
    report.argmax.ratio = ratios[best];
    return report;
}

// ---------------------------------------------------------------------------
// Certificate that min{u1, u2} is not a max{Q1,Q2}-quasisuperminimizer

struct Theorem0Certificate {
    double i_u;          ///< c-normalized energy of min{u1, u2} on A_{1/e,1}
    double q2_times_iv;  ///< q2 times the minimizer energy, which is 1
    double margin;       ///< i_u - q2
    double q_hat;
    double q_bar;
    double x0;
};

/// Energy of the composed profile from the closed forms of its two pieces:
/// the inner piece over log-width x0, the outer piece over 1 - x0.
inline Theorem0Certificate theorem0_certificate(const CompositionInput& input) {
    const auto r = q_hat<long double>(input);
    const auto params = ConformalParams::conformal(*input.n);
    const double x0 = static_cast<double>(r.x0);
    const double y0 = static_cast<double>(r.y0);
    const double i_u = closed_form_energy(static_cast<double>(r.alpha1), 0.0, x0, params) +
                       closed_form_energy(static_cast<double>(r.alpha2), 0.0, y0, params);
    const double iv = closed_form_energy(1.0, 0.0, 1.0, params);
    return {i_u, input.q2 * iv, i_u - input.q2 * iv, static_cast<double>(r.q_hat), static_cast<double>(r.q_bar), x0};
}

} // namespace qsm
