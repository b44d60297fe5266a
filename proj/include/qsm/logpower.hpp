#pragma once

// Log-power radial profiles and their n-energies on annuli (p = n).
//
// In the log-radius s = log r the conformal energy density |u'(r)|^n r^{n-1} dr
// becomes |du/ds|^n ds, so every energy here is a 1-D integral in s. Values
// are "c-normalized": the sphere factor c_{n-1} is left out unless asked for.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string_view>

#include "qsm/constants.hpp"
#include "qsm/error.hpp"
#include "qsm/quadrature.hpp"

namespace qsm {

/// The shell r1 < |x| < r2 in R^n.
struct Annulus {
    double r1;
    double r2;
    int n;

    static Annulus make(double r1, double r2, int n) {
        detail::require(n >= 2, "annulus dimension must be >= 2");
        detail::require(r1 >= 0.0 && r1 < r2, "annulus needs 0 <= r1 < r2");
        return {r1, r2, n};
    }

    /// A_{1/e, 1}, where the composition construction lives.
    static Annulus canonical(int n) { return make(std::exp(-1.0), 1.0, n); }

    /// A_{1, gamma}.
    static Annulus from_one(double gamma, int n) { return make(1.0, gamma, n); }

    double log_inner() const { return std::log(r1); }
    double log_outer() const { return std::log(r2); }
    bool contains(double r) const { return r >= r1 && r <= r2; }
};

enum class Orientation { Inner, Outer };

/// A log-power anchored at one boundary of its annulus.
///
/// Inner:  u(r) = log^alpha(r / r1), zero on the inner sphere (log^alpha|ex| on A_{1/e,1}).
/// Outer:  u(r) = 1 - log^alpha(r2 / r), one on the outer sphere (1 - (-log|x|)^alpha on A_{1/e,1}).
struct LogPowerProfile {
    double alpha;
    Orientation orientation;
    Annulus annulus;

    static LogPowerProfile make(double alpha, Orientation orientation, Annulus annulus) {
        detail::require(alpha > 1.0 - 1.0 / annulus.n, "log-power exponent must exceed 1 - 1/n");
        if (orientation == Orientation::Inner)
            detail::require(annulus.r1 > 0.0, "inner log-power needs r1 > 0");
        else
            detail::require(std::isfinite(annulus.r2), "outer log-power needs a finite r2");
        return {alpha, orientation, annulus};
    }

    /// Constant the sampled values are measured from, chosen so that nodal
    /// values near the singular boundary keep full relative precision.
    double sample_offset() const { return orientation == Orientation::Inner ? 0.0 : 1.0; }

    /// u(s) - sample_offset() at log-radius s.
    double relative_value_at_log(double s) const {
        if (orientation == Orientation::Inner) {
            const double d = std::max(s - annulus.log_inner(), 0.0);
            return std::pow(d, alpha);
        }
        const double d = std::max(annulus.log_outer() - s, 0.0);
        return -std::pow(d, alpha);
    }

    double value_at_log(double s) const { return sample_offset() + relative_value_at_log(s); }

    /// du/ds.
    double log_derivative(double s) const {
        const double d = orientation == Orientation::Inner ? s - annulus.log_inner() : annulus.log_outer() - s;
        return alpha * std::pow(std::max(d, 0.0), alpha - 1.0);
    }

    bool contains_log(double s) const {
        constexpr double slack = 8 * std::numeric_limits<double>::epsilon();
        const double lo = annulus.r1 > 0.0 ? annulus.log_inner() : -std::numeric_limits<double>::infinity();
        const double hi = annulus.log_outer();
        return s >= lo - slack * (1 + std::abs(lo)) && s <= hi + slack * (1 + std::abs(hi));
    }
};

/// u(r) for r inside the profile's annulus.
inline double eval_profile(const LogPowerProfile& profile, double r) {
    if (!profile.annulus.contains(r)) throw DomainError("eval_profile: radius outside the annulus");
    if (profile.orientation == Orientation::Inner) {
        const double d = std::max(std::log(r) - profile.annulus.log_inner(), 0.0);
        return std::pow(d, profile.alpha);
    }
    const double d = std::max(profile.annulus.log_outer() - std::log(r), 0.0);
    return 1.0 - std::pow(d, profile.alpha);
}

/// Weighted 1-D energy of log^alpha r on (e^{s1}, e^{s2}):
/// Q(alpha, n) (s2^{n alpha - n + 1} - s1^{n alpha - n + 1}).
/// s1 = 0 is allowed; the energy is finite there for alpha > 1 - 1/n.
inline double closed_form_energy(double alpha, double s1, double s2, const ConformalParams& params) {
    const int n = params.radial_dimension();
    if (!(alpha > 1.0 - 1.0 / n)) throw DomainError("closed_form_energy: alpha must exceed 1 - 1/n");
    if (!(s1 >= 0.0) || !(s2 > s1)) throw DomainError("closed_form_energy: need 0 <= s1 < s2");
    const double c = n * alpha - n + 1.0;
    return q_of_alpha(alpha, params) * (std::pow(s2, c) - std::pow(s1, c));
}

/// Adaptive quadrature of the weighted energy: integral of |phi'(r)|^p r^{n-1}
/// over (r1, r2), without the sphere factor.
template <class Derivative>
QuadratureResult quadrature_energy(Derivative&& dphi, double r1, double r2, const ConformalParams& params,
                                   const QuadratureOptions& opt = {}) {
    params.validate();
    if (!params.n) throw DomainError("quadrature_energy: dimension n required");
    if (!(r1 >= 0.0) || !(r2 > r1)) throw DomainError("quadrature_energy: need 0 <= r1 < r2");
    const double p = params.p;
    const double nm1 = static_cast<double>(*params.n - 1);
    auto integrand = [&](double r) {
        const double d = std::abs(dphi(r));
        if (d == 0.0) return 0.0;
        return std::pow(d, p) * std::pow(r, nm1);
    };
    return integrate(integrand, r1, r2, opt);
}

namespace detail {

// log(1 - e^{-x}) for x > 0, accurate at both ends.
inline double log_one_minus_exp_neg(double x) {
    return x < std::numbers::ln2 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

} // namespace detail

/// Energy quotient of log^alpha against the minimizer with the same boundary
/// values on a log-interval (s1, S s1).
///
/// Written as Q * exp(h(cL) + (n-1) h(L) - n h(alpha L)) with L = log S,
/// c = n alpha - n + 1 and h(x) = log(1 - e^{-x}); the linear parts of the
/// logarithms cancel exactly, so large S cannot overflow.
inline double k_of_S(double S, double alpha, const ConformalParams& params) {
    const int n = params.radial_dimension();
    if (!(S > 1.0)) throw DomainError("k_of_S: S must exceed 1");
    if (!(alpha > 1.0 - 1.0 / n)) throw DomainError("k_of_S: alpha must exceed 1 - 1/n");
    if (alpha == 1.0) return 1.0;
    const double L = std::log1p(S - 1.0);
    if (S - 1.0 < 1e-8) {
        // log k = n(n-1)(alpha-1)^2 L^2 / 24 + O(L^3)
        const double a = alpha - 1.0;
        return std::exp(n * (n - 1.0) * a * a * L * L / 24.0);
    }
    const double c = n * alpha - n + 1.0;
    const double log_ratio = detail::log_one_minus_exp_neg(c * L) + (n - 1.0) * detail::log_one_minus_exp_neg(L) -
                             n * detail::log_one_minus_exp_neg(alpha * L);
    return q_of_alpha(alpha, params) * std::exp(log_ratio);
}

/// -div(|grad u|^{n-2} grad u) for u = log^alpha|x| at |x| = r > 1.
inline double plap_of_logpower(double alpha, double r, const ConformalParams& params) {
    const int n = params.radial_dimension();
    if (!(r > 1.0)) throw DomainError("plap_of_logpower: r must exceed 1");
    if (!(alpha > 1.0 - 1.0 / n)) throw DomainError("plap_of_logpower: alpha must exceed 1 - 1/n");
    const double lr = std::log(r);
    return alpha * (1.0 - alpha) * std::pow(std::abs(alpha), n - 2.0) * (n - 1.0) *
           std::pow(lr, (n - 1.0) * alpha - n) * std::pow(r, -static_cast<double>(n));
}

struct MaxEnergy {
    double energy_profile;
    double energy_minimizer;
    double ratio;
};

/// Energy of the log-power on A_{1,gamma} (gamma > 1) or of (-log|x|)^alpha on
/// A_{gamma,1} (0 < gamma < 1), next to the minimizer with the same boundary
/// values. The ratio is exactly Q(alpha, n): the maximal energy Q allows.
inline MaxEnergy max_energy_check(double alpha, double gamma, const ConformalParams& params) {
    const int n = params.radial_dimension();
    if (!(alpha > 1.0 - 1.0 / n)) throw DomainError("max_energy_check: alpha must exceed 1 - 1/n");
    if (!(gamma > 0.0) || gamma == 1.0 || !std::isfinite(gamma))
        throw DomainError("max_energy_check: gamma must be positive, finite and != 1");
    const double width = std::abs(std::log(gamma));
    const double c = n * alpha - n + 1.0;
    const double q = q_of_alpha(alpha, params);
    const double minimizer = std::pow(width, c);
    return {q * minimizer, minimizer, q};
}

struct Table1Row {
    double qmin;
    double qsub;
    double qsuper;
};

/// Optimal quasiminimizing, quasisubminimizing and quasisuperminimizing
/// constants of log^alpha|x| on A_{1,gamma} (equivalently (-log|x|)^alpha on A_{gamma,1}).
inline Table1Row table1_classification(double alpha, const ConformalParams& params) {
    const int n = params.radial_dimension();
    if (!(alpha > 1.0 - 1.0 / n)) throw DomainError("table1_classification: alpha must exceed 1 - 1/n");
    const double q = q_of_alpha(alpha, params);
    if (alpha < 1.0) return {q, q, 1.0};
    if (alpha == 1.0) return {1.0, 1.0, 1.0};
    return {q, 1.0, q};
}

enum class EnergyMethod { ClosedForm, Quadrature };

inline std::string_view to_string(EnergyMethod m) {
    return m == EnergyMethod::ClosedForm ? "closed_form" : "quadrature";
}

struct EnergyReport {
    double alpha;
    Annulus domain;
    double value;
    EnergyMethod method;
    bool includes_sphere_factor;
    double error_estimate = 0.0;
};

/// n-energy of a log-power profile over its whole (finite) annulus.
inline EnergyReport profile_energy(const LogPowerProfile& profile, EnergyMethod method, bool with_sphere_factor,
                                   const QuadratureOptions& opt = {}) {
    const auto& A = profile.annulus;
    if (!(A.r1 > 0.0) || !std::isfinite(A.r2)) throw DomainError("profile_energy: annulus must be bounded away from 0 and inf");
    const auto params = ConformalParams::conformal(A.n);
    const double width = A.log_outer() - A.log_inner();
    EnergyReport report{profile.alpha, A, 0.0, method, with_sphere_factor};
    if (method == EnergyMethod::ClosedForm) {
        report.value = closed_form_energy(profile.alpha, 0.0, width, params);
    } else {
        // In s = log r the conformal weight is 1. Integrate in the log-distance d
        // from the singular end over dyadic pieces (d/2, d): each piece is smooth
        // at its own scale, and d stays representable far below where r would
        // round onto the end point.
        auto density = [&](double d) { return std::pow(profile.alpha * std::pow(d, profile.alpha - 1.0), params.p); };
        QuadratureResult q{0.0, 0.0, 0, 0, true};
        double hi = width;
        while (hi > std::numeric_limits<double>::min()) {
            const auto piece = integrate(density, 0.5 * hi, hi, opt);
            q.value += piece.value;
            q.error += piece.error;
            q.evaluations += piece.evaluations;
            q.intervals += piece.intervals;
            q.converged = q.converged && piece.converged;
            if (piece.value <= 1e-18 * q.value) break;
            hi *= 0.5;
        }
        report.value = q.value;
        report.error_estimate = q.error;
    }
    if (with_sphere_factor) {
        report.value *= params.sphere_area();
        report.error_estimate *= params.sphere_area();
    }
    return report;
}

} // namespace qsm
