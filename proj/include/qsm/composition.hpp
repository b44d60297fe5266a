#pragma once

// Lower bounds for the quasisuperminimizing constant of min{u1, u2}.
//
// u1 = log^{alpha1}|ex| (alpha1 > 1, constant q1) and u2 = 1 - (-log|x|)^{alpha2}
// (alpha2 < 1, constant q2) both run from 0 to 1 across A_{1/e,1}. They cross
// once, at x0 = log(e r0), the interior root of (1 - x)^{alpha2} + x^{alpha1} = 1.
// The energy of the minimum, relative to the minimizer log|ex|, is
//   q1 x0^{p(alpha1-1)+1} + q2 (1 - x0)^{p(alpha2-1)+1}.
// For integer p = n this is the radial constant; the same formula is the 1-D
// constant for any real p > 1.

#include <cmath>
#include <concepts>
#include <optional>
#include <vector>

#include "qsm/constants.hpp"
#include "qsm/error.hpp"
#include "qsm/roots.hpp"

namespace qsm {

struct CompositionInput {
    double q1;
    double q2;
    double p;
    std::optional<int> n;

    static CompositionInput radial(double q1, double q2, int n) { return {q1, q2, static_cast<double>(n), n}; }
    static CompositionInput general(double q1, double q2, double p) { return {q1, q2, p, std::nullopt}; }

    void validate() const {
        detail::require(q1 > 1.0 && q2 > 1.0, "composition needs q1, q2 > 1");
        detail::require(p > 1.0 && std::isfinite(p), "composition needs p > 1");
    }

    ConformalParams params() const { return {p, n}; }
};

template <std::floating_point T = long double>
struct CompositionResult {
    T q1, q2, p;
    T alpha1;  ///< upper branch for q1
    T alpha2;  ///< lower branch for q2
    T x0;      ///< log(e r0)
    T y0;      ///< 1 - x0 = -log r0
    T r0;
    T q_hat;
    T q_bar;
    bool exceeds_max;
};

/// Residual 1 - (1 - x)^{alpha2} - x^{alpha1} of the crossing equation.
template <std::floating_point T>
T crossing_residual(T x, T alpha1, T alpha2) {
    return T(1) - std::pow(T(1) - x, alpha2) - std::pow(x, alpha1);
}

/// Crossing point with its complement carried separately: for exponents near
/// the ends of their branches x0 sits within 1e-13 of 1, where 1 - x0 cannot be
/// recovered from x0.
template <std::floating_point T>
struct Crossing {
    T x0;
    T y0;  ///< 1 - x0
    T log_x0;
    T log_y0;
};

namespace detail {

// Logistic coordinate z = log(x / (1 - x)). log x and log(1 - x) are both
// accurate for every z, so neither end of (0, 1) loses digits.
template <std::floating_point T>
T softplus(T z) {
    return z > T(0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

} // namespace detail

/// Interior root x0 in (0, 1) of (1 - x)^{alpha2} + x^{alpha1} = 1.
///
/// With w(x) = (1 - x)^{alpha2} + x^{alpha1} - 1, w' vanishes exactly where
/// f(x) = x (1 - x)^beta equals (alpha2/alpha1)^{1/(alpha1-1)}, beta =
/// (1 - alpha2)/(alpha1 - 1). f rises on (0, 1/(1+beta)) and falls after, so
/// there are two critical points c1 < c2 and the crossing lies between them.
/// All three roots are found in the logistic coordinate; the crossing itself by
/// bisection on a rescaled residual.
template <std::floating_point T>
Crossing<T> solve_crossing(T alpha1, T alpha2) {
    if (!(alpha1 > T(1)) || !(alpha2 < T(1)) || !(alpha2 > T(0)))
        throw DomainError("solve_x0: need 0 < alpha2 < 1 < alpha1");

    auto log_x = [](T z) { return -detail::softplus(-z); };
    auto log_y = [](T z) { return -detail::softplus(z); };
    // log(-log x), kept finite where log x itself underflows to -0.
    auto log_neg_log_x = [&](T z) { return z > T(60) ? -z : std::log(-log_x(z)); };
    // A positive multiple of w. For z > 0 both terms of w can underflow, so it is
    // divided by y^{alpha2} and written as 1 - (1 - x^{alpha1}) / y^{alpha2}.
    auto w = [&](T z) {
        const T lx = log_x(z), ly = log_y(z);
        if (z <= T(0)) return std::expm1(alpha2 * ly) + std::exp(alpha1 * lx);
        const T v = alpha1 * lx;
        const T exprel = v == T(0) ? T(1) : std::expm1(v) / v;
        return -std::expm1(std::log(alpha1) + log_neg_log_x(z) + std::log(exprel) - alpha2 * ly);
    };

    const T beta = (T(1) - alpha2) / (alpha1 - T(1));
    const T log_kappa = std::log(alpha2 / alpha1) / (alpha1 - T(1));
    auto h = [&](T z) { return log_x(z) + beta * log_y(z) - log_kappa; };
    auto dh = [&](T z) { return std::exp(log_y(z)) - beta * std::exp(log_x(z)); };
    const T peak = -std::log(beta);

    // h -> -inf linearly in |z| at both ends, so doubling steps find a bracket.
    auto outward = [&](T direction) -> std::optional<T> {
        for (T step = T(1); step < T(1e15); step *= T(2)) {
            const T z = peak + direction * step;
            if (h(z) < T(0)) {
                return direction < T(0) ? safeguarded_newton<T>(h, dh, z, peak).value
                                        : safeguarded_newton<T>(h, dh, peak, z).value;
            }
        }
        return std::nullopt;
    };

    T z0;
    std::optional<T> c1, c2;
    if (h(peak) > T(0)) {
        c1 = outward(T(-1));
        c2 = outward(T(1));
    }
    if (c1 && c2 && w(*c1) < T(0) && w(*c2) > T(0)) {
        z0 = bisect<T>(w, *c1, *c2).value;
    } else {
        // Near-degenerate exponents: the critical points are not resolvable.
        const int points = 10000;
        std::optional<T> found;
        T prev_z = T(-40), prev_w = w(prev_z);
        for (int i = 1; i <= points && !found; ++i) {
            const T z = T(-40) + T(80) * static_cast<T>(i) / static_cast<T>(points);
            const T wz = w(z);
            if (prev_w < T(0) && wz > T(0)) found = bisect<T>(w, prev_z, z).value;
            prev_z = z;
            prev_w = wz;
        }
        if (!found) throw ConvergenceError("solve_x0: no sign change of the crossing function", points);
        z0 = *found;
    }
    const T lx = log_x(z0), ly = log_y(z0);
    return {std::exp(lx), std::exp(ly), lx, ly};
}

template <std::floating_point T>
T solve_x0(T alpha1, T alpha2) {
    return solve_crossing(alpha1, alpha2).x0;
}

/// The general-p constant; p need not be an integer.
template <std::floating_point T = long double>
CompositionResult<T> q_tilde(const CompositionInput& input) {
    input.validate();
    const auto params = ConformalParams::exponent(input.p);
    const T q1 = static_cast<T>(input.q1);
    const T q2 = static_cast<T>(input.q2);
    const T p = static_cast<T>(input.p);

    const T alpha1 = alphas_of_q<T>(q1, params).alpha_upper;
    const T alpha2 = alphas_of_q<T>(q2, params).alpha_lower;
    const auto [x0, y0, log_x0, log_y0] = solve_crossing<T>(alpha1, alpha2);
    // Exponents reach 1e10 on the upper branch; powers go through the logs.
    const T value = q1 * std::exp((p * (alpha1 - T(1)) + T(1)) * log_x0) +
                    q2 * std::exp((p * (alpha2 - T(1)) + T(1)) * log_y0);

    CompositionResult<T> r{};
    r.q1 = q1;
    r.q2 = q2;
    r.p = p;
    r.alpha1 = alpha1;
    r.alpha2 = alpha2;
    r.x0 = x0;
    r.y0 = y0;
    r.r0 = std::exp(-y0);
    r.q_hat = value;
    r.q_bar = q_bar<T>(q1, q2);
    r.exceeds_max = value > std::max(q1, q2);
    return r;
}

/// The radial constant for integer p = n >= 2. Evaluated through x0; the r0
/// route (log(e r0), -log r0) is recomputed and must agree to 1e-12.
template <std::floating_point T = long double>
CompositionResult<T> q_hat(const CompositionInput& input) {
    input.validate();
    if (!input.n || *input.n < 2 || input.p != static_cast<double>(*input.n))
        throw DomainError("q_hat: requires p == n with integer n >= 2");
    auto r = q_tilde<T>(input);

    const T log_er0 = T(1) + std::log(r.r0);
    const T neg_log_r0 = -std::log(r.r0);
    const T via_r0 = r.q1 * std::pow(log_er0, r.p * (r.alpha1 - T(1)) + T(1)) +
                     r.q2 * std::pow(neg_log_r0, r.p * (r.alpha2 - T(1)) + T(1));
    if (!(std::abs(via_r0 - r.q_hat) <= T(1e-12) * r.q_hat))
        throw ConvergenceError("q_hat: x0 and r0 evaluations disagree", 0);
    return r;
}

/// min{u1, u2} on A_{1/e,1}: u1 = log^{alpha1}(er) up to r0, u2 = 1 - (-log r)^{alpha2} after.
struct MinProfile {
    double alpha1;
    double alpha2;
    double x0;
    double y0;  ///< 1 - x0
    double r0;
    int n;

    double log_crossing() const { return -y0; }
    double sample_offset() const { return 1.0; }

    /// u(s) - 1 at log-radius s in [-1, 0].
    double relative_value_at_log(double s) const {
        if (s <= log_crossing()) return std::expm1(alpha1 * std::log1p(std::max(s, -1.0)));
        return -std::pow(std::max(-s, 0.0), alpha2);
    }

    double value_at_log(double s) const {
        if (s <= log_crossing()) return std::pow(std::max(1.0 + s, 0.0), alpha1);
        return 1.0 - std::pow(std::max(-s, 0.0), alpha2);
    }

    double inner_piece_at_log(double s) const { return std::pow(std::max(1.0 + s, 0.0), alpha1); }
    double outer_piece_at_log(double s) const { return 1.0 - std::pow(std::max(-s, 0.0), alpha2); }

    double value(double r) const {
        if (!(r >= std::exp(-1.0) && r <= 1.0)) throw DomainError("MinProfile: radius outside A_{1/e,1}");
        return value_at_log(std::log(r));
    }

    bool contains_log(double s) const { return s >= -1.0 - 1e-15 && s <= 1e-15; }
};

/// The composed profile min{u1, u2} for p = n.
inline MinProfile min_profile(const CompositionInput& input) {
    const auto r = q_hat<long double>(input);
    return {static_cast<double>(r.alpha1), static_cast<double>(r.alpha2), static_cast<double>(r.x0),
            static_cast<double>(r.y0), static_cast<double>(r.r0), *input.n};
}

struct AsymmetryRow {
    double q1, q2, p;
    double forward;   ///< q_tilde(q1, q2, p)
    double backward;  ///< q_tilde(q2, q1, p)
    double difference;
};

/// Both orderings of each pair. No sign of the difference is implied.
inline std::vector<AsymmetryRow> asymmetry_scan(const std::vector<std::pair<double, double>>& pairs, double p) {
    std::vector<AsymmetryRow> rows;
    rows.reserve(pairs.size());
    for (auto [a, b] : pairs) {
        const long double f = q_tilde(CompositionInput::general(a, b, p)).q_hat;
        const long double g = q_tilde(CompositionInput::general(b, a, p)).q_hat;
        rows.push_back({a, b, p, static_cast<double>(f), static_cast<double>(g), static_cast<double>(f - g)});
    }
    return rows;
}

} // namespace qsm
