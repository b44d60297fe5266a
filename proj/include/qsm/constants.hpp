#pragma once

// Closed-form constants of log-power quasiminimizers in the conformal case.
//
// Q(alpha, p) = alpha^p / (p*alpha - p + 1) is the optimal quasiminimizing
// constant of log^alpha|x|. For q > 1 it has exactly two preimages, one on each
// side of alpha = 1, and both are needed by the composition construction.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <optional>
#include <string>

#include "qsm/error.hpp"
#include "qsm/roots.hpp"

namespace qsm {

/// Exponent p > 1 and, for radial work, the dimension n with p == n.
struct ConformalParams {
    double p = 2.0;
    std::optional<int> n;

    static ConformalParams conformal(int dimension) {
        detail::require(dimension >= 2, "dimension must be >= 2");
        return {static_cast<double>(dimension), dimension};
    }

    static ConformalParams exponent(double p) {
        detail::require(p > 1.0 && std::isfinite(p), "exponent p must be > 1");
        return {p, std::nullopt};
    }

    bool is_conformal() const noexcept { return n.has_value() && p == static_cast<double>(*n); }

    /// n, checked against p for operations that integrate radially.
    int radial_dimension() const {
        if (!is_conformal()) throw DomainError("radial energies require p == n with integer n >= 2");
        return *n;
    }

    /// Surface area c_{n-1} of the unit sphere S^{n-1}.
    double sphere_area() const {
        if (!n) throw DomainError("sphere area needs the dimension n");
        const double half = 0.5 * static_cast<double>(*n);
        return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
    }

    void validate() const {
        detail::require(p > 1.0 && std::isfinite(p), "exponent p must be > 1");
        if (n) detail::require(*n >= 2, "dimension must be >= 2");
    }
};

/// Lower bound 1 - 1/p of admissible exponents.
template <std::floating_point T = double>
T alpha_floor(const ConformalParams& params) {
    return T(1) - T(1) / static_cast<T>(params.p);
}

namespace detail {

// p*alpha - p + 1 with a single rounding.
template <std::floating_point T>
T q_denominator(T alpha, T p) {
    return std::fma(p, alpha, T(1) - p);
}

} // namespace detail

/// Optimal quasiminimizing constant alpha^p / (p alpha - p + 1).
template <std::floating_point T>
T q_of_alpha(T alpha, const ConformalParams& params) {
    params.validate();
    const T p = static_cast<T>(params.p);
    const T denom = detail::q_denominator(alpha, p);
    if (!(denom > T(0)) || !std::isfinite(alpha))
        throw DomainError("q_of_alpha: alpha must exceed 1 - 1/p");
    if (alpha == T(1)) return T(1);
    return std::pow(alpha, p) / denom;
}

template <std::floating_point T>
struct AlphaBranches {
    T q;
    T alpha_lower; ///< in (1 - 1/p, 1]
    T alpha_upper; ///< in [1, inf)
};

/// Both exponents alpha' <= 1 <= alpha with Q(alpha', p) = Q(alpha, p) = q.
///
/// The equation is solved in log form, p log(alpha) - log(p alpha - p + 1) = log q,
/// which stays well scaled for large q. The lower branch is bracketed on
/// [1 - 1/p + eps, 1] with eps shrinking geometrically, the upper one on
/// [1, hi] with hi doubling from 2.
template <std::floating_point T>
AlphaBranches<T> alphas_of_q(T q, const ConformalParams& params) {
    params.validate();
    if (!(q >= T(1)) || !std::isfinite(q)) throw DomainError("alphas_of_q: q must be >= 1");
    if (q - T(1) < T(1e-12)) return {q, T(1), T(1)};

    const T p = static_cast<T>(params.p);
    const T log_q = std::log(q);
    auto g = [&](T a) { return p * std::log(a) - std::log(detail::q_denominator(a, p)) - log_q; };
    auto dg = [&](T a) { return p * (p - T(1)) * (a - T(1)) / (a * detail::q_denominator(a, p)); };

    constexpr int kMaxBracket = 2000;

    T hi = T(2);
    int grow = 0;
    while (g(hi) <= T(0)) {
        hi *= T(2);
        if (++grow > kMaxBracket || !std::isfinite(hi))
            throw ConvergenceError("alphas_of_q: upper bracket not found", grow);
    }
    const T upper = safeguarded_newton<T>(g, dg, T(1), hi).value;

    const T floor = alpha_floor<T>(params);
    T eps = (T(1) - floor) / T(2);
    T lo = floor + eps;
    int shrink = 0;
    while (!(detail::q_denominator(lo, p) > T(0)) || g(lo) <= T(0)) {
        eps /= T(2);
        lo = floor + eps;
        if (++shrink > kMaxBracket || eps == T(0) || lo <= floor)
            throw ConvergenceError("alphas_of_q: lower bracket not found", shrink);
    }
    const T lower = safeguarded_newton<T>(g, dg, lo, T(1)).value;

    return {q, lower, upper};
}

/// Upper bound for the quasisuperminimizing constant of min{u1, u2}.
template <std::floating_point T>
T q_bar(T q1, T q2) {
    if (!(q1 >= T(1)) || !(q2 >= T(1))) throw DomainError("q_bar: constants must be >= 1");
    if (q1 == T(1) && q2 == T(1)) return T(1);
    const T prod = q1 * q2;
    return (q1 + q2 - T(2)) * prod / (prod - T(1));
}

/// The older bound min{q1 + q2, q1 q2}.
template <std::floating_point T>
T q_kinnunen_martio(T q1, T q2) {
    if (!(q1 >= T(1)) || !(q2 >= T(1))) throw DomainError("q_kinnunen_martio: constants must be >= 1");
    return std::min(q1 + q2, q1 * q2);
}

} // namespace qsm
