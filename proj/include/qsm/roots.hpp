#pragma once

#include <cmath>
#include <concepts>
#include <limits>

#include "qsm/error.hpp"

namespace qsm {

template <std::floating_point T>
struct RootResult {
    T value;
    int iterations;
};

/// Safeguarded Newton iteration on a bracket [lo, hi] with f(lo) and f(hi) of
/// opposite sign. Newton steps that leave the current bracket, or that fail to
/// halve the bracket every two iterations, are replaced by bisection. Runs until
/// the bracket cannot shrink any further in T, so the result is as close to the
/// root as the arithmetic allows.
template <std::floating_point T, class F, class DF>
RootResult<T> safeguarded_newton(F&& f, DF&& df, T lo, T hi, int max_iter = 400) {
    T flo = f(lo);
    T fhi = f(hi);
    if (flo == T(0)) return {lo, 0};
    if (fhi == T(0)) return {hi, 0};
    if ((flo < 0) == (fhi < 0)) throw ConvergenceError("root not bracketed", 0);

    const bool increasing = flo < 0;
    T x = lo + (hi - lo) / 2;
    T width_two_ago = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        const T fx = f(x);
        if (fx == T(0)) return {x, it};
        if ((fx < 0) == increasing) {
            lo = x;
        } else {
            hi = x;
        }
        const T mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) return {std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi, it};

        T next = mid;
        const T d = df(x);
        if (std::isfinite(d) && d != T(0)) {
            const T cand = x - fx / d;
            if (cand > lo && cand < hi) next = cand;
        }
        if (it % 2 == 0) {
            if (hi - lo > width_two_ago / 2) next = mid;
            width_two_ago = hi - lo;
        }
        if (next == x) {
            // Newton has stalled on x itself; probe a neighbour to shrink the bracket.
            next = (fx < 0) == increasing ? std::nextafter(x, hi) : std::nextafter(x, lo);
            if (next <= lo || next >= hi) return {x, it};
        }
        x = next;
    }
    throw ConvergenceError("safeguarded Newton did not converge", max_iter);
}

/// Plain bisection to the resolution of T. `f` must change sign on [lo, hi].
template <std::floating_point T, class F>
RootResult<T> bisect(F&& f, T lo, T hi, int max_iter = 20000) {
    T flo = f(lo);
    const T fhi = f(hi);
    if (flo == T(0)) return {lo, 0};
    if (fhi == T(0)) return {hi, 0};
    if ((flo < 0) == (fhi < 0)) throw ConvergenceError("root not bracketed", 0);
    for (int it = 1; it <= max_iter; ++it) {
        const T mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) return {mid, it};
        const T fm = f(mid);
        if (fm == T(0)) return {mid, it};
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw ConvergenceError("bisection did not converge", max_iter);
}

} // namespace qsm
