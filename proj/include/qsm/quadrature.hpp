#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature with interval halving.
//
// The Kronrod nodes are strictly interior, so integrable endpoint
// singularities are never evaluated; a node that rounds onto an endpoint of
// the whole range contributes zero. Intervals stop splitting at the depth
// limit or when their midpoint is no longer representable.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace qsm {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    int max_depth = 60;
    int max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value, error;
    int depth;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment kronrod15(F& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));

    const double h = std::abs(half);
    resk *= half;
    resabs *= h;
    resasc *= h;
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk, err, depth};
}

} // namespace detail

/// Integrates f over (a, b).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> active;
    std::vector<detail::Segment> frozen;
    double total = 0.0;
    double total_err = 0.0;

    const double lo = std::min(a, b), hi = std::max(a, b);
    auto counted = [&](double x) {
        ++out.evaluations;
        if (!(x > lo && x < hi)) return 0.0;
        return f(x);
    };
    auto admit = [&](const detail::Segment& s) {
        total += s.value;
        total_err += s.error;
        const double mid = 0.5 * (s.a + s.b);
        if (s.depth >= opt.max_depth || !(mid > std::min(s.a, s.b) && mid < std::max(s.a, s.b)))
            frozen.push_back(s);
        else
            active.push(s);
    };

    admit(detail::kronrod15(counted, a, b, 0));
    int intervals = 1;
    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };

    while (total_err > tolerance() && !active.empty() && intervals < opt.max_intervals) {
        const detail::Segment worst = active.top();
        active.pop();
        total -= worst.value;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        admit(detail::kronrod15(counted, worst.a, mid, worst.depth + 1));
        admit(detail::kronrod15(counted, mid, worst.b, worst.depth + 1));
        ++intervals;
    }

    // Re-sum to shed the drift of the running updates.
    double value = 0.0, err = 0.0;
    for (const auto& s : frozen) {
        value += s.value;
        err += s.error;
    }
    while (!active.empty()) {
        value += active.top().value;
        err += active.top().error;
        active.pop();
    }
    out.value = value;
    out.error = err;
    out.intervals = intervals;
    out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
    return out;
}

} // namespace qsm
