#pragma once

// The two composition tables: radial q_hat by dimension, and the general-p
// constant for ordered pairs, each with the q_bar upper bound.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "qsm/composition.hpp"
#include "qsm/constants.hpp"

namespace qsm {

/// Shortest round-trip representation of a double.
inline std::string shortest(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

/// Fixed-point with `decimals` digits after the point, correctly rounded.
inline std::string format_fixed(long double x, int decimals) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.*Lf", decimals, x);
    return buf;
}

/// Digits of a decimal string after its leading zeros.
inline int significant_digits(const std::string& s) {
    int count = 0;
    bool leading = true;
    for (char c : s) {
        if (c < '0' || c > '9') continue;
        if (leading && c == '0') continue;
        leading = false;
        ++count;
    }
    return count;
}

/// `digits` significant digits, trailing zeros kept (1.001480660).
inline std::string format_significant(long double x, int digits) {
    if (x == 0.0L || !std::isfinite(static_cast<double>(x))) return format_fixed(x, std::max(digits - 1, 0));
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(static_cast<double>(x)))));
    int decimals = std::max(digits - 1 - exponent, 0);
    std::string s = format_fixed(x, decimals);
    // Rounding up can carry into a new leading digit (9.99.. -> 10.0..).
    if (significant_digits(s) > digits && decimals > 0) s = format_fixed(x, decimals - 1);
    return s;
}

namespace detail {

template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& body) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < jobs; ++id)
        pool.emplace_back([&, id] {
            for (std::size_t i = id; i < count; i += jobs) body(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace detail

struct Table2 {
    std::vector<int> dims;
    std::vector<double> qs;
    std::vector<std::vector<long double>> q_hat;  ///< [q][dim]
    std::vector<long double> q_bar;
};

inline const std::vector<int> kTable2Dims = {2, 3, 10, 100};
inline const std::vector<double> kTable2Qs = {1.001, 1.01, 1.125, 2, 10, 100};
inline const std::vector<double> kTable3Ps = {1.2, 2, 10, 100};
inline const std::vector<std::pair<double, double>> kTable3Pairs = {{2, 10}, {9, 10}, {2, 100}, {10, 100}, {90, 100}};

inline Table2 compute_table2(const std::vector<int>& dims, const std::vector<double>& qs, unsigned jobs = 1) {
    Table2 t{dims, qs, std::vector<std::vector<long double>>(qs.size(), std::vector<long double>(dims.size())), {}};
    for (double q : qs) t.q_bar.push_back(q_bar<long double>(q, q));
    detail::parallel_for(qs.size() * dims.size(), jobs, [&](std::size_t k) {
        const std::size_t i = k / dims.size(), j = k % dims.size();
        t.q_hat[i][j] = q_hat<long double>(CompositionInput::radial(qs[i], qs[i], dims[j])).q_hat;
    });
    return t;
}

struct Table3Row {
    double q1, q2;
    std::vector<long double> values;  ///< one per p
    long double q_bar;
};

struct Table3 {
    std::vector<double> ps;
    std::vector<Table3Row> rows;  ///< each pair in both orderings
};

inline Table3 compute_table3(const std::vector<double>& ps, const std::vector<std::pair<double, double>>& pairs,
                             unsigned jobs = 1) {
    Table3 t{ps, {}};
    for (auto [a, b] : pairs) {
        t.rows.push_back({a, b, std::vector<long double>(ps.size()), q_bar<long double>(a, b)});
        t.rows.push_back({b, a, std::vector<long double>(ps.size()), q_bar<long double>(b, a)});
    }
    detail::parallel_for(t.rows.size() * ps.size(), jobs, [&](std::size_t k) {
        auto& row = t.rows[k / ps.size()];
        const std::size_t j = k % ps.size();
        row.values[j] = q_tilde<long double>(CompositionInput::general(row.q1, row.q2, ps[j])).q_hat;
    });
    return t;
}

inline constexpr int kTable2Digits = 10;
inline constexpr int kTable3Decimals = 6;

inline void write_table2_csv(std::ostream& out, const Table2& t, const std::string& command) {
    out << "# " << command << '\n' << "Q";
    for (int n : t.dims) out << ",n=" << n;
    out << ",q_bar\n";
    for (std::size_t i = 0; i < t.qs.size(); ++i) {
        out << shortest(t.qs[i]);
        for (long double v : t.q_hat[i]) out << ',' << format_significant(v, kTable2Digits);
        out << ',' << format_significant(t.q_bar[i], kTable2Digits) << '\n';
    }
}

inline void write_table3_csv(std::ostream& out, const Table3& t, const std::string& command) {
    out << "# " << command << '\n' << "Q1,Q2";
    for (double p : t.ps) out << ",p=" << shortest(p);
    out << ",q_bar\n";
    for (const auto& row : t.rows) {
        out << shortest(row.q1) << ',' << shortest(row.q2);
        for (long double v : row.values) out << ',' << format_fixed(v, kTable3Decimals);
        out << ',' << format_fixed(row.q_bar, kTable3Decimals) << '\n';
    }
}

} // namespace qsm
