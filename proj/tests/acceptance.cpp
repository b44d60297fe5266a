// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
//
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qsm/qsm.hpp"
#include "reference_values.hpp"

using namespace qsm;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (!pass) detail << "; ";
        pass = false;
        detail << why;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Radial table against the published 10-digit values.
void table2_reproduction(Outcome& o) {
    const auto t0 = Clock::now();
    const auto t = compute_table2(kTable2Dims, kTable2Qs);
    const double elapsed = seconds_since(t0);
    int ok = 0, total = 0;
    for (std::size_t i = 0; i < ref::kTable2.size(); ++i) {
        const auto& r = ref::kTable2[i];
        for (std::size_t j = 0; j < 4; ++j) {
            ++total;
            const long double printed = std::stold(std::string(r.published[j]));
            const long double rel = std::abs(t.q_hat[i][j] - printed) / printed;
            if (rel <= 5e-10L)
                ++ok;
            else
                o.fail(fmt("Q=%g n=%d computed %.13Lf printed %s rel %.3Le", r.q, ref::kDims[j], t.q_hat[i][j],
                           std::string(r.published[j]).c_str(), rel));
        }
        const long double printed = std::stold(std::string(r.published_q_bar));
        if (std::abs(t.q_bar[i] - printed) / printed > 5e-10L) o.fail(fmt("q_bar Q=%g", r.q));
    }
    if (elapsed >= 1.0) o.fail(fmt("runtime %.3f s", elapsed));
    o.detail << (o.pass ? "" : " | ") << ok << "/" << total << " cells, q_bar column checked, " << fmt("%.3f s", elapsed);
}

// 2. General-p table against the published 6-decimal values.
void table3_reproduction(Outcome& o) {
    const auto t0 = Clock::now();
    const auto t = compute_table3(kTable3Ps, kTable3Pairs);
    const double elapsed = seconds_since(t0);
    int ok = 0, total = 0;
    for (std::size_t i = 0; i < ref::kTable3.size(); ++i) {
        const auto& r = ref::kTable3[i];
        const auto& row = t.rows[i];
        if (row.q1 != r.q1 || row.q2 != r.q2) o.fail("row order");
        for (std::size_t j = 0; j < 4; ++j) {
            ++total;
            const long double printed = std::stold(std::string(r.published[j]));
            const long double diff = std::abs(row.values[j] - printed);
            if (diff <= 5e-7L)
                ++ok;
            else
                o.fail(fmt("(%g,%g) p=%g computed %.8Lf printed %s", r.q1, r.q2, ref::kPs[j], row.values[j],
                           std::string(r.published[j]).c_str()));
        }
        if (std::abs(row.q_bar - std::stold(std::string(r.published_q_bar))) > 5e-7L) o.fail(fmt("q_bar (%g,%g)", r.q1, r.q2));
    }
    if (elapsed >= 1.0) o.fail(fmt("runtime %.3f s", elapsed));
    o.detail << (o.pass ? "" : " | ") << ok << "/" << total << " values, " << fmt("%.3f s", elapsed);
}

// 3. The radial constant evaluated through r0 equals the general-p constant at p = n.
void radial_equals_general(Outcome& o) {
    long double worst = 0;
    for (const auto& r : ref::kTable2)
        for (int n : ref::kDims) {
            const auto g = q_tilde<long double>(CompositionInput::general(r.q, r.q, n));
            const long double log_er0 = 1.0L + std::log(g.r0), neg_log_r0 = -std::log(g.r0);
            const long double via_r0 = g.q1 * std::pow(log_er0, n * (g.alpha1 - 1) + 1) +
                                       g.q2 * std::pow(neg_log_r0, n * (g.alpha2 - 1) + 1);
            const long double radial = q_hat<long double>(CompositionInput::radial(r.q, r.q, n)).q_hat;
            worst = std::max({worst, std::abs(via_r0 - g.q_hat) / g.q_hat, std::abs(radial - g.q_hat) / g.q_hat});
        }
    if (!(worst < 1e-12L)) o.fail("difference too large");
    o.detail << (o.pass ? "" : " | ") << fmt("24 cells, worst relative difference %.2Le", worst);
}

// 4. The composed constant strictly exceeds max{Q1,Q2}, stays below q_bar,
//    and its margin over Q2 matches the reference values.
void certificate(Outcome& o) {
    int checked = 0;
    double example = 0;
    auto check = [&](double q1, double q2, double p, long double oracle, bool radial) {
        ++checked;
        double value, margin, qb;
        if (radial) {
            const auto c = theorem0_certificate(CompositionInput::radial(q1, q2, static_cast<int>(p)));
            value = c.q_hat;
            margin = c.margin;
            qb = c.q_bar;
        } else {
            const auto r = q_tilde<long double>(CompositionInput::general(q1, q2, p));
            value = static_cast<double>(r.q_hat);
            margin = static_cast<double>(r.q_hat - q2);
            qb = static_cast<double>(r.q_bar);
        }
        const double expected = static_cast<double>(oracle - q2);
        if (!(value > std::max(q1, q2))) o.fail(fmt("(%g,%g,p=%g) not above max", q1, q2, p));
        if (!(value < qb)) o.fail(fmt("(%g,%g,p=%g) not below q_bar", q1, q2, p));
        if (std::abs(margin - expected) > 1e-9 * std::max(1.0, static_cast<double>(oracle)))
            o.fail(fmt("(%g,%g,p=%g) margin %.12g expected %.12g", q1, q2, p, margin, expected));
        if (q1 == 2 && q2 == 2 && p == 2) example = margin;
    };
    for (const auto& r : ref::kTable2)
        for (std::size_t j = 0; j < 4; ++j) check(r.q, r.q, ref::kDims[j], r.oracle[j], true);
    for (const auto& r : ref::kTable3)
        for (std::size_t j = 0; j < 4; ++j) check(r.q1, r.q2, ref::kPs[j], r.oracle[j], ref::kPs[j] != 1.2);
    if (std::abs(example - 0.619135721) > 5e-10) o.fail("margin at Q=2, n=2");
    o.detail << (o.pass ? "" : " | ") << checked << fmt(" inputs, margin at Q=2 n=2 = %.9f", example);
}

// 5. Both branches of the inverse round-trip to 1e-12 over 1000 log-spaced q.
void round_trips(Outcome& o) {
    long double worst = 0, worst_double = 0;
    for (double p : {2.0, 3.0, 10.0, 100.0}) {
        const auto params = ConformalParams::exponent(p);
        for (int i = 0; i < 1000; ++i) {
            const long double q = 1.0001L * std::pow(1e5L / 1.0001L, i / 999.0L);
            const auto b = alphas_of_q(q, params);
            worst = std::max({worst, std::abs(q_of_alpha(b.alpha_lower, params) / q - 1),
                              std::abs(q_of_alpha(b.alpha_upper, params) / q - 1)});
            const auto d = alphas_of_q(static_cast<double>(q), params);
            worst_double = std::max<long double>(
                {worst_double, std::abs(q_of_alpha(d.alpha_lower, params) / static_cast<double>(q) - 1),
                 std::abs(q_of_alpha(d.alpha_upper, params) / static_cast<double>(q) - 1)});
        }
    }
    if (!(worst < 1e-12L)) o.fail(fmt("worst residual %.2Le", worst));
    o.detail << (o.pass ? "" : " | ")
             << fmt("p in {2,3,10,100}, 1000 q each, worst residual %.2Le (long double; double reaches %.2Le)", worst,
                    worst_double);
}

// 6. Energy quotient bounded by the constant, monotone under S -> sqrt S, with both limits.
void k_properties(Outcome& o) {
    int points = 0;
    for (int n : {2, 3, 10}) {
        const auto params = ConformalParams::conformal(n);
        for (double alpha : {1.0 - 0.5 / n, 1.0 - 0.25 / n, 1.5, 2.0, 3.0}) {
            const double q = q_of_alpha(alpha, params);
            for (int i = 0; i < 20; ++i) {
                const double S = 1.0 + std::pow(10.0, -6.0 + 16.0 * i / 19.0);
                const double k = k_of_S(S, alpha, params);
                ++points;
                if (k > q + 1e-12) o.fail(fmt("k above Q at S=%g alpha=%g n=%d", S, alpha, n));
                if (k < k_of_S(std::sqrt(S), alpha, params) - 1e-12) o.fail(fmt("k(S) < k(sqrt S) at S=%g", S));
            }
            if (!(k_of_S(1.0 + 1e-6, alpha, params) < 1.0 + 1e-4)) o.fail(fmt("k(1+1e-6) alpha=%g n=%d", alpha, n));
            if (!(k_of_S(1e10, alpha, params) > q - 1e-3)) o.fail(fmt("k(1e10) alpha=%g n=%d", alpha, n));
        }
    }
    o.detail << (o.pass ? "" : " | ") << points << " (S, alpha, n) points";
}

// 7. Adaptive quadrature against the closed-form energies.
void energy_cross_validation(Outcome& o) {
    struct Case {
        double alpha, s1, s2;
        int n;
    };
    std::vector<Case> cases;
    for (int n : {2, 3, 4})
        for (double alpha : {1.0, 1.5, 2.0, 3.0})
            for (auto [a, b] : {std::pair{0.5, 1.0}, {1.0, 2.0}, {0.1, 3.0}}) cases.push_back({alpha, a, b, n});
    for (double alpha : {0.6, 0.75})
        for (auto [a, b] : {std::pair{0.5, 1.0}, {1.0, 2.0}, {0.1, 3.0}}) cases.push_back({alpha, a, b, 2});
    // Improper at the inner endpoint: the derivative blows up as r -> 1.
    int improper = 0;
    for (auto [alpha, n] : {std::pair{0.8, 2}, {0.85, 2}, {0.9, 2}, {0.95, 2}, {0.9, 3}, {0.95, 3}})
        for (double s2 : {0.5, 1.0, 2.0}) {
            cases.push_back({alpha, 0.0, s2, n});
            ++improper;
        }
    double worst = 0;
    for (const auto& c : cases) {
        const auto params = ConformalParams::conformal(c.n);
        auto d = [&](double r) { return c.alpha * std::pow(std::log(r), c.alpha - 1.0) / r; };
        const auto q = quadrature_energy(d, std::exp(c.s1), std::exp(c.s2), params);
        const double exact = closed_form_energy(c.alpha, c.s1, c.s2, params);
        const double rel = std::abs(q.value - exact) / exact;
        worst = std::max(worst, rel);
        if (!(rel < 1e-9)) o.fail(fmt("alpha=%g s=(%g,%g) n=%d rel %.2e", c.alpha, c.s1, c.s2, c.n, rel));
    }
    o.detail << (o.pass ? "" : " | ")
             << fmt("%zu combinations (%d improper), worst relative error %.2e", cases.size(), improper, worst);
}

// 8. Randomized inequality suites at 2^16 cells.
void oracle_suite(Outcome& o) {
    const auto t0 = Clock::now();
    const std::size_t cells = std::size_t{1} << 16;
    SuiteOptions opt;
    opt.trials = 10000;
    opt.seed = 2024;
    std::ostringstream notes;

    for (auto [alpha, n] : {std::pair{2.0, 2}, {1.5, 3}}) {
        const auto p = LogPowerProfile::make(alpha, Orientation::Inner, Annulus::from_one(std::numbers::e, n));
        const auto u = sample_profile(p, oracle_grid(p, cells));
        const double q = q_of_alpha(alpha, ConformalParams::conformal(n));
        const auto r = random_perturbation_suite(u, q, opt);
        if (!r.pass()) o.fail(fmt("inner alpha=%g n=%d: %zu failures", alpha, n, r.failures.size()));
        notes << fmt("inner(%g,%d) max %.7f/%.7f; ", alpha, n, r.max_ratio, q);
    }
    for (auto [q1, q2] : {std::pair{2.0, 2.0}, {2.0, 10.0}}) {
        const auto input = CompositionInput::radial(q1, q2, 2);
        const auto mp = min_profile(input);
        const auto u = sample_profile(mp, oracle_grid(mp, cells));
        const double qb = q_bar(q1, q2);
        const auto upper = random_perturbation_suite(u, qb, opt);
        if (!upper.pass()) o.fail(fmt("min(%g,%g) with q_bar: %zu failures", q1, q2, upper.failures.size()));

        const double mx = std::max(q1, q2);
        const double qh = static_cast<double>(q_hat(input).q_hat);
        const auto lower = random_perturbation_suite(u, mx, opt);
        const Witness* ext = nullptr;
        for (const auto& w : lower.failures)
            if (w.kind == PerturbationKind::Extremal) ext = &w;
        if (!ext)
            o.fail(fmt("min(%g,%g): extremal competitor did not fail max", q1, q2));
        else if (!(ext->ratio > mx + 0.5 * (qh - mx)))
            o.fail(fmt("min(%g,%g): extremal ratio %.7f too small", q1, q2, ext->ratio));
        notes << fmt("min(%g,%g) max %.7f <= q_bar %.7f, extremal %.7f > %.7f; ", q1, q2, upper.max_ratio, qb,
                     ext ? ext->ratio : 0.0, mx + 0.5 * (qh - mx));
    }
    const double elapsed = seconds_since(t0);
    if (elapsed >= 60.0) o.fail(fmt("runtime %.1f s", elapsed));
    o.detail << (o.pass ? "" : " | ") << notes.str() << fmt("%.1f s", elapsed);
}

// 9. Sign of the p-Laplacian and agreement with the finite-difference flux divergence.
void sign_law(Outcome& o) {
    double worst = 0;
    int samples = 0;
    for (int n : {2, 3}) {
        const auto params = ConformalParams::conformal(n);
        for (double alpha : {0.7, 0.9, 1.0, 1.5, 3.0}) {
            auto flux = [&](double r) {
                const double du = alpha * std::pow(std::log(r), alpha - 1.0) / r;
                return std::pow(std::abs(du), n - 2.0) * du * std::pow(r, n - 1.0);
            };
            for (int i = 0; i < 20; ++i) {
                const double r = 1.5 + 3.5 * (i + 0.5) / 20.0;
                const double value = plap_of_logpower(alpha, r, params);
                const double expected_sign = alpha * (1.0 - alpha);
                ++samples;
                if ((value > 0) != (expected_sign > 0) || (value < 0) != (expected_sign < 0))
                    o.fail(fmt("sign alpha=%g n=%d r=%g", alpha, n, r));
                const double h = 1e-5;
                const double div = (flux(r + h) - flux(r - h)) / (2 * h);
                const double target = -value * std::pow(r, n - 1.0);
                if (alpha == 1.0) {
                    if (std::abs(div) > 1e-8) o.fail(fmt("n-harmonic flux not constant n=%d r=%g", n, r));
                    continue;
                }
                const double rel = std::abs(div - target) / std::abs(target);
                worst = std::max(worst, rel);
                if (!(rel < 1e-5)) o.fail(fmt("fd alpha=%g n=%d r=%g rel %.2e", alpha, n, r, rel));
            }
        }
    }
    o.detail << (o.pass ? "" : " | ") << samples << fmt(" samples, worst finite-difference mismatch %.2e", worst);
}

// 10. Strip ratio monotone in the plateau length and close to the 1-D ratio.
void tensor_convergence(Outcome& o) {
    const auto t0 = Clock::now();
    const auto p = LogPowerProfile::make(2.0, Orientation::Inner, Annulus::from_one(std::numbers::e, 2));
    const auto u = sample_profile(p, oracle_grid(p, std::size_t{1} << 16));
    const auto ext = extremal_perturbation(u, PerturbationSign::Nonnegative, std::nullopt);
    const auto phi = PiecewiseLinearProfile::make(u.grid, ext.values);
    const auto e = strip_energies(u, phi, 2.0);
    const double rho = e.ratio_1d();
    double previous = 0, last = 0;
    for (int k = 0; k <= 14; ++k) {
        last = strip_ratio(e, std::ldexp(1.0, k)).strip_ratio;
        if (last < previous - 1e-12) o.fail(fmt("decrease at m=2^%d", k));
        previous = last;
    }
    if (!(std::abs(last - rho) < rho / 500)) o.fail("not within rho/500 at m=2^14");
    const double elapsed = seconds_since(t0);
    if (elapsed >= 30.0) o.fail(fmt("runtime %.1f s", elapsed));
    o.detail << (o.pass ? "" : " | ")
             << fmt("ratio_1d %.9f, strip(2^14) %.9f, gap %.2e, %.2f s", rho, last, rho - last, elapsed);
}

// 11. Discrete minimizer recovers the affine-in-log solution and beats random competitors.
void discrete_minimizer_check(Outcome& o) {
    std::mt19937_64 rng(11);
    double worst = 0;
    for (int n : {2, 3, 10}) {
        std::uniform_real_distribution<double> width(0.2, 1.0);
        std::vector<double> x = {0.0};
        for (int i = 0; i < 1000; ++i) x.push_back(x.back() + width(rng));
        const double scale = x.back();
        for (double& v : x) v = -1.0 + v / scale;
        x.back() = 0.0;
        const auto g = RadialGrid::make(x, n, Coordinate::LogRadius);
        // Start from values linear in the node index, away from the answer.
        MinimizerOptions mo;
        for (std::size_t i = 0; i < g.node_count(); ++i) mo.initial.push_back(static_cast<double>(i) / g.cell_count());
        const auto w = discrete_minimizer(g, {0.0, 1.0}, std::nullopt, mo);
        double dev = 0;
        for (std::size_t i = 0; i < g.node_count(); ++i) dev = std::max(dev, std::abs(w.value(i) - (1.0 + g.node(i))));
        worst = std::max(worst, dev);
        if (!(dev < 1e-10)) o.fail(fmt("n=%d nodal deviation %.2e", n, dev));

        const double ew = exact_energy_pl(w);
        std::normal_distribution<double> noise(0.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            const double amp = std::pow(10.0, -4.0 + 3.0 * t / 99.0);
            auto v = w.values;
            for (std::size_t i = 1; i + 1 < v.size(); ++i) v[i] += amp * noise(rng);
            if (!(ew <= exact_energy_pl(PiecewiseLinearProfile::make(g, v)))) o.fail(fmt("n=%d competitor %d beats it", n, t));
        }
    }
    o.detail << (o.pass ? "" : " | ") << fmt("n in {2,3,10}, 1000 nonuniform cells, worst deviation %.2e, 300 competitors", worst);
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
};

const std::vector<Criterion> kCriteria = {
    {1, "radial table reproduction", table2_reproduction},
    {2, "general-p table reproduction", table3_reproduction},
    {3, "radial constant equals general-p constant", radial_equals_general},
    {4, "composition exceeds max{Q1,Q2}", certificate},
    {5, "constant round trips", round_trips},
    {6, "k(S) properties", k_properties},
    {7, "energy cross-validation", energy_cross_validation},
    {8, "oracle inequality suite", oracle_suite},
    {9, "p-Laplacian sign law", sign_law},
    {10, "tensor convergence", tensor_convergence},
    {11, "discrete minimizer", discrete_minimizer_check},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(kCriteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failed = 0;
    for (const auto& c : kCriteria) {
        if (only != 0 && c.id != only) continue;
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
