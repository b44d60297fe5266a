// qsm: constants, composition tables and verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qsm/qsm.hpp"
#include "run_config.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qsm;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::optional<int> n;
    std::optional<double> p, q, q1, q2, alpha, gamma, m, claimed_q, allowance_c;
    std::size_t resolution = std::size_t{1} << 16;
    std::optional<std::size_t> trials;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string format;
    std::string out;
    std::string config;
    std::string suite;
    std::string profile = "inner";
    std::string mode = "super";
    std::string what;
    std::string method = "closed_form";
    std::optional<double> r1, r2;
    bool sphere_factor = false;
    std::vector<int> dims = kTable2Dims;
    std::vector<double> qs = kTable2Qs;
    std::vector<double> ps = kTable3Ps;
    std::vector<std::string> pairs = {"2:10", "9:10", "2:100", "10:100", "90:100"};
    std::size_t points = 200;
};

std::string join(const auto& values, auto&& fmt) {
    std::string s;
    for (const auto& v : values) {
        if (!s.empty()) s += ',';
        s += fmt(v);
    }
    return s;
}

std::string num(double x) { return shortest(x); }

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw UsageError("cannot write " + o.out);
    f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string format_or(const Options& o, const std::string& fallback) { return o.format.empty() ? fallback : o.format; }

cli::Settings settings_for(const Options& o) {
    cli::Settings s = o.config.empty() ? cli::Settings{} : cli::load_settings(o.config);
    if (o.allowance_c) s.allowance_c = *o.allowance_c;
    return s;
}

void check_resolution(std::size_t cells) {
    if (cells < 16 || cells > (std::size_t{1} << 24) || (cells & (cells - 1)) != 0)
        throw UsageError("--resolution must be a power of two in [2^4, 2^24]");
}

// --------------------------------------------------------------------------

int cmd_constant(const Options& o) {
    if (o.n && o.p && *o.p != *o.n) throw UsageError("--n and --p disagree");
    if (!o.n && !o.p) throw UsageError("constant needs --n or --p");
    const auto params = o.n ? ConformalParams::conformal(*o.n) : ConformalParams::exponent(*o.p);
    const auto fmt = format_or(o, "text");
    char buf[64];
    if (o.alpha && !o.q) {
        const double value = q_of_alpha(*o.alpha, params);
        if (fmt == "json") {
            ordered_json j{{"schema", 1}, {"alpha", *o.alpha}, {"p", params.p}, {"q", value}};
            emit(o, dump(j));
        } else {
            std::snprintf(buf, sizeof buf, "%.13g\n", value);
            emit(o, buf);
        }
        return kOk;
    }
    if (o.q && !o.alpha) {
        const auto b = alphas_of_q<long double>(*o.q, params);
        const double lo = static_cast<double>(b.alpha_lower), hi = static_cast<double>(b.alpha_upper);
        if (fmt == "json") {
            ordered_json j{{"schema", 1}, {"q", *o.q}, {"p", params.p}, {"alpha_lower", lo}, {"alpha_upper", hi}};
            emit(o, dump(j));
        } else {
            std::string text;
            std::snprintf(buf, sizeof buf, "alpha_lower %.13g\n", lo);
            text += buf;
            std::snprintf(buf, sizeof buf, "alpha_upper %.13g\n", hi);
            text += buf;
            emit(o, text);
        }
        return kOk;
    }
    throw UsageError("constant needs exactly one of --alpha and --q");
}

int cmd_energy(const Options& o) {
    const auto settings = settings_for(o);
    if (!o.alpha || !o.n) throw UsageError("energy needs --alpha and --n");
    if (o.method != "closed_form" && o.method != "quadrature") throw UsageError("--method must be closed_form or quadrature");
    if (o.profile != "inner" && o.profile != "outer") throw UsageError("--profile must be inner or outer for energy");
    const auto annulus = Annulus::make(o.r1.value_or(1.0), o.r2.value_or(o.gamma.value_or(std::numbers::e)), *o.n);
    const auto profile = LogPowerProfile::make(*o.alpha, o.profile == "inner" ? Orientation::Inner : Orientation::Outer, annulus);
    const auto method = o.method == "quadrature" ? EnergyMethod::Quadrature : EnergyMethod::ClosedForm;
    const auto report = profile_energy(profile, method, o.sphere_factor, settings.quadrature());
    ordered_json j{{"schema", 1},
                   {"alpha", report.alpha},
                   {"n", annulus.n},
                   {"profile", o.profile},
                   {"domain", {annulus.r1, annulus.r2}},
                   {"value", report.value},
                   {"method", to_string(report.method)},
                   {"sphere_factor", report.includes_sphere_factor}};
    if (method == EnergyMethod::Quadrature) {
        const double exact = profile_energy(profile, EnergyMethod::ClosedForm, o.sphere_factor).value;
        j["error_estimate"] = report.error_estimate;
        j["discrepancy"] = std::abs(report.value - exact) / exact;
    }
    emit(o, dump(j));
    return kOk;
}

int cmd_table2(const Options& o) {
    for (int n : o.dims)
        if (n < 2) throw UsageError("--dims must be integers >= 2");
    for (double q : o.qs)
        if (!(q > 1.0)) throw UsageError("--qs must exceed 1");
    const auto t = compute_table2(o.dims, o.qs, o.jobs);
    const auto fmt = format_or(o, "csv");
    if (fmt == "json") {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < t.qs.size(); ++i) {
            ordered_json cells = ordered_json::object();
            for (std::size_t j = 0; j < t.dims.size(); ++j)
                cells["n=" + std::to_string(t.dims[j])] = static_cast<double>(t.q_hat[i][j]);
            rows.push_back({{"Q", t.qs[i]}, {"q_hat", cells}, {"q_bar", static_cast<double>(t.q_bar[i])}});
        }
        emit(o, dump({{"schema", 1}, {"table", "table2"}, {"rows", rows}}));
        return kOk;
    }
    const std::string command = "qsm table2 --dims " + join(o.dims, [](int n) { return std::to_string(n); }) +
                                " --qs " + join(o.qs, num);
    std::ostringstream out;
    write_table2_csv(out, t, command);
    emit(o, out.str());
    return kOk;
}

std::vector<std::pair<double, double>> parse_pairs(const std::vector<std::string>& items) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& s : items) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw UsageError("--pairs entries look like Q1:Q2");
        try {
            std::size_t u1 = 0, u2 = 0;
            const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
            const double x = std::stod(a, &u1), y = std::stod(b, &u2);
            if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(s);
            if (!(x > 1.0) || !(y > 1.0)) throw UsageError("--pairs values must exceed 1");
            pairs.emplace_back(x, y);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad --pairs entry " + s);
        }
    }
    return pairs;
}

int cmd_table3(const Options& o) {
    for (double p : o.ps)
        if (!(p > 1.0)) throw UsageError("--ps must exceed 1");
    const auto pairs = parse_pairs(o.pairs);
    const auto t = compute_table3(o.ps, pairs, o.jobs);
    const auto fmt = format_or(o, "csv");
    if (fmt == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& r : t.rows) {
            ordered_json cells = ordered_json::object();
            for (std::size_t j = 0; j < t.ps.size(); ++j) cells["p=" + num(t.ps[j])] = static_cast<double>(r.values[j]);
            rows.push_back({{"Q1", r.q1}, {"Q2", r.q2}, {"q_tilde", cells}, {"q_bar", static_cast<double>(r.q_bar)}});
        }
        emit(o, dump({{"schema", 1}, {"table", "table3"}, {"rows", rows}}));
        return kOk;
    }
    const std::string command = "qsm table3 --ps " + join(o.ps, num) + " --pairs " +
                                join(pairs, [](const auto& pr) { return num(pr.first) + ":" + num(pr.second); });
    std::ostringstream out;
    write_table3_csv(out, t, command);
    emit(o, out.str());
    return kOk;
}

// --------------------------------------------------------------------------
// verify

ordered_json witness_json(const Witness& w) {
    ordered_json j{{"trial", w.trial},
                   {"kind", to_string(w.kind)},
                   {"ratio", w.ratio},
                   {"support", {w.support_lo, w.support_hi}}};
    if (w.kind == PerturbationKind::Bumps) {
        ordered_json bumps = ordered_json::array();
        for (const auto& b : w.bumps) bumps.push_back({{"center", b.center}, {"half_width", b.half_width}, {"height", b.height}});
        j["bumps"] = bumps;
    } else if (w.kind == PerturbationKind::Replacement) {
        j["scale"] = w.scale;
    }
    return j;
}

ordered_json suite_json(const std::string& profile, const SuiteReport& r) {
    ordered_json failures = ordered_json::array();
    for (const auto& w : r.failures) failures.push_back(witness_json(w));
    return {{"profile", profile},   {"claimed_q", r.claimed_q}, {"trials", r.trials},
            {"seed", r.seed},       {"max_ratio", r.max_ratio}, {"argmax", witness_json(r.argmax)},
            {"failures", failures}, {"allowance", r.allowance}, {"threshold", r.threshold},
            {"pass", r.pass()}};
}

PerturbationSign sign_of(const std::string& mode) {
    if (mode == "super") return PerturbationSign::Nonnegative;
    if (mode == "sub") return PerturbationSign::Nonpositive;
    throw UsageError("--mode must be super or sub");
}

SuiteOptions suite_options(const Options& o, const cli::Settings& s, std::size_t default_trials) {
    SuiteOptions so;
    so.trials = o.trials.value_or(default_trials);
    if (so.trials < 1) throw UsageError("--trials must be >= 1");
    so.seed = o.seed;
    so.sign = sign_of(o.mode);
    so.allowance_c = s.allowance_c;
    so.relative_tolerance = s.relative_tolerance;
    so.jobs = o.jobs;
    return so;
}

int suite_inequality(const Options& o, const cli::Settings& s) {
    const int n = o.n.value_or(2);
    const auto params = ConformalParams::conformal(n);
    const auto sign = sign_of(o.mode);
    const double gamma = o.gamma.value_or(std::numbers::e);
    if (!(gamma > 1.0)) throw UsageError("--gamma must exceed 1");

    std::optional<PiecewiseLinearProfile> u;
    double claimed = 1.0;
    std::string label = o.profile;
    if (o.profile == "inner" || o.profile == "outer") {
        const double alpha = o.alpha.value_or(2.0);
        const bool inner = o.profile == "inner";
        const auto annulus = inner ? Annulus::from_one(gamma, n) : Annulus::make(1.0 / gamma, 1.0, n);
        const auto profile = LogPowerProfile::make(alpha, inner ? Orientation::Inner : Orientation::Outer, annulus);
        u = sample_profile(profile, oracle_grid(profile, o.resolution));
        // 1 - v is a quasisuperminimizer exactly when v is a quasisubminimizer.
        const auto row = table1_classification(alpha, params);
        const bool super = sign == PerturbationSign::Nonnegative;
        claimed = inner == super ? row.qsuper : row.qsub;
        label += "(alpha=" + num(alpha) + ",n=" + std::to_string(n) + ")";
    } else if (o.profile == "min") {
        const auto input = CompositionInput::radial(o.q1.value_or(2.0), o.q2.value_or(2.0), n);
        const auto profile = min_profile(input);
        u = sample_profile(profile, oracle_grid(profile, o.resolution));
        claimed = q_bar(input.q1, input.q2);
        label += "(q1=" + num(input.q1) + ",q2=" + num(input.q2) + ",n=" + std::to_string(n) + ")";
    } else if (o.profile == "minimizer") {
        const auto grid = RadialGrid::uniform(0.0, 1.0, o.resolution, n, Coordinate::LogRadius);
        u = sample_function([](double s) { return s; }, grid);
        claimed = 1.0;
        label += "(n=" + std::to_string(n) + ")";
    } else {
        throw UsageError("--profile must be inner, outer, min or minimizer");
    }
    if (o.claimed_q) claimed = *o.claimed_q;

    const auto report = random_perturbation_suite(*u, claimed, suite_options(o, s, 10000));
    ordered_json j{{"schema", 1}, {"suite", "inequality"}, {"mode", o.mode}};
    j.update(suite_json(label, report));
    emit(o, dump(j));
    return report.pass() ? kOk : kFailed;
}

int suite_theorem0(const Options& o) {
    const auto input = CompositionInput::radial(o.q1.value_or(2.0), o.q2.value_or(2.0), o.n.value_or(2));
    const auto c = theorem0_certificate(input);
    const bool pass = c.margin > 0.0 && c.q_hat < c.q_bar;
    ordered_json j{{"schema", 1},        {"suite", "theorem0"}, {"q1", input.q1},
                   {"q2", input.q2},     {"n", *input.n},       {"x0", c.x0},
                   {"I_u", c.i_u},       {"Q2_times_Iv", c.q2_times_iv},
                   {"margin", c.margin}, {"q_hat", c.q_hat},    {"q_bar", c.q_bar},
                   {"pass", pass}};
    emit(o, dump(j));
    return pass ? kOk : kFailed;
}

int suite_table1(const Options& o, const cli::Settings& s) {
    const int n = o.n.value_or(2);
    const double alpha = o.alpha.value_or(2.0);
    const double gamma = o.gamma.value_or(std::numbers::e);
    if (!(gamma > 1.0)) throw UsageError("--gamma must exceed 1");
    const auto row = table1_classification(alpha, ConformalParams::conformal(n));
    const auto profile = LogPowerProfile::make(alpha, Orientation::Inner, Annulus::from_one(gamma, n));
    const auto u = sample_profile(profile, oracle_grid(profile, o.resolution));

    Options super_opts = o, sub_opts = o;
    super_opts.mode = "super";
    sub_opts.mode = "sub";
    const auto sup = random_perturbation_suite(u, row.qsuper, suite_options(super_opts, s, 2000));
    const auto sub = random_perturbation_suite(u, row.qsub, suite_options(sub_opts, s, 2000));
    const std::string label = "inner(alpha=" + num(alpha) + ",n=" + std::to_string(n) + ")";
    const bool pass = sup.pass() && sub.pass();
    ordered_json j{{"schema", 1},
                   {"suite", "table1"},
                   {"alpha", alpha},
                   {"n", n},
                   {"qmin", row.qmin},
                   {"qsub", row.qsub},
                   {"qsuper", row.qsuper},
                   {"superminimizer", suite_json(label, sup)},
                   {"subminimizer", suite_json(label, sub)},
                   {"pass", pass}};
    emit(o, dump(j));
    return pass ? kOk : kFailed;
}

struct TensorSetup {
    PiecewiseLinearProfile u;
    PiecewiseLinearProfile phi;
    double claimed_q;
    double p;
};

// Inner log-power on A_{1,gamma} with the whole-domain extremal competitor.
TensorSetup tensor_setup(const Options& o) {
    const int n = o.n.value_or(2);
    const double alpha = o.alpha.value_or(2.0);
    if (!(alpha > 1.0)) throw UsageError("tensor suite needs --alpha > 1 (a superminimizer with Q > 1)");
    const double gamma = o.gamma.value_or(std::numbers::e);
    const auto profile = LogPowerProfile::make(alpha, Orientation::Inner, Annulus::from_one(gamma, n));
    auto u = sample_profile(profile, oracle_grid(profile, o.resolution));
    const auto ext = extremal_perturbation(u, PerturbationSign::Nonnegative, std::nullopt);
    auto phi = PiecewiseLinearProfile::make(u.grid, ext.values);
    return {std::move(u), std::move(phi), q_of_alpha(alpha, ConformalParams::conformal(n)), static_cast<double>(n)};
}

std::vector<double> strip_ms() {
    std::vector<double> ms;
    for (int k = 0; k <= 14; ++k) ms.push_back(std::ldexp(1.0, k));
    return ms;
}

int suite_tensor(const Options& o, const cli::Settings& s) {
    const auto t = tensor_setup(o);
    const auto energies = strip_energies(t.u, t.phi, t.p, 1.0, s.quadrature());
    const double threshold = t.claimed_q * (1.0 + s.relative_tolerance) + s.allowance_c * t.u.grid.max_width();
    const auto ms = o.m ? std::vector<double>{*o.m} : strip_ms();

    ordered_json rows = ordered_json::array();
    bool pass = true, monotone = true;
    double previous = 0.0;
    for (double m : ms) {
        const auto r = strip_ratio(energies, m, t.claimed_q);
        rows.push_back({{"m", r.m}, {"ratio_1d", r.ratio_1d}, {"strip_ratio", r.strip_ratio}, {"claimed_q", r.claimed_q}});
        if (r.degenerate || r.strip_ratio > threshold) pass = false;
        if (r.strip_ratio < previous - 1e-12) monotone = false;
        previous = r.strip_ratio;
    }
    ExhaustionOptions eo;
    eo.random_trials = o.trials.value_or(200);
    eo.seed = o.seed;
    eo.allowance_c = s.allowance_c;
    eo.relative_tolerance = s.relative_tolerance;
    eo.quadrature = s.quadrature();
    const auto ex = exhaustion_check(t.u, t.phi, t.claimed_q, {1.0, 10.0, 100.0, 1000.0}, t.p, eo);
    ordered_json lengths = ordered_json::array();
    for (const auto& r : ex.rows)
        lengths.push_back({{"length", r.length},
                           {"m", r.m},
                           {"ramp_width", r.ramp_width},
                           {"extremal_ratio", r.extremal_ratio},
                           {"max_ratio", r.max_ratio},
                           {"failures", r.failures}});
    pass = pass && monotone && ex.pass();
    ordered_json j{{"schema", 1},       {"suite", "tensor"}, {"claimed_q", t.claimed_q},
                   {"threshold", threshold}, {"rows", rows},   {"monotone", monotone},
                   {"exhaustion", lengths},  {"pass", pass}};
    emit(o, dump(j));
    return pass ? kOk : kFailed;
}

std::vector<double> k_samples(std::size_t points) {
    // S - 1 log-spaced over [1e-6, 1e10].
    std::vector<double> s;
    for (std::size_t i = 0; i < points; ++i) {
        const double e = -6.0 + 16.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        s.push_back(1.0 + std::pow(10.0, e));
    }
    return s;
}

int suite_kfunction(const Options& o) {
    const int n = o.n.value_or(2);
    const double alpha = o.alpha.value_or(2.0);
    const auto params = ConformalParams::conformal(n);
    const double q = q_of_alpha(alpha, params);
    std::size_t above = 0, not_monotone = 0;
    for (double S : k_samples(std::max<std::size_t>(o.points, 2))) {
        const double k = k_of_S(S, alpha, params);
        if (k > q + 1e-12) ++above;
        if (S > 1.0 + 1e-6 && k < k_of_S(std::sqrt(S), alpha, params) - 1e-12) ++not_monotone;
    }
    const double near_one = k_of_S(1.0 + 1e-6, alpha, params);
    const double far = k_of_S(1e10, alpha, params);
    const bool pass = above == 0 && not_monotone == 0 && near_one < 1.0 + 1e-4 && far > q - 1e-3;
    ordered_json j{{"schema", 1},
                   {"suite", "kfunction"},
                   {"alpha", alpha},
                   {"n", n},
                   {"q", q},
                   {"samples", std::max<std::size_t>(o.points, 2)},
                   {"above_q", above},
                   {"not_monotone", not_monotone},
                   {"k_near_one", near_one},
                   {"k_at_1e10", far},
                   {"pass", pass}};
    emit(o, dump(j));
    return pass ? kOk : kFailed;
}

int cmd_verify(const Options& o) {
    const auto settings = settings_for(o);
    if (!o.format.empty() && o.format != "json") throw UsageError("verify reports are JSON only");
    check_resolution(o.resolution);
    if (o.suite == "inequality") return suite_inequality(o, settings);
    if (o.suite == "theorem0") return suite_theorem0(o);
    if (o.suite == "table1") return suite_table1(o, settings);
    if (o.suite == "tensor") return suite_tensor(o, settings);
    if (o.suite == "kfunction") return suite_kfunction(o);
    throw UsageError("unknown suite " + o.suite);
}

// --------------------------------------------------------------------------
// plotdata

int cmd_plotdata(const Options& o) {
    if (!o.format.empty() && o.format != "csv") throw UsageError("plotdata writes CSV only");
    if (o.points < 2) throw UsageError("--points must be >= 2");
    const int n = o.n.value_or(2);
    const double alpha = o.alpha.value_or(2.0);
    std::ostringstream out;
    char buf[160];
    if (o.what == "k_of_S") {
        const auto params = ConformalParams::conformal(n);
        out << "# qsm plotdata --what k_of_S --alpha " << num(alpha) << " --n " << n << " --points " << o.points
            << "; columns: S = endpoint ratio, k = energy quotient against the minimizer\n"
            << "S,k\n";
        for (double S : k_samples(o.points)) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", S, k_of_S(S, alpha, params));
            out << buf;
        }
    } else if (o.what == "qhat_vs_q") {
        out << "# qsm plotdata --what qhat_vs_q --n " << n << " --points " << o.points
            << "; columns: Q = q1 = q2, q_hat = lower bound, lower = Q, upper = 2Q^2/(Q+1)\n"
            << "Q,q_hat,lower,upper\n";
        for (std::size_t i = 0; i < o.points; ++i) {
            const double Q = 1.001 * std::pow(100.0 / 1.001, static_cast<double>(i) / static_cast<double>(o.points - 1));
            const auto r = q_hat<long double>(CompositionInput::radial(Q, Q, n));
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", Q, static_cast<double>(r.q_hat), Q,
                          static_cast<double>(r.q_bar));
            out << buf;
        }
    } else if (o.what == "strip_ratio") {
        check_resolution(o.resolution);
        const auto t = tensor_setup(o);
        const auto energies = strip_energies(t.u, t.phi, t.p);
        out << "# qsm plotdata --what strip_ratio --alpha " << num(alpha) << " --n " << n << " --resolution "
            << o.resolution << "; columns: m = plateau length, strip_ratio = energy ratio on the strip\n"
            << "m,strip_ratio\n";
        for (double m : strip_ms()) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", m, strip_ratio(energies, m).strip_ratio);
            out << buf;
        }
    } else {
        throw UsageError("--what must be k_of_S, qhat_vs_q or strip_ratio");
    }
    emit(o, out.str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasiminimizing constants of log-powers and their minima"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
        c->add_option("--out", o.out, "Write output to this file instead of stdout");
        c->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
        c->add_option("--config", o.config, "key=value settings file");
    };

    auto* constant = app.add_subcommand("constant", "Q(alpha, p) or the two exponents with a given Q");
    constant->add_option("--alpha", o.alpha, "Exponent of the log-power");
    constant->add_option("--q", o.q, "Quasiminimizing constant");
    constant->add_option("--n", o.n, "Dimension (p = n)");
    constant->add_option("--p", o.p, "Exponent p");
    common(constant);

    auto* table2 = app.add_subcommand("table2", "q_hat for q1 = q2 = Q by dimension");
    table2->add_option("--dims", o.dims, "Dimensions")->delimiter(',');
    table2->add_option("--qs", o.qs, "Values of Q")->delimiter(',');
    common(table2);

    auto* table3 = app.add_subcommand("table3", "General-p constant for ordered pairs");
    table3->add_option("--ps", o.ps, "Exponents p")->delimiter(',');
    table3->add_option("--pairs", o.pairs, "Pairs Q1:Q2")->delimiter(',');
    common(table3);

    auto* energy = app.add_subcommand("energy", "n-energy of a log-power profile on an annulus (JSON)");
    energy->add_option("--alpha", o.alpha, "Log-power exponent")->required();
    energy->add_option("--n", o.n, "Dimension (p = n)")->required()->check(CLI::Range(2, 1000));
    energy->add_option("--profile", o.profile, "inner or outer");
    energy->add_option("--r1", o.r1, "Inner radius (default 1)");
    energy->add_option("--r2", o.r2, "Outer radius (default e)");
    energy->add_option("--method", o.method, "closed_form or quadrature");
    energy->add_flag("--sphere-factor", o.sphere_factor, "Multiply by the area of the unit sphere");
    common(energy);

    auto* verify = app.add_subcommand("verify", "Run a verification suite; exit 1 if it fails");
    verify->add_option("--suite", o.suite, "Suite")
        ->required()
        ->check(CLI::IsMember({"inequality", "theorem0", "table1", "tensor", "kfunction"}));
    verify->add_option("--profile", o.profile, "inner, outer, min or minimizer");
    verify->add_option("--mode", o.mode, "super (phi >= 0) or sub (phi <= 0)");
    verify->add_option("--claimed-q", o.claimed_q, "Constant to test against");
    verify->add_option("--alpha", o.alpha, "Log-power exponent");
    verify->add_option("--n", o.n, "Dimension (p = n)")->check(CLI::Range(2, 1000));
    verify->add_option("--q1", o.q1, "Inner constant");
    verify->add_option("--q2", o.q2, "Outer constant");
    verify->add_option("--gamma", o.gamma, "Annulus width ratio");
    verify->add_option("--m", o.m, "Strip plateau length");
    verify->add_option("--resolution", o.resolution, "Grid cells (power of two)");
    verify->add_option("--trials", o.trials, "Random perturbations");
    verify->add_option("--seed", o.seed, "Random seed");
    verify->add_option("--allowance-c", o.allowance_c, "Discretization allowance constant");
    verify->add_option("--points", o.points, "Samples for the kfunction suite");
    common(verify);

    auto* plot = app.add_subcommand("plotdata", "CSV samples for plotting");
    plot->add_option("--what", o.what, "k_of_S, qhat_vs_q or strip_ratio")->required();
    plot->add_option("--alpha", o.alpha, "Log-power exponent");
    plot->add_option("--n", o.n, "Dimension")->check(CLI::Range(2, 1000));
    plot->add_option("--points", o.points, "Number of samples");
    plot->add_option("--resolution", o.resolution, "Grid cells (power of two)");
    common(plot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*constant) return cmd_constant(o);
        if (*table2) return cmd_table2(o);
        if (*table3) return cmd_table3(o);
        if (*energy) return cmd_energy(o);
        if (*verify) return cmd_verify(o);
        if (*plot) return cmd_plotdata(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kFailed;
    }
    return kUsage;
}
