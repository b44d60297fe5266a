#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qsm/logpower.hpp"
#include "qsm/oracle.hpp"
#include "qsm/tensor.hpp"

using namespace qsm;

namespace {

struct Setup {
    PiecewiseLinearProfile u;
    PiecewiseLinearProfile phi;
};

Setup near_extremal(double alpha, int n, std::size_t cells) {
    const auto p = LogPowerProfile::make(alpha, Orientation::Inner, Annulus::from_one(std::numbers::e, n));
    auto u = sample_profile(p, oracle_grid(p, cells));
    auto ext = extremal_perturbation(u, PerturbationSign::Nonnegative, std::nullopt);
    auto phi = PiecewiseLinearProfile::make(u.grid, ext.values);
    return {std::move(u), std::move(phi)};
}

} // namespace

TEST(RampPhi2, Shape) {
    EXPECT_EQ(ramp_phi2(0.5, 3), 0.5);
    EXPECT_EQ(ramp_phi2(2.0, 3), 1.0);
    EXPECT_EQ(ramp_phi2(4.5, 3), 0.5);
    EXPECT_EQ(ramp_phi2(5.0, 3), 0.0);
    EXPECT_EQ(ramp_phi2(-1.0, 3), 0.0);
    EXPECT_THROW(ramp_phi2(1.0, 0.0), DomainError);
    EXPECT_DOUBLE_EQ(ramp_phi2(0.125, 1.0, 0.25), 0.125);
    EXPECT_DOUBLE_EQ(ramp_phi2(0.5, 1.0, 0.25), 0.25);
}

TEST(StripRatio, ZeroPhiIsDegenerate) {
    const auto s = near_extremal(2.0, 2, 256);
    const auto zero = PiecewiseLinearProfile::make(s.u.grid, std::vector<double>(s.u.values.size(), 0.0));
    const auto r = strip_ratio(StripTestConfig{s.u, zero, 10.0, 2.0});
    EXPECT_TRUE(r.degenerate);
}

TEST(StripRatio, NumeratorHasNoTDependence) {
    const auto s = near_extremal(2.0, 2, 512);
    const auto e = strip_energies(s.u, s.phi, 2.0);
    for (double m : {1.0, 7.0, 100.0}) {
        const auto r = strip_ratio(e, m);
        EXPECT_NEAR(r.numerator, (m + 2.0) * e.energy_u, 1e-14 * r.numerator);
    }
}

TEST(StripRatio, RampTermAgainstDirectTwoDimensionalQuadrature) {
    // p = 3: the x-integrand is not polynomial; compare with nested adaptive quadrature.
    const auto s = near_extremal(2.0, 3, 64);
    const auto e = strip_energies(s.u, s.phi, 3.0);
    const auto& g = s.u.grid;
    auto inner = [&](double tau) {
        double total = 0.0;
        for (std::size_t i = 0; i < g.cell_count(); ++i) {
            const double f0 = s.phi.value(i), f1 = s.phi.value(i + 1);
            if (f0 == 0.0 && f1 == 0.0) continue;
            const double a = s.u.slope(i) + tau * (f1 - f0) / g.width(i);
            auto density = [&](double x) {
                const double f = f0 + (f1 - f0) * (x - g.node(i)) / g.width(i);
                return std::pow(a * a + f * f, 1.5);
            };
            total += integrate(density, g.node(i), g.node(i + 1), {1e-15, 1e-13, 60, 2000}).value;
        }
        return total;
    };
    const double direct = integrate(inner, 0.0, 1.0, {1e-13, 1e-12, 60, 2000}).value;
    EXPECT_NEAR(e.ramp / direct, 1.0, 1e-10);
}

TEST(StripRatio, TendsToOneDimensionalRatio) {
    const auto s = near_extremal(2.0, 2, 4096);
    const auto e = strip_energies(s.u, s.phi, 2.0);
    const double rho = e.ratio_1d();
    EXPECT_LT(std::abs(strip_ratio(e, 1e4).strip_ratio - rho), 10 * rho / 1e4);

    double previous = 0.0;
    for (int k = 0; k <= 14; ++k) {
        const double r = strip_ratio(e, std::ldexp(1.0, k)).strip_ratio;
        EXPECT_GE(r, previous - 1e-12);
        previous = r;
    }
    // The gap behaves like K/m.
    const double K = (rho - strip_ratio(e, 16).strip_ratio) * 16;
    for (double m : {64.0, 256.0, 1024.0}) {
        const double gap = rho - strip_ratio(e, m).strip_ratio;
        EXPECT_GT(gap, 0.5 * K / m);
        EXPECT_LT(gap, 2.0 * K / m);
    }
}

TEST(StripRatio, MinimizerStaysBelowOne) {
    const auto g = RadialGrid::uniform(0.0, 1.0, 256, 2, Coordinate::LogRadius);
    const auto u = sample_function([](double x) { return x; }, g);
    std::vector<double> phi(u.values.size(), 0.0);
    for (std::size_t i = 40; i < 200; ++i) phi[i] = 0.2 * std::sin((i - 39) * std::numbers::pi / 161);
    const auto f = PiecewiseLinearProfile::make(g, phi);
    for (double m : {0.5, 3.0, 100.0}) EXPECT_LE(strip_ratio(StripTestConfig{u, f, m, 2.0}).strip_ratio, 1.0 + 1e-12);
}

TEST(ExhaustionCheck, MonotoneAndBelowClaimedConstant) {
    const auto s = near_extremal(2.0, 2, 2048);
    ExhaustionOptions o;
    o.random_trials = 100;
    const auto r = exhaustion_check(s.u, s.phi, 4.0 / 3.0, {1, 10, 100, 1000, 10000}, 2.0, o);
    EXPECT_TRUE(r.pass());
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        EXPECT_GE(r.rows[i].extremal_ratio, r.rows[i - 1].extremal_ratio - 1e-9);
    EXPECT_GT(r.rows.back().extremal_ratio, 0.99 * 4.0 / 3.0);
}

TEST(ExhaustionCheck, ZeroPhiPassesVacuously) {
    const auto s = near_extremal(2.0, 2, 256);
    const auto zero = PiecewiseLinearProfile::make(s.u.grid, std::vector<double>(s.u.values.size(), 0.0));
    ExhaustionOptions o;
    o.random_trials = 0;
    const auto r = exhaustion_check(s.u, zero, 1.0, {1, 10}, 2.0, o);
    EXPECT_TRUE(r.pass());
    EXPECT_THROW(exhaustion_check(s.u, zero, 1.0, {10, 1}, 2.0, o), DomainError);
}
