#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qpd/quasi.hpp"
#include "qpd/states.hpp"

using namespace qpd;

namespace {

double thermal_p(cplx a, double nbar) { return std::exp(-std::norm(a) / nbar) / (kPi * nbar); }
double thermal_w(cplx a, double nbar) {
    const double v = 1.0 + 2.0 * nbar;
    return 2.0 / (kPi * v) * std::exp(-2.0 * std::norm(a) / v);
}
double thermal_q(cplx a, double nbar) { return std::exp(-std::norm(a) / (1.0 + nbar)) / (kPi * (1.0 + nbar)); }

double max_abs_error(const QuasiDistribution& d, const std::function<double(cplx)>& f, double radius = 1e300) {
    double worst = 0.0;
    for (int i = 0; i < d.grid.nq; ++i)
        for (int j = 0; j < d.grid.np; ++j) {
            const cplx a = d.convention.to_alpha(d.grid.q(i), d.grid.p(j));
            if (std::abs(a) > radius) continue;
            worst = std::max(worst, std::abs(d.values(i, j) - f(a)));
        }
    return worst;
}

}  // namespace

TEST(PhaseGrid, Geometry) {
    const PhaseGrid g = PhaseGrid::square(4.0, 81);
    EXPECT_DOUBLE_EQ(g.dq(), 0.1);
    EXPECT_DOUBLE_EQ(g.q(40), 0.0);
    EXPECT_NEAR(g.cell_area(LadderConvention{0.5, 2.0}), 0.01, 1e-15);
    EXPECT_TRUE(g.contains(3.9, -3.9));
    EXPECT_FALSE(g.contains(4.1, 0.0));
    const PhaseGrid s = g.scaled(2.0);
    EXPECT_DOUBLE_EQ(s.q_max, 8.0);
    PhaseGrid bad = g;
    bad.nq = 1;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Ordering, RoundTrip) {
    for (const Ordering o : {Ordering::normal, Ordering::symmetric, Ordering::antinormal})
        EXPECT_EQ(parse_ordering(to_string(o)), o);
    EXPECT_THROW(parse_ordering("sideways"), ValidationError);
}

TEST(Characteristic, VacuumAndCoherent) {
    const FockSpace s(40);
    const DensityMatrix vac = fock_state(0, s);
    EXPECT_LT(std::abs(characteristic_function(vac, 0.5, 0.0) - std::exp(-0.125)), 1e-12);
    // s = 1 removes the Gaussian factor entirely for the vacuum
    EXPECT_LT(std::abs(characteristic_function(vac, cplx(0.7, 0.2), 1.0) - 1.0), 1e-12);

    const cplx alpha = 1.0, beta(0.0, 0.3);
    const DensityMatrix coh = coherent_state(alpha, s).density();
    const cplx expect = std::exp(-0.5 * std::norm(beta)) * std::exp(beta * std::conj(alpha) - std::conj(beta) * alpha);
    EXPECT_LT(std::abs(characteristic_function(coh, beta, 0.0) - expect), 1e-10);
}

TEST(Husimi, CoherentClosedFormAndBounds) {
    const cplx alpha(0.6, -0.8);
    const DensityMatrix rho = coherent_state(alpha, FockSpace(40)).density();
    for (const cplx a : {cplx(0.0), cplx(0.6, -0.8), cplx(-1.0, 1.5)})
        EXPECT_NEAR(husimi_direct(rho, a), std::exp(-std::norm(a - alpha)) / kPi, 1e-12);

    const QuasiDistribution q = husimi_direct_grid(thermal_state(0.8, FockSpace(60)), PhaseGrid::square(8.0, 97));
    EXPECT_GE(q.min_value(), 0.0);
    EXPECT_LE(q.max_value(), 1.0 / kPi);
    EXPECT_LT(max_abs_error(q, [](cplx a) { return thermal_q(a, 0.8); }), 1e-12);
    EXPECT_NEAR(q.integral(), 1.0, 1e-6);
}

TEST(Wigner, FockOneOriginAndVacuum) {
    const FockSpace s(20);
    EXPECT_NEAR(wigner_direct(fock_state(1, s), 0.0, 0.0), -2.0 / kPi, 1e-8);
    EXPECT_NEAR(wigner_direct(fock_state(0, s), 0.0, 0.0), 2.0 / kPi, 1e-8);
    const LadderConvention conv{0.7, 1.3};
    const double q = 0.4, p = -0.9;
    EXPECT_NEAR(wigner_direct(fock_state(0, s), q, p, conv), 2.0 / kPi * std::exp(-2.0 * std::norm(conv.to_alpha(q, p))),
                1e-8);
}

TEST(Wigner, GridMatchesThermalAndIntegratesToOne) {
    const QuasiDistribution w = wigner_direct_grid(thermal_state(0.5, FockSpace(60)), PhaseGrid::square(7.0, 71));
    EXPECT_LT(max_abs_error(w, [](cplx a) { return thermal_w(a, 0.5); }), 1e-8);
    EXPECT_NEAR(w.integral(), 1.0, 1e-6);
}

TEST(Wigner, MarginalIsPositionDensity) {
    const DensityMatrix rho = build_state(parse_state_spec("mix:0.5*fock:1,0.5*coherent:1-0.5i"), FockSpace(40));
    const LadderConvention conv;
    const double q = 0.3;
    const auto f = [&](double p) { return wigner_direct(rho, q, p, conv); };
    // alpha density -> q density: integrate dp/(2 hbar) of W_alpha
    const double marginal = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -12.0, 12.0, 8, 1e-12) /
                            (2.0 * conv.hbar);
    EXPECT_NEAR(marginal, position_matrix_element(rho, q, q, conv).real(), 1e-8);
}

TEST(Wigner, MomentumDensityFromPMarginal) {
    const DensityMatrix rho = coherent_state(cplx(0.5, 1.0), FockSpace(40)).density();
    const LadderConvention conv{1.0, 1.6};
    const double p = 0.8;
    const auto f = [&](double q) { return wigner_direct(rho, q, p, conv); };
    const double marginal =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -12.0, 12.0, 8, 1e-12) / (2.0 * conv.hbar);
    EXPECT_NEAR(marginal, momentum_density(rho, p, conv), 1e-8);
}

TEST(Oscillator, FunctionsAreOrthonormal) {
    const LadderConvention conv{0.5, 1.4};
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const auto f = [&](double x) {
                const Eigen::VectorXd v = oscillator_functions(x, 4, conv);
                return v(m) * v(n);
            };
            const double ip = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -10.0, 10.0, 8, 1e-13);
            EXPECT_NEAR(ip, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
        }
}

TEST(Transform, SpansTheSParameterFamily) {
    const DensityMatrix rho = thermal_state(1.0, FockSpace(60));
    const PhaseGrid g = PhaseGrid::square(7.0, 71);
    const QuasiDistribution w = s_distribution(rho, g, 0.0);
    EXPECT_LT(max_abs_error(w, [](cplx a) { return thermal_w(a, 1.0); }), 1e-6);
    const QuasiDistribution q = s_distribution(rho, g, -1.0);
    EXPECT_LT(max_abs_error(q, [](cplx a) { return thermal_q(a, 1.0); }), 1e-6);
    EXPECT_TRUE(q.kind.is_s(-1.0));
}

TEST(Transform, ThermalPMatchesAnalytic) {
    const double nbar = 1.0;
    const DensityMatrix rho = thermal_state(nbar, FockSpace(60));
    const QuasiDistribution p = s_distribution(rho, PhaseGrid::square(7.0, 71), 1.0);
    EXPECT_LT(max_abs_error(p, [&](cplx a) { return thermal_p(a, nbar); }), 1e-3);
}

TEST(Transform, PReconstructsPopulations) {
    // rho_nn = int P(alpha) e^{-|alpha|^2} |alpha|^{2n} / n! d^2 alpha
    const double nbar = 1.0;
    const DensityMatrix rho = thermal_state(nbar, FockSpace(60));
    const QuasiDistribution p = s_distribution(rho, PhaseGrid::square(9.0, 121), 1.0);
    const double da = p.grid.cell_area(p.convention);
    for (int n = 0; n < 4; ++n) {
        double sum = 0.0;
        for (int i = 0; i < p.grid.nq; ++i)
            for (int j = 0; j < p.grid.np; ++j) {
                const double r2 = std::norm(p.convention.to_alpha(p.grid.q(i), p.grid.p(j)));
                sum += p.values(i, j) * std::exp(-r2 + n * std::log(r2 + 1e-300) - std::lgamma(n + 1.0));
            }
        EXPECT_NEAR(sum * da, rho.matrix()(n, n).real(), 1e-3) << n;
    }
}

TEST(Transform, FockOnePIsIllPosed) {
    EXPECT_THROW(s_distribution(fock_state(1, FockSpace(30)), PhaseGrid::square(5.0, 41), 1.0), IllPosed);
}

TEST(Mehta, ThermalCentralRegion) {
    const double nbar = 1.0;
    const DensityMatrix rho = thermal_state(nbar, FockSpace(60));
    const QuasiDistribution p = mehta_p(rho, PhaseGrid::square(3.0, 61));
    ASSERT_TRUE(p.diagnostics.has("condition_estimate"));
    EXPECT_LT(max_abs_error(p, [&](cplx a) { return thermal_p(a, nbar); }, 1.5), 1e-2);
}

TEST(Mehta, VacuumIsFlaggedIllPosed) {
    const DensityMatrix vac = fock_state(0, FockSpace(30));
    MehtaOptions opts;
    opts.throw_on_ill_posed = false;
    const QuasiDistribution p = mehta_p(vac, PhaseGrid::square(3.0, 31), {}, opts);
    ASSERT_TRUE(p.diagnostics.has("ill_posed"));
    EXPECT_EQ(p.diagnostics.get("ill_posed"), 1.0);
    EXPECT_THROW(mehta_p(vac, PhaseGrid::square(3.0, 31)), IllPosed);
}

TEST(Smoothing, MatchedWidthTurnsWignerIntoHusimi) {
    const DensityMatrix rho = build_state(parse_state_spec("mix:0.5*fock:1,0.5*coherent:1"), FockSpace(40));
    const PhaseGrid g = PhaseGrid::square(7.0, 113);
    const QuasiDistribution w = wigner_direct_grid(rho, g);
    const QuasiDistribution q = weierstrass_smooth(w, matched_smoothing_width(w.convention));
    EXPECT_TRUE(q.kind.is_s(-1.0));
    EXPECT_LT(max_abs_error(q, [&](cplx a) { return husimi_direct(rho, a); }), 1e-4);
    EXPECT_NEAR(q.integral(), 1.0, 1e-4);
}

TEST(Smoothing, AnalyticThermalPGivesWigner) {
    const double nbar = 0.5;
    QuasiDistribution p;
    p.grid = PhaseGrid::square(7.0, 113);
    p.kind = DistributionKind::s_param(1.0);
    p.values.resize(p.grid.nq, p.grid.np);
    for (int i = 0; i < p.grid.nq; ++i)
        for (int j = 0; j < p.grid.np; ++j)
            p.values(i, j) = thermal_p(p.convention.to_alpha(p.grid.q(i), p.grid.p(j)), nbar);
    const QuasiDistribution w = weierstrass_smooth(p, matched_smoothing_width(p.convention));
    EXPECT_TRUE(w.kind.is_s(0.0));
    EXPECT_LT(max_abs_error(w, [&](cplx a) { return thermal_w(a, nbar); }), 1e-3);
}

TEST(Smoothing, MatchedWidthFollowsLambda) {
    EXPECT_NEAR(matched_smoothing_width(LadderConvention{1.0, 1.0}), 1.0, 1e-15);
    EXPECT_NEAR(matched_smoothing_width(LadderConvention{1.0, 2.0}), 4.0, 1e-15);
}

TEST(Cohen, IdentityKernelIsWigner) {
    const FockSpace s(30);
    const StateVector psi = squeezed_coherent(cplx(0.5, -0.3), SqueezeParameter(0.3), s).vec;
    const PhaseGrid g = PhaseGrid::square(7.0, 113);
    const QuasiDistribution c = cohen_distribution(sample_wavefunction(psi, g), CohenKernel::identity(), g);
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    for (const auto& [q, p] : {std::pair{0.0, 0.0}, std::pair{0.75, -0.5}, std::pair{-1.25, 1.0}}) {
        const double cq = c.interpolate(q, p);
        EXPECT_NEAR(cq, wigner_direct(rho, q, p), 1e-5) << q << "," << p;
    }
}

TEST(Cohen, MatchedKernelIsHusimi) {
    const LadderConvention conv{1.0, 1.5};
    const StateVector psi = fock_vector(1, FockSpace(20)).vec;
    const PhaseGrid g = PhaseGrid::square(7.0, 113);
    const QuasiDistribution c =
        cohen_distribution(sample_wavefunction(psi, g, conv), CohenKernel::matched_gaussian(conv), g, conv);
    EXPECT_LT(max_abs_error(c, [&](cplx a) { return husimi_direct(fock_state(1, FockSpace(20)), a); }), 1e-5);
}

TEST(Cohen, TruncatedWavefunctionIsRejected) {
    const StateVector psi = coherent_state(2.0, FockSpace(40)).vec;
    const PhaseGrid g = PhaseGrid::square(2.0, 41);
    EXPECT_THROW(cohen_distribution(sample_wavefunction(psi, g), CohenKernel::identity(), g), ValidationError);
}

TEST(Symbols, ExpectationsFromWigner) {
    const cplx alpha(0.8, -0.4);
    const LadderConvention conv{1.0, 1.0};
    const PhaseGrid g = PhaseGrid::square(7.0, 113);
    const QuasiDistribution w = wigner_direct_grid(coherent_state(alpha, FockSpace(40)).density(), g, conv);
    const QuasiDistribution one = symbol_grid(g, Ordering::symmetric, [](cplx) { return 1.0; }, conv);
    EXPECT_NEAR(expectation_from_symbols(one, w), 1.0, 1e-6);
    const QuasiDistribution qsym = symbol_grid(g, Ordering::symmetric, [&](cplx a) { return conv.q_of(a); }, conv);
    EXPECT_NEAR(expectation_from_symbols(qsym, w), std::sqrt(2.0 * conv.hbar) * alpha.real() / conv.lambda, 1e-6);
    const QuasiDistribution nsym =
        symbol_grid(g, Ordering::symmetric, [](cplx a) { return std::norm(a) - 0.5; }, conv);
    EXPECT_NEAR(expectation_from_symbols(nsym, w), std::norm(alpha), 1e-6);
}

TEST(Symbols, DualityIsEnforced) {
    const PhaseGrid g = PhaseGrid::square(5.0, 41);
    const QuasiDistribution w = wigner_direct_grid(fock_state(0, FockSpace(10)), g);
    const QuasiDistribution normal = symbol_grid(g, Ordering::normal, [](cplx) { return 1.0; });
    EXPECT_THROW(expectation_from_symbols(normal, w), ValidationError);
    const QuasiDistribution other = symbol_grid(PhaseGrid::square(4.0, 41), Ordering::symmetric, [](cplx) { return 1.0; });
    EXPECT_THROW(expectation_from_symbols(other, w), ValidationError);
}

TEST(Symbols, AntinormalNumberAgainstHusimi) {
    // Q-representation: <a a+> = int |alpha|^2 Q
    const double nbar = 0.7;
    const PhaseGrid g = PhaseGrid::square(9.0, 121);
    const QuasiDistribution q = husimi_direct_grid(thermal_state(nbar, FockSpace(60)), g);
    const QuasiDistribution sym = symbol_grid(g, Ordering::antinormal, [](cplx a) { return std::norm(a); });
    EXPECT_NEAR(expectation_from_symbols(sym, q), nbar + 1.0, 1e-5);
}
