#include <gtest/gtest.h>

#include <cmath>

#include "qpd/states.hpp"

using namespace qpd;

namespace {

// <beta|alpha> for untruncated coherent states
cplx coherent_overlap(cplx beta, cplx alpha) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(beta) * alpha);
}

}  // namespace

TEST(Fock, VectorAndDensity) {
    const FockSpace s(8);
    const PureState f = fock_vector(3, s);
    EXPECT_EQ(f.vec(3), cplx(1.0));
    EXPECT_NEAR(f.vec.norm(), 1.0, 1e-15);
    const DensityMatrix rho = fock_state(3, s);
    EXPECT_NEAR(rho.mean_photon_number(), 3.0, 1e-14);
    EXPECT_THROW(fock_vector(8, s), ValidationError);
    EXPECT_THROW(fock_vector(-1, s), ValidationError);
}

TEST(Coherent, OverlapMatchesGaussian) {
    const FockSpace s(40);
    const cplx alpha = 1.0, beta(0.0, 0.5);
    const cplx ov = coherent_state(beta, s).vec.dot(coherent_state(alpha, s).vec);
    EXPECT_NEAR(std::norm(ov), std::exp(-std::norm(alpha - beta)), 1e-10);
    EXPECT_LT(std::abs(ov - coherent_overlap(beta, alpha)), 1e-10);
}

TEST(Coherent, EigenResidualShrinksWithDim) {
    const cplx alpha(0.9, 0.4);
    double prev = 1e300;
    for (const int dim : {10, 16, 24, 32}) {
        const FockSpace s(dim);
        const StateVector v = coherent_state(alpha, s).vec;
        const double res = (annihilation(s) * v - alpha * v).norm();
        EXPECT_LT(res, prev) << dim;
        prev = res;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(Coherent, MeanPhotonNumberAndDiscardedWeight) {
    const FockSpace s(50);
    const cplx alpha(1.2, -0.7);
    const PureState c = coherent_state(alpha, s);
    EXPECT_NEAR(c.density().mean_photon_number(), std::norm(alpha), 1e-10);
    EXPECT_LT(c.discarded_weight, 1e-14);
    const PureState small = coherent_state(1.5, FockSpace(10));
    EXPECT_GT(small.discarded_weight, 1e-6);
}

TEST(Coherent, RejectsAmplitudeBeyondTruncation) {
    EXPECT_THROW(coherent_state(3.0, FockSpace(20)), ValidationError);
    EXPECT_NO_THROW(coherent_state(2.0, FockSpace(20)));
}

TEST(Thermal, PurityAndPopulations) {
    const double nbar = 0.5;
    const DensityMatrix rho = thermal_state(nbar, FockSpace(60));
    EXPECT_NEAR(rho.purity(), 1.0 / (1.0 + 2.0 * nbar), 1e-12);
    EXPECT_NEAR(rho.mean_photon_number(), nbar, 1e-12);
    for (int n = 0; n < 10; ++n)
        EXPECT_NEAR(rho.matrix()(n, n).real(), std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1), 1e-14);
    EXPECT_THROW(thermal_state(-0.1, FockSpace(10)), ValidationError);
}

TEST(Thermal, ZeroIsVacuum) {
    const DensityMatrix rho = thermal_state(0.0, FockSpace(6));
    EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-15);
}

TEST(Squeezed, QuadratureVariances) {
    // D(alpha)S(r)|0>: Var(X1) = e^{-2r}/4, Var(X2) = e^{2r}/4 with X1 = (a + a+)/2
    const double r = 0.4;
    const cplx alpha(0.5, 0.2);
    const FockSpace s(80);
    const StateVector v = squeezed_coherent(alpha, SqueezeParameter(r), s).vec;
    const ComplexMatrix a = annihilation(s), ad = creation(s);
    const ComplexMatrix x1 = 0.5 * (a + ad), x2 = cplx(0.0, -0.5) * (a - ad);
    auto var = [&](const ComplexMatrix& x) {
        const cplx m = v.dot(x * v), m2 = v.dot(x * x * v);
        return (m2 - m * m).real();
    };
    EXPECT_NEAR(var(x1), std::exp(-2.0 * r) / 4.0, 1e-9);
    EXPECT_NEAR(var(x2), std::exp(2.0 * r) / 4.0, 1e-9);
    EXPECT_LT(std::abs(v.dot(a * v) - alpha), 1e-9);
}

TEST(Nonunitary, UnitStateMatchesUnitarySqueezedVacuum) {
    const cplx zeta(0.3, 0.2);
    const FockSpace s(80);
    const NonunitarySqueezedVacuum nu = squeezed_vacuum_nonunitary(zeta, s);
    const SqueezeParameter sp = matched_squeeze_parameter(zeta);
    EXPECT_NEAR(std::tanh(sp.r()), std::abs(zeta), 1e-14);
    const StateVector ref = squeeze_direct(sp, s).col(0);
    EXPECT_LT((nu.unit - ref).norm(), 1e-6);
    EXPECT_NEAR(nu.unit.norm(), 1.0, 1e-14);
}

TEST(Nonunitary, PairingIsOne) {
    for (const cplx zeta : {cplx(0.3), cplx(0.0, 0.6), cplx(-0.5, 0.4)})
        EXPECT_LT(std::abs(nonunitary_pairing(zeta, FockSpace(80)) - 1.0), 1e-10) << zeta;
}

TEST(Nonunitary, PairedVectorCoefficients) {
    // (1 + |z|^2)^{1/4} (-z/2)^k sqrt((2k)!)/k!
    const cplx zeta(0.3, -0.1);
    const NonunitarySqueezedVacuum nu = squeezed_vacuum_nonunitary(zeta, FockSpace(40));
    for (int k = 0; k < 8; ++k) {
        const double mag = std::exp(0.5 * std::lgamma(2.0 * k + 1.0) - std::lgamma(k + 1.0));
        const cplx expect = std::pow(1.0 + std::norm(zeta), 0.25) * std::pow(-zeta / 2.0, k) * mag;
        EXPECT_LT(std::abs(nu.paired(2 * k) - expect), 1e-14) << k;
        EXPECT_EQ(nu.paired(2 * k + 1), cplx(0.0));
    }
}

TEST(Nonunitary, RejectsUnitModulus) {
    EXPECT_THROW(squeezed_vacuum_nonunitary(1.0, FockSpace(10)), ValidationError);
}

TEST(StateSpec, ParsesAndPrints) {
    for (const char* text : {"fock:2", "coherent:1+0.5i", "squeezed:1:0.3i", "nonunitary:0.4", "thermal:0.5",
                             "mix:0.5*fock:0,0.5*coherent:2"}) {
        const StateSpec s = parse_state_spec(text);
        const StateSpec again = parse_state_spec(to_string(s));
        EXPECT_EQ(to_string(again), to_string(s)) << text;
    }
    EXPECT_TRUE(std::holds_alternative<spec::Fock>(parse_state_spec("vacuum").kind));
    EXPECT_THROW(parse_state_spec("banana:1"), ValidationError);
    EXPECT_THROW(parse_state_spec("fock:x"), ValidationError);
}

TEST(StateSpec, MixtureBuildsWeightedSum) {
    const FockSpace s(30);
    const DensityMatrix mix = build_state(parse_state_spec("mix:0.25*fock:0,0.75*fock:2"), s);
    EXPECT_NEAR(mix.matrix()(0, 0).real(), 0.25, 1e-15);
    EXPECT_NEAR(mix.matrix()(2, 2).real(), 0.75, 1e-15);
    EXPECT_NEAR(mix.purity(), 0.25 * 0.25 + 0.75 * 0.75, 1e-15);
}

TEST(StateSpec, BuildRecordsDiscardedWeight) {
    Diagnostics d;
    build_state(parse_state_spec("coherent:1.5"), FockSpace(12), &d);
    ASSERT_TRUE(d.has("discarded_weight"));
    EXPECT_GT(d.get("discarded_weight"), 0.0);
}

TEST(Complex, ParseForms) {
    EXPECT_EQ(parse_complex("1"), cplx(1.0, 0.0));
    EXPECT_EQ(parse_complex("-0.5"), cplx(-0.5, 0.0));
    EXPECT_EQ(parse_complex("2i"), cplx(0.0, 2.0));
    EXPECT_EQ(parse_complex("1.0+0.5i"), cplx(1.0, 0.5));
    EXPECT_EQ(parse_complex("-0.3-0.2i"), cplx(-0.3, -0.2));
    EXPECT_EQ(parse_complex("1e-3-2e-1i"), cplx(1e-3, -0.2));
    EXPECT_THROW(parse_complex("1+"), ValidationError);
    const cplx z(0.125, -3.5);
    EXPECT_EQ(parse_complex(format_complex(z)), z);
}
