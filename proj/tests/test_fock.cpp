#include <cmath>

#include <gtest/gtest.h>

#include "cvq/channel.hpp"
#include "cvq/errors.hpp"
#include "cvq/fock.hpp"
#include "oracles.hpp"

using namespace cvq;
using namespace cvq::lab;

namespace {

double mean_photon(const FockDensity& rho) {
    double n = 0.0;
    for (Eigen::Index k = 0; k < rho.matrix.rows(); ++k) n += static_cast<double>(k) * rho.matrix(k, k).real();
    return n;
}

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST(Realize, FockProjector) {
    const FockDensity rho = realize("fock:1", 10);
    EXPECT_EQ(rho.modes, 1);
    EXPECT_EQ(rho.dim(), 11);
    CMatrix expected = CMatrix::Zero(11, 11);
    expected(1, 1) = 1.0;
    EXPECT_TRUE(rho.matrix.isApprox(expected, 0.0));
    EXPECT_EQ(rho.tail_mass, 0.0);
}

TEST(Realize, ThermalIsGeometric) {
    const FockDensity rho = realize("thermal:1.0", 40);
    EXPECT_NEAR(mean_photon(rho), 1.0, 1e-8);
    for (int k = 0; k < 10; ++k) EXPECT_NEAR(rho.matrix(k, k).real(), std::pow(0.5, k + 1), 1e-12);
    EXPECT_TRUE(rho.matrix.isDiagonal(0.0));
}

TEST(Realize, TmsvIsPure) {
    EXPECT_NEAR(purity(realize("tmsv:2", 40)), 1.0, 1e-8);
}

TEST(Realize, CutoffTooSmall) {
    EXPECT_THROW(realize("fock:0", 3), std::invalid_argument);
}

TEST(Realize, TruncationErrorSuggestsWorkingCutoff) {
    try {
        realize("thermal:3", 20);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError& e) {
        EXPECT_EQ(e.cutoff, 20);
        EXPECT_GT(e.tail_mass, 1e-6);
        EXPECT_GT(e.suggested_cutoff, 20);
        EXPECT_NO_THROW(realize("thermal:3", e.suggested_cutoff));
    }
}

TEST(Realize, IntermediateTailIsTracked) {
    // Loss shrinks the tail of the final state, but the input was over budget.
    EXPECT_THROW(realize("loss(0.1, thermal:3)", 20), TruncationError);
}

TEST(Realize, PhotonSubtractionOfVacuumFails) {
    EXPECT_THROW(realize("photonsub(fock:0)", 10), std::domain_error);
}

TEST(Moments, Examples) {
    const GaussianState vac = moments(realize("fock:0", 10));
    EXPECT_TRUE(vac.d.isZero(0.0));
    EXPECT_TRUE(vac.gamma.isIdentity(1e-15));

    const GaussianState one = moments(realize("fock:1", 10));
    EXPECT_TRUE(one.d.isZero(0.0));
    EXPECT_TRUE(one.gamma.isApprox(3.0 * Matrix::Identity(2, 2), 1e-14));

    const GaussianState coh = moments(realize("coherent:1,0", 40));
    EXPECT_NEAR(coh.d(0), std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(coh.d(1), 0.0, 1e-14);
    EXPECT_LT(max_diff(coh.gamma, Matrix::Identity(2, 2)), 1e-10);
}

TEST(Moments, DisplacementScalesWithAmplitude) {
    const GaussianState coh = moments(realize("coherent:0.3,-0.7", 40));
    EXPECT_NEAR(coh.d(0), 0.3 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(coh.d(1), -0.7 * std::sqrt(2.0), 1e-12);
}

TEST(Moments, SqueezedVacuum) {
    for (double r : {0.1, 0.4, -0.3}) {
        const GaussianState s = moments(realize("squeezed:" + std::to_string(r), 40));
        EXPECT_NEAR(s.gamma(0, 0), std::exp(-2.0 * r), 1e-8) << r;
        EXPECT_NEAR(s.gamma(1, 1), std::exp(2.0 * r), 1e-8) << r;
        EXPECT_NEAR(s.gamma(0, 1), 0.0, 1e-12) << r;
    }
}

TEST(Moments, FullDephasingOfCoherentState) {
    const GaussianState s = moments(realize("dephase(1, coherent:0.8,0.6)", 40));
    EXPECT_LT(s.d.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(max_diff(s.gamma, 3.0 * Matrix::Identity(2, 2)), 1e-10);  // 2|alpha|^2 + 1
}

TEST(Moments, TmsvMatchesCovarianceConstruction) {
    for (double V : {1.5, 2.0, 3.0}) {
        const FockDensity rho = realize("tmsv:" + std::to_string(V), 40);
        ASSERT_LE(rho.tail_mass, 1e-8);
        EXPECT_LT(max_diff(moments(rho).gamma, oracle::tmsv(V)), 1e-6) << V;
    }
}

TEST(Moments, KrausLossMatchesCovarianceLoss) {
    for (const char* spec : {"fock:2", "coherent:0.5,0.2", "squeezed:0.3", "tmsv:2", "mix(0.5*fock:1, 0.5*coherent:1,0)",
                             "prod(fock:1, squeezed:0.2)", "prod(coherent:0.2,-0.4, coherent:-0.3,0.5)"}) {
        for (double T : {0.3, 0.7, 1.0}) {
            const FockDensity rho = realize(spec, 40);
            const int mode = rho.modes - 1;
            const GaussianState expected = apply(GaussianChannel::loss_noise(T, 0.0), moments(rho), mode);
            const GaussianState got = moments(apply_loss(rho, T, mode));
            EXPECT_LT(max_diff(got.gamma, expected.gamma), 1e-6) << spec << " T=" << T;
            EXPECT_LT((got.d - expected.d).cwiseAbs().maxCoeff(), 1e-6) << spec << " T=" << T;
        }
    }
}

TEST(Entropy, Examples) {
    EXPECT_NEAR(entropy_fock(realize("fock:1", 10)), 0.0, 1e-12);
    EXPECT_NEAR(entropy_fock(realize("mix(0.5*fock:0, 0.5*fock:1)", 10)), 1.0, 1e-12);
    EXPECT_NEAR(entropy_fock(realize("thermal:1.0", 40)), 2.0, 1e-8);
    EXPECT_NEAR(entropy_fock(realize("thermal:1.0", 40)), oracle::g(3.0), 1e-8);
}

TEST(Structure, PartialTraceOfTmsvIsThermal) {
    const double V = 2.0;
    const FockDensity rho = realize("tmsv:2", 40);
    for (int keep : {0, 1}) {
        const FockDensity red = partial_trace(rho, keep);
        const FockDensity th = thermal_state((V - 1.0) / 2.0, 40);
        EXPECT_LT((red.matrix - th.matrix).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Structure, TensorThenTraceRecoversFactors) {
    const FockDensity a = realize("coherent:0.5,0.1", 20), b = realize("fock:2", 20);
    const FockDensity ab = tensor(a, b);
    EXPECT_NEAR(trace(ab), 1.0, 1e-12);
    EXPECT_LT((partial_trace(ab, 0).matrix - a.matrix).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((partial_trace(ab, 1).matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Structure, ChannelsOnModeZero) {
    const FockDensity a = realize("coherent:0.5,0.1", 20), b = realize("fock:2", 20);
    const FockDensity ab = tensor(a, b);
    EXPECT_LT((apply_loss(ab, 0.6, 0).matrix - tensor(apply_loss(a, 0.6, 0), b).matrix).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((apply_dephasing(ab, 0.4, 0).matrix - tensor(apply_dephasing(a, 0.4, 0), b).matrix).cwiseAbs().maxCoeff(),
              1e-14);
    EXPECT_LT((photon_subtract(ab, 0).matrix - tensor(photon_subtract(a, 0), b).matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Channels, PhotonSubtractedThermalDoublesMean) {
    const FockDensity rho = realize("photonsub(thermal:0.5)", 40);
    EXPECT_NEAR(mean_photon(rho), 1.0, 1e-8);
}

TEST(Channels, LossPreservesTraceAndPositivity) {
    const FockDensity rho = realize("loss(0.35, mix(0.4*fock:3, 0.6*coherent:1,-0.5))", 30);
    EXPECT_NO_THROW(check_admissible(rho));
}

TEST(Admissible, RejectsBadDensities) {
    FockDensity rho = realize("fock:1", 10);
    rho.matrix(0, 1) = 0.1;
    EXPECT_THROW(check_admissible(rho), std::domain_error);
    rho = realize("fock:1", 10);
    rho.matrix *= 1.01;
    EXPECT_THROW(check_admissible(rho), std::domain_error);
    rho = realize("fock:1", 10);
    rho.matrix(1, 1) = 1.1;
    rho.matrix(0, 0) = -0.1;
    EXPECT_THROW(check_admissible(rho), std::domain_error);
}

TEST(Admissible, RandomCompositesAreAdmissible) {
    for (const char* spec : {"photonsub(loss(0.7, tmsv:1.5))", "dephase(0.3, loss(0.7, tmsv:1.5))",
                             "mix(0.2*prod(fock:1, thermal:0.2), 0.8*tmsv:1.8)", "photonsub(photonsub(squeezed:0.4))"}) {
        const FockDensity rho = realize(spec, 30);
        EXPECT_NO_THROW(check_admissible(rho)) << spec;
        EXPECT_EQ(rho.modes, parse_state_spec(spec)->modes);
    }
}
