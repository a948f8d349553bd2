#include <cmath>

#include <gtest/gtest.h>

#include "cvq/errors.hpp"
#include "cvq/gaussian_state.hpp"
#include "cvq/measurement.hpp"
#include "oracles.hpp"

using namespace cvq;

namespace {

GaussianState random_two_mode(unsigned seed) {
    GaussianState s = GaussianState::from_covariance(oracle::random_covariance(2, seed));
    s.d << 0.3 * seed, -0.2, 1.1, 0.05 * seed;
    return s;
}

// Rebuilds the joint covariance of the rest modes and the outcome from a
// conditioning result: gamma_rest = gamma_cond + 2 gain Sigma gain^T, and the
// cross covariance between the rest quadratures and the outcome is
// sqrt(2) gain Sigma (outcome scale vs. d scale).
Matrix reconstructed_rest(const ConditionalResult& r) {
    return r.conditional_state.gamma + 2.0 * r.gain * r.outcome_cov * r.gain.transpose();
}

} // namespace

TEST(Condition, ProductStateHasNoGain) {
    for (MeasurementKind k : {MeasurementKind::homodyne_q, MeasurementKind::homodyne_p, MeasurementKind::heterodyne}) {
        const ConditionalResult r = condition(GaussianState::vacuum(2), 1, k);
        EXPECT_TRUE(r.conditional_state.gamma.isIdentity(1e-15));
        EXPECT_TRUE(r.gain.isZero(0.0));
        EXPECT_EQ(r.remaining_modes, std::vector<int>{0});
        EXPECT_EQ(r.gain.cols(), outcome_arity(k));
    }
}

TEST(Condition, TmsvHomodyneMatchesSchurOracle) {
    for (double V : {1.5, 2.0, 7.0}) {
        const ConditionalResult r = condition(make_tmsv(V), 1, MeasurementKind::homodyne_q);
        Matrix expected(2, 2);
        expected << 1.0 / V, 0, 0, V;
        EXPECT_TRUE(r.conditional_state.gamma.isApprox(expected, 1e-12)) << V;
        EXPECT_TRUE(r.conditional_state.gamma.isApprox(oracle::homodyne_q_conditional(oracle::tmsv(V)), 1e-12));
    }
}

TEST(Condition, TmsvHeterodynePreparesCoherentState) {
    for (double V : {1.5, 2.0, 7.0}) {
        const ConditionalResult r = condition(make_tmsv(V), 1, MeasurementKind::heterodyne);
        EXPECT_TRUE(r.conditional_state.gamma.isIdentity(1e-12)) << V;
        EXPECT_TRUE(r.outcome_cov.isApprox((V + 1.0) * Matrix::Identity(2, 2)));
    }
}

TEST(Condition, RandomStatesMatchOracle) {
    for (unsigned seed = 0; seed < 30; ++seed) {
        const GaussianState s = random_two_mode(seed);
        EXPECT_TRUE(condition(s, 1, MeasurementKind::heterodyne)
                        .conditional_state.gamma.isApprox(oracle::heterodyne_conditional(s.gamma), 1e-10));
        EXPECT_TRUE(condition(s, 1, MeasurementKind::homodyne_q)
                        .conditional_state.gamma.isApprox(oracle::homodyne_q_conditional(s.gamma), 1e-10));
    }
}

TEST(Condition, ReconstructsMarginalSecondMoments) {
    for (unsigned seed = 0; seed < 30; ++seed) {
        const GaussianState s = random_two_mode(seed);
        for (int mode : {0, 1}) {
            for (MeasurementKind k : {MeasurementKind::homodyne_q, MeasurementKind::homodyne_p, MeasurementKind::heterodyne}) {
                const ConditionalResult r = condition(s, mode, k);
                const GaussianState rest = reduce(s, {1 - mode});
                EXPECT_LT((reconstructed_rest(r) - rest.gamma).cwiseAbs().maxCoeff(), 1e-9);
                // Averaging the conditional displacement over outcomes gives
                // back the marginal displacement.
                EXPECT_LT((r.displacement_at(r.outcome_mean) - rest.d).cwiseAbs().maxCoeff(), 1e-12);
                EXPECT_LT((r.conditional_state.d - rest.d).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(Condition, NeverIncreasesEntropy) {
    for (unsigned seed = 0; seed < 100; ++seed) {
        const GaussianState s = random_two_mode(seed + 500);
        const double before = von_neumann_entropy(reduce(s, {0}));
        for (MeasurementKind k : {MeasurementKind::homodyne_q, MeasurementKind::heterodyne}) {
            EXPECT_LE(von_neumann_entropy(condition(s, 1, k).conditional_state), before + 1e-8) << seed;
        }
    }
}

TEST(Condition, PurityPreserved) {
    for (unsigned seed = 0; seed < 20; ++seed) {
        const Matrix S = oracle::random_symplectic(2, seed);
        const GaussianState pure = GaussianState::from_covariance(S * S.transpose());
        for (MeasurementKind k : {MeasurementKind::homodyne_q, MeasurementKind::heterodyne}) {
            const std::vector<double> nu = symplectic_eigenvalues(condition(pure, 0, k).conditional_state);
            EXPECT_NEAR(nu[0], 1.0, 1e-8) << seed;
        }
    }
}

TEST(Condition, ConditionalStateIsValidAndOutcomeCovPositive) {
    for (unsigned seed = 0; seed < 30; ++seed) {
        const ConditionalResult r = condition(random_two_mode(seed), 0, MeasurementKind::heterodyne);
        EXPECT_TRUE(validate_state(r.conditional_state).ok);
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(r.outcome_cov).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Condition, Errors) {
    EXPECT_THROW(condition(GaussianState::vacuum(1), 0, MeasurementKind::heterodyne), std::invalid_argument);
    EXPECT_THROW(condition(GaussianState::vacuum(2), 2, MeasurementKind::heterodyne), std::out_of_range);
    EXPECT_THROW(condition(GaussianState::from_covariance(0.5 * Matrix::Identity(4, 4)), 0, MeasurementKind::heterodyne),
                 PhysicalityError);
}

TEST(Condition, DisplacementAffineInOutcome) {
    const GaussianState s = random_two_mode(3);
    const ConditionalResult r = condition(s, 1, MeasurementKind::heterodyne);
    Vector x(2);
    x << 0.7, -1.3;
    EXPECT_TRUE(r.displacement_at(x).isApprox(r.offset + r.gain * x));
}

TEST(OutcomeMarginal, Examples) {
    EXPECT_NEAR(outcome_marginal(GaussianState::vacuum(1), 0, MeasurementKind::homodyne_q).cov(0, 0), 1.0, 0.0);
    EXPECT_TRUE(outcome_marginal(GaussianState::thermal(3.0), 0, MeasurementKind::heterodyne)
                    .cov.isApprox(4.0 * Matrix::Identity(2, 2)));
    EXPECT_NEAR(outcome_marginal(make_tmsv(2.5), 1, MeasurementKind::homodyne_q).cov(0, 0), 2.5, 1e-15);
}

TEST(OutcomeMarginal, MeanOnShotNoiseScale) {
    GaussianState s = GaussianState::vacuum(1);
    s.d << 0.5, -2.0;
    const ClassicalGaussian h = outcome_marginal(s, 0, MeasurementKind::homodyne_p);
    EXPECT_NEAR(h.mean(0), -2.0 * std::sqrt(2.0), 1e-15);
    const ClassicalGaussian het = outcome_marginal(s, 0, MeasurementKind::heterodyne);
    EXPECT_NEAR(het.mean(0), 0.5 * std::sqrt(2.0), 1e-15);
}
