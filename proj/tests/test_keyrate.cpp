#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cvq/keyrate.hpp"
#include "oracles.hpp"

using namespace cvq;
using namespace cvq::keyrate;

// TMSV with mode 1 through loss and excess noise, written entry by entry.
Matrix apply_loss_oracle(double V, double T, double xi);

namespace {

ProtocolConfig make_cfg(Prep p, BobMeasurement b, Reconciliation r, double V = 2.0) {
    ProtocolConfig c;
    c.prep = p;
    c.bob = b;
    c.recon = r;
    c.V = V;
    return c;
}

std::vector<ProtocolConfig> all_configs(double V) {
    std::vector<ProtocolConfig> out;
    for (Prep p : {Prep::coherent, Prep::squeezed}) {
        for (BobMeasurement b : {BobMeasurement::homodyne, BobMeasurement::heterodyne}) {
            for (Reconciliation r : {Reconciliation::direct, Reconciliation::reverse}) out.push_back(make_cfg(p, b, r, V));
        }
    }
    return out;
}

Matrix swap_modes(const Matrix& g) {
    Matrix p = Matrix::Zero(4, 4);
    p(0, 2) = p(1, 3) = p(2, 0) = p(3, 1) = 1.0;
    return p * g * p.transpose();
}

// Bob's variance after the channel, and his conditional variance given
// Alice's heterodyne (coherent) or homodyne (squeezed) outcome.
double bob_variance(double V, double T, double xi) { return T * (V + xi) + 1.0 - T; }
double bob_conditional(Prep p, double V, double T, double xi) {
    return p == Prep::coherent ? 1.0 + T * xi : T / V + 1.0 - T + T * xi;
}

double mi_oracle(const ProtocolConfig& c, double T, double xi) {
    const double vb = bob_variance(c.V, T, xi);
    const double vc = bob_conditional(c.prep, c.V, T, xi);
    if (c.bob == BobMeasurement::homodyne) return 0.5 * std::log2(vb / vc);
    if (c.prep == Prep::coherent) return std::log2((vb + 1.0) / (vc + 1.0));
    // Squeezed preparation with heterodyne Bob: only the Q quadrature is
    // informative; P conditional variance stays vb.
    return 0.5 * std::log2((vb + 1.0) / (vc + 1.0));
}

double chi_xe_oracle(const ProtocolConfig& c, double T, double xi) {
    const Matrix g = apply_loss_oracle(c.V, T, xi);
    const double h_ab = oracle::entropy(g);
    if (c.recon == Reconciliation::reverse) {
        const Matrix cond = c.bob == BobMeasurement::homodyne ? oracle::homodyne_q_conditional(g)
                                                              : oracle::heterodyne_conditional(g);
        return h_ab - oracle::entropy(cond);
    }
    const Matrix sw = swap_modes(g);
    const Matrix cond = c.prep == Prep::coherent ? oracle::heterodyne_conditional(sw) : oracle::homodyne_q_conditional(sw);
    return h_ab - oracle::entropy(cond);
}

} // namespace

TEST(PostChannelState, Examples) {
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::reverse);
    EXPECT_TRUE(post_channel_state(c, 1.0, 0.0).gamma.isApprox(make_tmsv(2.0).gamma, 1e-15));
    const Matrix g = post_channel_state(c, 0.5, 0.0).gamma;
    EXPECT_TRUE(g.isApprox(apply_loss_oracle(2.0, 0.5, 0.0), 1e-14));
    EXPECT_NEAR(g(2, 2), 1.5, 1e-15);
    EXPECT_NEAR(g(0, 2), std::sqrt(1.5), 1e-15);
    for (double T : {0.05, 0.3, 0.99}) {
        EXPECT_TRUE(validate_state(post_channel_state(c, T, 0.2)).ok);
    }
}

TEST(MutualInformation, Examples) {
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::direct);
    EXPECT_NEAR(mutual_information_xy(c, 1.0, 0.0), 0.5, 1e-12);
    for (const ProtocolConfig& k : all_configs(1.0)) EXPECT_NEAR(mutual_information_xy(k, 0.6, 0.1), 0.0, 1e-12);
}

TEST(MutualInformation, MatchesClosedFormAllConfigs) {
    for (double V : {1.5, 2.0, 10.0}) {
        for (const ProtocolConfig& c : all_configs(V)) {
            for (double T : {0.1, 0.5, 0.9, 1.0}) {
                for (double xi : {0.0, 0.05, 0.3}) {
                    EXPECT_NEAR(mutual_information_xy(c, T, xi), mi_oracle(c, T, xi), 1e-10);
                }
            }
        }
    }
}

TEST(MutualInformation, MonotoneInTransmittance) {
    for (const ProtocolConfig& c : all_configs(2.0)) {
        double prev = -1.0;
        for (int i = 1; i <= 20; ++i) {
            const double v = mutual_information_xy(c, 0.05 * i, 0.0);
            EXPECT_GE(v, prev - 1e-14);
            prev = v;
        }
    }
}

TEST(HolevoXE, ZeroWithoutChannel) {
    for (double V : {1.5, 2.0, 10.0}) {
        for (const ProtocolConfig& c : all_configs(V)) EXPECT_NEAR(holevo_xe(c, 1.0, 0.0), 0.0, 1e-9);
    }
}

TEST(HolevoXE, MatchesInvariantOracle) {
    for (double V : {1.5, 2.0, 10.0}) {
        for (const ProtocolConfig& c : all_configs(V)) {
            for (double T : {0.1, 0.5, 0.9}) {
                for (double xi : {0.0, 0.05, 0.3}) {
                    EXPECT_NEAR(holevo_xe(c, T, xi), chi_xe_oracle(c, T, xi), 1e-8);
                }
            }
        }
    }
}

TEST(HolevoXE, NondecreasingInExcessNoise) {
    for (const ProtocolConfig& c : all_configs(2.0)) {
        for (double T : {0.2, 0.5, 0.8}) {
            double prev = -1.0;
            for (int i = 0; i <= 20; ++i) {
                const double v = holevo_xe(c, T, 0.01 * i);
                EXPECT_GE(v, prev - 1e-10);
                prev = v;
            }
        }
    }
}

TEST(HolevoXB, Examples) {
    for (const ProtocolConfig& c : all_configs(1.0)) EXPECT_NEAR(holevo_xb(c, 0.4, 0.1), 0.0, 1e-12);
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::reverse);
    EXPECT_NEAR(holevo_xb(c, 1.0, 0.0), oracle::g(2.0), 1e-9);
    EXPECT_NEAR(holevo_xb(c, 1.0, 0.0), 1.3774437510817346, 1e-9);
}

TEST(HolevoXB, DominatesMutualInformation) {
    for (double V : {1.2, 2.0, 5.0, 20.0}) {
        for (const ProtocolConfig& c : all_configs(V)) {
            for (double T : {0.05, 0.4, 0.8, 1.0}) {
                for (double xi : {0.0, 0.1, 0.5}) {
                    EXPECT_LE(mutual_information_xy(c, T, xi), holevo_xb(c, T, xi) + 1e-9);
                }
            }
        }
    }
}

TEST(Report, IdentitiesExact) {
    for (const ProtocolConfig& c : all_configs(2.5)) {
        for (double T : {0.2, 0.7, 1.0}) {
            const KeyRateReport r = compute_report(c, T, 0.02);
            EXPECT_EQ(r.K_coll, r.I_xy - r.chi_xe);
            EXPECT_EQ(r.K_coll_prime, r.chi_xb - r.chi_xe);
            EXPECT_GE(r.I_xy, 0.0);
            EXPECT_GE(r.chi_xe, 0.0);
            EXPECT_GE(r.chi_xb, 0.0);
            EXPECT_LE(r.I_xy, r.chi_xb + 1e-9);
        }
    }
}

TEST(Report, NoChannelMeansKeyEqualsMutualInformation) {
    for (const ProtocolConfig& c : all_configs(2.0)) {
        const KeyRateReport r = compute_report(c, 1.0, 0.0);
        EXPECT_NEAR(r.chi_xe, 0.0, 1e-9);
        EXPECT_NEAR(r.K_coll, r.I_xy, 1e-9);
    }
}

TEST(Report, ReverseReconciliationPositiveAtZeroNoise) {
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::reverse);
    for (int i = 1; i <= 19; ++i) EXPECT_GT(compute_report(c, 0.05 * i, 0.0).K_coll, 0.0) << 0.05 * i;
}

TEST(Report, DirectReconciliationCrossesZero) {
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::direct);
    EXPECT_LT(compute_report(c, 0.5, 0.0).K_coll, 0.0);
    EXPECT_GT(compute_report(c, 0.99, 0.0).K_coll, 0.0);
}

TEST(Report, DisplacementInvariance) {
    const ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::heterodyne, Reconciliation::reverse);
    GaussianState ab = post_channel_state(c, 0.6, 0.05);
    const KeyRateReport base = report_from_state(c, ab);
    ab.d << 2.0, -1.0, 0.3, 5.0;
    const KeyRateReport shifted = report_from_state(c, ab);
    EXPECT_EQ(base.I_xy, shifted.I_xy);
    EXPECT_EQ(base.chi_xe, shifted.chi_xe);
    EXPECT_EQ(base.chi_xb, shifted.chi_xb);
}

TEST(Report, KeyNonincreasingInExcessNoise) {
    for (const ProtocolConfig& c : all_configs(2.0)) {
        for (int t = 1; t <= 19; ++t) {
            double prev = 1e9;
            for (int i = 0; i <= 10; ++i) {
                const double k = compute_report(c, 0.05 * t, 0.02 * i).K_coll;
                EXPECT_LE(k, prev + 1e-10);
                prev = k;
            }
        }
    }
}

TEST(Report, SiftingHalvesSqueezedRates) {
    ProtocolConfig c = make_cfg(Prep::squeezed, BobMeasurement::homodyne, Reconciliation::reverse);
    const KeyRateReport plain = compute_report(c, 0.7, 0.01);
    c.sift = true;
    const KeyRateReport sifted = compute_report(c, 0.7, 0.01);
    EXPECT_EQ(sifted.sift_factor, 0.5);
    EXPECT_NEAR(sifted.I_xy, 0.5 * plain.I_xy, 1e-15);
    EXPECT_NEAR(sifted.K_coll, 0.5 * plain.K_coll, 1e-15);
    ProtocolConfig coh = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::reverse);
    coh.sift = true;
    EXPECT_EQ(sift_factor(coh), 1.0);
}

TEST(Report, BetaScalesOnlyMutualInformation) {
    ProtocolConfig c = make_cfg(Prep::coherent, BobMeasurement::homodyne, Reconciliation::reverse);
    c.beta = 0.95;
    const KeyRateReport r = compute_report(c, 0.7, 0.01);
    EXPECT_EQ(r.K_coll, 0.95 * r.I_xy - r.chi_xe);
}

TEST(Config, ParsingAndValidation) {
    EXPECT_EQ(parse_recon("DR"), Reconciliation::direct);
    EXPECT_EQ(parse_recon("reverse"), Reconciliation::reverse);
    EXPECT_EQ(parse_prep("squeezed"), Prep::squeezed);
    EXPECT_EQ(parse_bob("heterodyne"), BobMeasurement::heterodyne);
    EXPECT_THROW(parse_recon("sideways"), std::invalid_argument);
    ProtocolConfig c;
    c.V = 0.5;
    EXPECT_THROW(validate(c), std::invalid_argument);
    EXPECT_EQ(alice_measurement(make_cfg(Prep::squeezed, BobMeasurement::homodyne, Reconciliation::direct)),
              MeasurementKind::homodyne_q);
}

Matrix apply_loss_oracle(double V, double T, double xi) {
    Matrix g = oracle::tmsv(V);
    const double s = std::sqrt(T);
    g.block(0, 2, 2, 2) *= s;
    g.block(2, 0, 2, 2) *= s;
    g.block(2, 2, 2, 2) = (T * V + 1.0 - T + T * xi) * Matrix::Identity(2, 2);
    return g;
}
