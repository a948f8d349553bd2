#include "cvq/keyrate.hpp"

#include <cmath>
#include <stdexcept>

#include "cvq/channel.hpp"
#include "cvq/errors.hpp"

namespace cvq::keyrate {

namespace {

constexpr int kAlice = 0;
constexpr int kBob = 1;

void require_two_mode(const GaussianState& ab) {
    if (ab.n_modes != 2) throw DimensionError("keyrate: AB state must have exactly two modes");
    const Validation v = validate_state(ab);
    if (!v.ok) throw PhysicalityError("keyrate: " + v.message);
}

// Entropies of conditional states can come out a hair below zero.
double nonnegative(double x) { return x < 0.0 && x > -1e-12 ? 0.0 : x; }

} // namespace

void validate(const ProtocolConfig& cfg) {
    if (!(cfg.V >= 1.0) || !std::isfinite(cfg.V)) {
        throw std::invalid_argument("ProtocolConfig: V must be >= 1, got " + std::to_string(cfg.V));
    }
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) {
        throw std::invalid_argument("ProtocolConfig: beta must lie in (0, 1], got " + std::to_string(cfg.beta));
    }
}

MeasurementKind alice_measurement(const ProtocolConfig& cfg) {
    return cfg.prep == Prep::coherent ? MeasurementKind::heterodyne : MeasurementKind::homodyne_q;
}

MeasurementKind bob_measurement(const ProtocolConfig& cfg) {
    return cfg.bob == BobMeasurement::heterodyne ? MeasurementKind::heterodyne : MeasurementKind::homodyne_q;
}

double sift_factor(const ProtocolConfig& cfg) {
    return cfg.sift && cfg.prep == Prep::squeezed ? 0.5 : 1.0;
}

const char* to_string(Prep p) { return p == Prep::coherent ? "coherent" : "squeezed"; }
const char* to_string(BobMeasurement b) { return b == BobMeasurement::homodyne ? "homodyne" : "heterodyne"; }
const char* to_string(Reconciliation r) { return r == Reconciliation::direct ? "dr" : "rr"; }

Prep parse_prep(const std::string& s) {
    if (s == "coherent") return Prep::coherent;
    if (s == "squeezed") return Prep::squeezed;
    throw std::invalid_argument("unknown preparation '" + s + "' (expected coherent|squeezed)");
}

BobMeasurement parse_bob(const std::string& s) {
    if (s == "homodyne") return BobMeasurement::homodyne;
    if (s == "heterodyne") return BobMeasurement::heterodyne;
    throw std::invalid_argument("unknown Bob measurement '" + s + "' (expected homodyne|heterodyne)");
}

Reconciliation parse_recon(const std::string& s) {
    if (s == "dr" || s == "DR" || s == "direct") return Reconciliation::direct;
    if (s == "rr" || s == "RR" || s == "reverse") return Reconciliation::reverse;
    throw std::invalid_argument("unknown reconciliation '" + s + "' (expected dr|rr)");
}

GaussianState post_channel_state(const ProtocolConfig& cfg, double T, double xi) {
    validate(cfg);
    return apply(GaussianChannel::loss_noise(T, xi), make_tmsv(cfg.V), kBob);
}

double mutual_information_xy(const ProtocolConfig& cfg, const GaussianState& ab) {
    require_two_mode(ab);
    const MeasurementKind bob = bob_measurement(cfg);
    const Matrix sigma_y = outcome_marginal(ab, kBob, bob).cov;
    const GaussianState b_given_x = condition(ab, kAlice, alice_measurement(cfg)).conditional_state;
    const Matrix sigma_y_given_x = outcome_marginal(b_given_x, 0, bob).cov;
    return nonnegative(0.5 * std::log2(sigma_y.determinant() / sigma_y_given_x.determinant()));
}

double holevo_xe(const ProtocolConfig& cfg, const GaussianState& ab) {
    require_two_mode(ab);
    // Eve holds the purification: H(E) = H(AB) and H(E|x) = H(rest|x), since
    // the measurements are rank-one.
    const GaussianState rest = cfg.recon == Reconciliation::direct
        ? condition(ab, kAlice, alice_measurement(cfg)).conditional_state
        : condition(ab, kBob, bob_measurement(cfg)).conditional_state;
    return nonnegative(von_neumann_entropy(ab) - von_neumann_entropy(rest));
}

double holevo_xb(const ProtocolConfig& cfg, const GaussianState& ab) {
    require_two_mode(ab);
    const GaussianState b = reduce(ab, {kBob});
    const GaussianState b_given_x = condition(ab, kAlice, alice_measurement(cfg)).conditional_state;
    return nonnegative(von_neumann_entropy(b) - von_neumann_entropy(b_given_x));
}

KeyRateReport report_from_state(const ProtocolConfig& cfg, const GaussianState& ab) {
    validate(cfg);
    KeyRateReport r;
    r.cfg = cfg;
    r.I_xy = mutual_information_xy(cfg, ab);
    r.chi_xe = holevo_xe(cfg, ab);
    r.chi_xb = holevo_xb(cfg, ab);
    r.K_coll = cfg.beta * r.I_xy - r.chi_xe;
    r.K_coll_prime = r.chi_xb - r.chi_xe;
    r.covariance = ab.gamma;
    return r;
}

double mutual_information_xy(const ProtocolConfig& cfg, double T, double xi) {
    return sift_factor(cfg) * mutual_information_xy(cfg, post_channel_state(cfg, T, xi));
}

double holevo_xe(const ProtocolConfig& cfg, double T, double xi) {
    return sift_factor(cfg) * holevo_xe(cfg, post_channel_state(cfg, T, xi));
}

double holevo_xb(const ProtocolConfig& cfg, double T, double xi) {
    return sift_factor(cfg) * holevo_xb(cfg, post_channel_state(cfg, T, xi));
}

KeyRateReport compute_report(const ProtocolConfig& cfg, double T, double xi) {
    const GaussianState ab = post_channel_state(cfg, T, xi);
    KeyRateReport r = report_from_state(cfg, ab);
    r.T = T;
    r.xi = xi;
    r.sift_factor = sift_factor(cfg);
    if (r.sift_factor != 1.0) {
        r.I_xy *= r.sift_factor;
        r.chi_xe *= r.sift_factor;
        r.chi_xb *= r.sift_factor;
        r.K_coll = cfg.beta * r.I_xy - r.chi_xe;
        r.K_coll_prime = r.chi_xb - r.chi_xe;
    }
    return r;
}

} // namespace cvq::keyrate
