#pragma once

#include <cstddef>
#include <string>

#include "cvq/gaussian_state.hpp"
#include "cvq/measurement.hpp"

namespace cvq::keyrate {

enum class Prep { coherent, squeezed };
enum class BobMeasurement { homodyne, heterodyne };
enum class Reconciliation { direct, reverse };

/// One member of the Gaussian-modulated protocol family, described in the
/// entanglement-based picture. V is the EPR variance (modulation V - 1).
struct ProtocolConfig {
    Prep prep = Prep::coherent;
    BobMeasurement bob = BobMeasurement::homodyne;
    Reconciliation recon = Reconciliation::reverse;
    double V = 2.0;
    // Reconciliation efficiency applied to I_xy inside K_coll. Not part of the
    // bare bounds; 1 reproduces them.
    double beta = 1.0;
    // Apply the 1/2 basis-sifting factor for squeezed preparation.
    bool sift = false;
};

void validate(const ProtocolConfig& cfg);

// Alice's measurement on mode 0 in the EB picture (heterodyne for coherent
// preparation, homodyne in Q for squeezed preparation).
MeasurementKind alice_measurement(const ProtocolConfig& cfg);
MeasurementKind bob_measurement(const ProtocolConfig& cfg);
double sift_factor(const ProtocolConfig& cfg);

const char* to_string(Prep p);
const char* to_string(BobMeasurement b);
const char* to_string(Reconciliation r);
Prep parse_prep(const std::string& s);
BobMeasurement parse_bob(const std::string& s);
Reconciliation parse_recon(const std::string& s);

/// Key-rate bounds in bits per channel use.
struct KeyRateReport {
    ProtocolConfig cfg;
    double T = 1.0;
    double xi = 0.0;
    double I_xy = 0.0;
    double chi_xe = 0.0;
    double chi_xb = 0.0;
    double K_coll = 0.0;        // beta * I_xy - chi_xe
    double K_coll_prime = 0.0;  // chi_xb - chi_xe
    double sift_factor = 1.0;
    Matrix covariance;          // post-channel AB covariance

    bool estimated = false;
    std::size_t n_samples = 0;
    bool projected = false;            // estimate needed symplectic clipping
    bool mirrored_entries = false;     // unobserved P entries filled from Q
    bool zeroed_entries = false;       // unobserved Q-P cross terms set to 0
};

// TMSV(V) with mode 1 sent through loss_noise(T, xi).
GaussianState post_channel_state(const ProtocolConfig& cfg, double T, double xi);

double mutual_information_xy(const ProtocolConfig& cfg, double T, double xi);
double holevo_xe(const ProtocolConfig& cfg, double T, double xi);
double holevo_xb(const ProtocolConfig& cfg, double T, double xi);
KeyRateReport compute_report(const ProtocolConfig& cfg, double T, double xi);

// The same quantities for an arbitrary two-mode AB state (mode 0 = Alice,
// mode 1 = Bob). Displacements are ignored. No sifting is applied here.
double mutual_information_xy(const ProtocolConfig& cfg, const GaussianState& ab);
double holevo_xe(const ProtocolConfig& cfg, const GaussianState& ab);
double holevo_xb(const ProtocolConfig& cfg, const GaussianState& ab);
KeyRateReport report_from_state(const ProtocolConfig& cfg, const GaussianState& ab);

} // namespace cvq::keyrate
