#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cvq/keyrate.hpp"
#include "cvq/measurement.hpp"

namespace cvq::sim {

inline constexpr std::size_t kChunkSize = 65536;

/// Jointly Gaussian distribution of (Alice's outcomes, Bob's outcomes) in the
/// entanglement-based picture. Outcomes are on the shot-noise scale.
struct JointOutcome {
    Vector mean;
    Matrix cov;
    MeasurementKind alice_kind = MeasurementKind::heterodyne;
    MeasurementKind bob_kind = MeasurementKind::homodyne_q;
    int alice_arity() const { return outcome_arity(alice_kind); }
    int bob_arity() const { return outcome_arity(bob_kind); }
};

JointOutcome joint_outcome(const keyrate::ProtocolConfig& cfg, const GaussianState& ab);

struct SampleBatch {
    keyrate::ProtocolConfig cfg;
    double T = 1.0;
    double xi = 0.0;
    std::uint64_t seed = 0;
    std::string generator = "";
    MeasurementKind alice_kind = MeasurementKind::heterodyne;
    MeasurementKind bob_kind = MeasurementKind::homodyne_q;
    Matrix alice;  // n x arity
    Matrix bob;    // n x arity

    std::size_t n() const { return static_cast<std::size_t>(alice.rows()); }
};

// Deterministic for a fixed seed regardless of CVQ_THREADS.
SampleBatch simulate(const keyrate::ProtocolConfig& cfg, double T, double xi, std::size_t n, std::uint64_t seed);

/// Running mean and covariance (pairwise-merge update) of outcome vectors.
class MomentAccumulator {
public:
    explicit MomentAccumulator(int dim);
    void add(const Vector& z);
    void add_rows(const Matrix& rows);  // one outcome vector per row
    void merge(const MomentAccumulator& other);
    std::size_t count() const { return n_; }
    const Vector& mean() const { return mean_; }
    Matrix covariance() const;  // unbiased; requires count >= 2

private:
    std::size_t n_ = 0;
    Vector mean_;
    Matrix m2_;
};

/// AB moments recovered from outcome statistics.
///
/// Homodyne in Q observes no P quadrature. Unobserved P variances are taken
/// equal to the Q ones and unobserved P-P cross terms equal to minus the Q-Q
/// ones (the phase-symmetric structure of the protocol states); unobserved
/// Q-P terms are set to zero. Both cases are flagged.
struct EstimatedMoments {
    keyrate::ProtocolConfig cfg;
    double T = 1.0;   // echoed from the simulation, not estimated
    double xi = 0.0;
    Vector d_hat;      // length 4
    Matrix gamma_hat;  // 4 x 4
    std::size_t n = 0;
    bool degenerate = false;
    bool mirrored = false;
    bool zeroed = false;
};

EstimatedMoments estimate_moments(const SampleBatch& batch);
// Same estimator from accumulated outcome statistics (dimension = arities).
EstimatedMoments estimate_moments(const keyrate::ProtocolConfig& cfg, const MomentAccumulator& acc);
// Simulates and accumulates without storing samples.
EstimatedMoments simulate_and_estimate(const keyrate::ProtocolConfig& cfg, double T, double xi, std::size_t n,
                                       std::uint64_t seed);
// The estimator applied to exact outcome moments, i.e. the n -> infinity limit.
EstimatedMoments exact_moments(const keyrate::ProtocolConfig& cfg, double T, double xi);

// Plugs the estimate into the key-rate pipeline. Estimates whose symplectic
// eigenvalues fall below one by more than kPhysicalityTolerance are projected.
keyrate::KeyRateReport keyrate_from_estimate(const EstimatedMoments& est, const keyrate::ProtocolConfig& cfg);

// Plug-in Gaussian estimate of I(X:Y) from the samples, with a batch-means
// standard error.
struct MutualInformationEstimate {
    double value = 0.0;
    double std_error = 0.0;
};
MutualInformationEstimate sample_mutual_information(const SampleBatch& batch, int batches = 20);

void write_batch_csv(std::ostream& out, const SampleBatch& batch);
nlohmann::json batch_metadata(const SampleBatch& batch);

} // namespace cvq::sim
