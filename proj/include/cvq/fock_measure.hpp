#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvq/fock.hpp"
#include "cvq/keyrate.hpp"
#include "cvq/measurement.hpp"

namespace cvq::lab {

inline constexpr double kMaxCompletenessDefect = 1e-4;

/// Outcome grid for a discretized single-mode measurement.
///
/// Heterodyne outcomes are coherent amplitudes alpha = x + i y; the grid is the
/// square lattice center + delta * (j, k) for |j|, |k| <= half_points, and each
/// cell carries the POVM element |alpha><alpha| delta^2 / pi. Homodyne outcomes
/// are quadrature eigenvalues q (Q = (a + a^+)/sqrt2) on center + delta * j,
/// with POVM element |q><q| delta.
struct PhaseGrid {
    MeasurementKind kind = MeasurementKind::heterodyne;
    double center_re = 0.0;  // heterodyne: Re alpha; homodyne: q
    double center_im = 0.0;  // heterodyne only
    double delta = 0.25;
    int half_points = 20;

    int points_per_axis() const { return 2 * half_points + 1; }
    std::size_t size() const;
    double cell() const;  // POVM weight factor per grid point
    // Outcome of grid index i: (Re alpha, Im alpha) or (q).
    Vector outcome(std::size_t i) const;
};

// Grid centered at the outcome mean of `mode`, extending six standard
// deviations of the outcome marginal, with delta = extent / 24.
PhaseGrid default_grid(const FockDensity& rho, int mode, MeasurementKind kind);
PhaseGrid refine(const PhaseGrid& g);  // halves delta over the same extent

// Photon-number amplitudes <n|probe> of the POVM vector at an outcome.
CVector probe_amplitudes(MeasurementKind kind, const Vector& outcome, int levels);

/// One grid outcome of a measurement on one mode of a two-mode density.
/// `factor` is a d x r matrix with conditional (unnormalized, cell-weighted)
/// density factor * factor^+ on the remaining mode.
struct OutcomeView {
    std::size_t index;
    double weight;  // probability of the cell
    const CMatrix& factor;
};

// Streams all grid outcomes in index order. Memory use is bounded by chunking.
void for_each_outcome(const FockDensity& rho, int mode, const PhaseGrid& grid,
                      const std::function<void(const OutcomeView&)>& visit);

struct FockConditioning {
    PhaseGrid grid;
    std::vector<double> weights;       // p(x) * cell, sums to ~1
    std::vector<double> entropies;     // H(rest | x) in bits
    std::vector<CMatrix> states;       // normalized conditionals, when requested
    double completeness_defect = 0.0;  // |sum of weights - 1|
    double tail_mass = 0.0;
};

struct ConditioningOptions {
    bool keep_states = false;
    // GridError above this defect; a negative value disables the check.
    double max_defect = kMaxCompletenessDefect;
};

FockConditioning condition_fock(const FockDensity& rho, int mode, const PhaseGrid& grid,
                                const ConditioningOptions& opts = {});

// Heterodyne on `mode` with the default grid.
FockConditioning heterodyne_condition_fock(const FockDensity& rho, int mode,
                                           const std::optional<PhaseGrid>& grid = std::nullopt,
                                           const ConditioningOptions& opts = {});

// Normalized conditional density of the remaining mode at an arbitrary outcome.
FockDensity conditional_at(const FockDensity& rho, int mode, MeasurementKind kind, const Vector& outcome);

// H(AB) - sum_x p(x) H(rest | x): Holevo information of the measurement
// outcome with respect to the purifying environment.
struct HolevoOracle {
    double chi = 0.0;
    double joint_entropy = 0.0;
    double mean_conditional_entropy = 0.0;
    double completeness_defect = 0.0;
};
HolevoOracle holevo_oracle(const FockDensity& rho, int mode, MeasurementKind kind,
                           const std::optional<PhaseGrid>& grid = std::nullopt);

/// H(rest|X) against the post-measurement entropy minus H(X), on the discretized register.
struct Decomposition {
    double conditional_entropy = 0.0;      // sum_x p(x) H(rest|x)
    double post_measurement_entropy = 0.0; // entropy of sum_x |x><x| (x) p(x) rho_x
    double register_entropy = 0.0;         // H(X) of the discrete outcomes
    double residual = 0.0;
    double completeness_defect = 0.0;
};
Decomposition decomposition_check(const FockDensity& rho, int mode, MeasurementKind kind,
                                  const std::optional<PhaseGrid>& grid = std::nullopt);

/// Mutual information between Alice's outcome on mode 0 and Bob's on mode 1,
/// from the discretized joint distribution, and its Gaussian counterpart
/// computed from the moments of that same distribution.
struct MutualInformationOracle {
    double I = 0.0;
    double I_gaussian = 0.0;
    double completeness_defect = 0.0;
};
MutualInformationOracle mutual_information_oracle(const FockDensity& rho, MeasurementKind alice,
                                                  MeasurementKind bob,
                                                  const std::optional<PhaseGrid>& alice_grid = std::nullopt,
                                                  const std::optional<PhaseGrid>& bob_grid = std::nullopt);

/// One member of a Holevo-gap family.
struct HolevoGapCase {
    std::string spec;
    int cutoff = 0;
    double tail_mass = 0.0;
    double chi_oracle = 0.0;    // from the Fock state
    double chi_gaussian = 0.0;  // Gaussian state with the same moments
    double delta = 0.0;         // chi_gaussian - chi_oracle
    double completeness_defect = 0.0;
    double moment_mismatch = 0.0;
};

struct MomentTarget {
    double T = 1.0;
    double xi = 0.0;
};

// For DR the reference measurement is Alice's on mode 0, for RR Bob's on
// mode 1. With a target, members whose covariance differs from the matching
// post_channel_state by more than 1e-6 are rejected (std::invalid_argument).
std::vector<HolevoGapCase> holevo_gap_check(const std::vector<std::string>& family,
                                            const keyrate::ProtocolConfig& cfg, int cutoff,
                                            const std::optional<MomentTarget>& target = std::nullopt);
HolevoGapCase holevo_gap_case(const FockDensity& rho, const keyrate::ProtocolConfig& cfg);

} // namespace cvq::lab
