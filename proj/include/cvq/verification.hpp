#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvq/fock.hpp"
#include "cvq/rng.hpp"

namespace cvq::lab {

/// Gaussian-extremality gap of a Fock density: entropy of the Gaussian state
/// with the same moments minus the state's own entropy.
struct ExtremalityGap {
    double delta_H = 0.0;
    double gaussian_entropy = 0.0;
    double entropy = 0.0;
    // Relative entropy to the explicitly built Gaussian reference (single-mode
    // only). Present whenever the reference was built, even if it failed the
    // self-check below.
    std::optional<double> relative_entropy;
    bool reference_failed = false;
    std::string reference_error;
    double tail_mass = 0.0;
};

struct GapOptions {
    bool build_reference = true;
};

ExtremalityGap extremality_gap(const FockDensity& rho, const GapOptions& opts = {});

/// Gaussian density with the given single-mode moments, built as a displaced,
/// rotated, squeezed thermal state and restricted to `cutoff` photons. The
/// exponentials are evaluated in a padded space. Also returns the restricted
/// matrix logarithm.
struct GaussianReference {
    CMatrix density;
    CMatrix log_density;  // natural log
    double trace_defect = 0.0;
    double moment_defect = 0.0;
};
GaussianReference gaussian_reference(const GaussianState& moments, int cutoff);

// Relative entropy in bits, tr rho (log rho - log sigma) / ln 2, with the
// matrix log of sigma supplied.
double relative_entropy_bits(const FockDensity& rho, const CMatrix& log_sigma);

struct Contraction {
    double before = 0.0;
    double after = 0.0;
    // max |gamma_kraus - gamma_covariance| between the Kraus channel on the
    // density and the Gaussian channel on its moments.
    double moment_deviation = 0.0;
};

// Single-mode rho through pure loss with transmittance T.
Contraction contraction_check(const FockDensity& rho, double T);

struct RandomSpecOptions {
    int modes = 1;
    int max_depth = 3;
};

// Random non-Gaussian state expression (mixtures, losses, dephasings and
// photon subtractions over the atoms). Not every result fits every cutoff.
std::string random_state_spec(rng::Stream& rng, const RandomSpecOptions& opts = {});

struct SuiteOptions {
    std::size_t cases = 200;
    std::uint64_t seed = 1;
    int single_mode_cutoff = 40;
    int two_mode_cutoff = 24;
    double two_mode_fraction = 0.5;
    double tail_budget = kDefaultTailBudget;
    int max_attempts = 200;  // redraws per case when a spec does not fit
};

struct SuiteCase {
    std::size_t index = 0;
    std::string spec;
    int modes = 1;
    int cutoff = 0;
    ExtremalityGap gap;
};

// Random extremality cases, one RNG stream per case, evaluated in parallel.
// Specs that exceed the tail budget or vanish under photon subtraction are
// redrawn from the same stream, so results depend only on the options.
std::vector<SuiteCase> extremality_suite(const SuiteOptions& opts);

} // namespace cvq::lab
