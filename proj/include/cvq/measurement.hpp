#pragma once

#include <vector>

#include "cvq/gaussian_state.hpp"

namespace cvq {

enum class MeasurementKind { homodyne_q, homodyne_p, heterodyne };

// Number of real outcome components.
int outcome_arity(MeasurementKind kind);
const char* to_string(MeasurementKind kind);

/// Classical Gaussian distribution of measurement outcomes.
///
/// Outcomes are expressed on the shot-noise scale: a homodyne outcome of the
/// vacuum has unit variance. The mean is therefore sqrt(2) times the
/// displacement (d is defined through [Q, P] = i), and the covariance is the
/// corresponding diagonal entry of gamma (homodyne) or gamma + I (heterodyne).
struct ClassicalGaussian {
    Vector mean;
    Matrix cov;
};

/// Outcome of conditioning a Gaussian state on a single-mode measurement.
///
/// The conditional covariance does not depend on the outcome. The conditional
/// displacement is affine in the outcome x:
///     d_rest(x) = offset + gain * x.
/// `conditional_state.d` is that displacement evaluated at x = outcome_mean.
struct ConditionalResult {
    GaussianState conditional_state;
    std::vector<int> remaining_modes;
    Matrix gain;          // (2 * remaining) x arity
    Vector offset;        // 2 * remaining
    Vector outcome_mean;  // arity
    Matrix outcome_cov;   // arity x arity
    MeasurementKind kind = MeasurementKind::heterodyne;

    Vector displacement_at(const Vector& outcome) const;
};

// Requires a valid state with >= 2 modes.
ConditionalResult condition(const GaussianState& s, int mode, MeasurementKind kind);

// Marginal outcome distribution of measuring `mode`; single-mode states allowed.
ClassicalGaussian outcome_marginal(const GaussianState& s, int mode, MeasurementKind kind);

} // namespace cvq
