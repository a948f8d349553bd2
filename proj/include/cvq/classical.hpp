#pragma once

#include <span>

#include "cvq/gaussian_state.hpp"

namespace cvq::lab {

/// Entropy gap between a discrete distribution on a lattice and the
/// discretized Gaussian with the same mean and variance on that lattice.
struct ClassicalGap {
    double gap = 0.0;               // H(gaussian) - H(p), bits
    double kl = 0.0;                // KL(p || gaussian), bits
    double entropy = 0.0;           // H(p)
    double gaussian_entropy = 0.0;  // H of the discretized Gaussian
    double mean = 0.0;
    double variance = 0.0;
    bool degenerate = false;        // zero variance: gap and kl are 0
    // kl - gap predicted from the variance mismatch of the discretized
    // Gaussian; vanishes as the lattice gets fine against the spread.
    double grid_bias = 0.0;
};

// `points` must lie on a common lattice of spacing `step`; repeated points are
// merged. Probabilities are normalized internally.
ClassicalGap classical_gap(std::span<const double> points, std::span<const double> probs, double step);

double discrete_entropy_bits(std::span<const double> probs);

// Mutual information (bits) between the first `nx` components and the rest of
// a Gaussian vector with covariance `cov`.
double gaussian_mutual_information(const Matrix& cov, int nx);

} // namespace cvq::lab
