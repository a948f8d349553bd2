#pragma once

#include <complex>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "cvq/gaussian_state.hpp"
#include "cvq/state_spec.hpp"

namespace cvq::lab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr int kDefaultCutoff = 40;
inline constexpr double kDefaultTailBudget = 1e-6;

/// Density matrix in a photon-number basis truncated at `cutoff` photons per
/// mode. Two-mode states use the index n0 * (cutoff + 1) + n1.
struct FockDensity {
    int modes = 1;
    int cutoff = 0;
    CMatrix matrix;
    double tail_mass = 0.0;  // weight on the top two Fock levels of any mode

    int levels() const { return cutoff + 1; }
    Eigen::Index dim() const { return matrix.rows(); }
};

// Single-mode ladder operators on `levels` Fock levels.
CMatrix annihilation(int levels);
CMatrix number_operator(int levels);

FockDensity fock_state(int n, int cutoff);
FockDensity coherent_state(cplx alpha, int cutoff);
FockDensity thermal_state(double nbar, int cutoff);
FockDensity squeezed_vacuum(double r, int cutoff);
FockDensity tmsv_state(double V, int cutoff);

FockDensity tensor(const FockDensity& a, const FockDensity& b);
FockDensity partial_trace(const FockDensity& rho, int keep_mode);
FockDensity mix(std::span<const double> weights, std::span<const FockDensity> parts);

// Photon loss with transmittance T on one mode, via its Kraus operators.
FockDensity apply_loss(const FockDensity& rho, double T, int mode);
// Scales number-basis coherences of one mode by (1 - p).
FockDensity apply_dephasing(const FockDensity& rho, double p, int mode);
// a rho a^dagger on one mode, renormalized. Throws std::domain_error when the
// result vanishes.
FockDensity photon_subtract(const FockDensity& rho, int mode);

double tail_mass(const FockDensity& rho);
double trace(const FockDensity& rho);
double purity(const FockDensity& rho);

struct RealizeOptions {
    double tail_budget = kDefaultTailBudget;
};

// Builds the state in the Fock basis. Throws TruncationError (with a suggested
// cutoff) when the tail mass of any intermediate state exceeds the budget.
FockDensity realize(const StateSpec& spec, int cutoff, const RealizeOptions& opts = {});
FockDensity realize(std::string_view spec, int cutoff, const RealizeOptions& opts = {});

// Checks Hermiticity (1e-12), positivity (-1e-10), trace (1e-8) and the tail
// budget. Throws std::domain_error / TruncationError.
void check_admissible(const FockDensity& rho, double tail_budget = kDefaultTailBudget);

// First and second moments (d, gamma) of the quadratures Q = (a + a^+)/sqrt2,
// P = (a - a^+)/(i sqrt2), evaluated from exact ladder matrix elements.
GaussianState moments(const FockDensity& rho);

double entropy_fock(const FockDensity& rho);

} // namespace cvq::lab
