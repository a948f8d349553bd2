#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kPhysicalityTolerance = 1e-9;

struct SymplecticForm {
    int n_modes = 0;
    Matrix matrix;
};

// sigma_n: block-diagonal with n copies of [[0, 1], [-1, 0]].
SymplecticForm symplectic_form(int n_modes);

/// n-mode Gaussian state in shot-noise units: vacuum covariance is the
/// identity. Quadratures are ordered (Q1, P1, Q2, P2, ...).
struct GaussianState {
    int n_modes = 0;
    Vector d;      // displacement, length 2n
    Matrix gamma;  // covariance, 2n x 2n

    static GaussianState vacuum(int n_modes);
    static GaussianState thermal(double nu);
    static GaussianState from_covariance(Matrix gamma);
};

struct Validation {
    bool ok = false;
    double min_nu = 0.0;
    double asymmetry = 0.0;
    std::string message;
};

// Throws DimensionError when shapes do not match n_modes; physicality failures
// are reported in the verdict.
Validation validate_state(const GaussianState& s);

GaussianState make_tmsv(double V);

// Symplectic eigenvalues in descending order. Rejects non-symmetric gamma.
std::vector<double> symplectic_eigenvalues(const GaussianState& s);
std::vector<double> symplectic_eigenvalues(const Matrix& gamma);

// g(nu) in bits, the entropy of a thermal mode with symplectic eigenvalue nu.
double thermal_entropy(double nu);

double von_neumann_entropy(const GaussianState& s);
double von_neumann_entropy(const Matrix& gamma);

GaussianState reduce(const GaussianState& s, std::span<const int> keep);
GaussianState reduce(const GaussianState& s, std::initializer_list<int> keep);

struct Williamson {
    Matrix S;                 // symplectic, gamma = S diag(nu_1, nu_1, ...) S^T
    std::vector<double> nu;   // per mode, in the order of S's column pairs
};

// Requires gamma symmetric positive definite.
Williamson williamson(const Matrix& gamma);

// Raises every symplectic eigenvalue below one to exactly one. Returns the
// input unchanged when it already satisfies the Heisenberg bound within
// kPhysicalityTolerance. Throws PhysicalityError if gamma is not positive
// definite.
GaussianState project_to_physical(const GaussianState& s, bool* projected = nullptr);

} // namespace cvq
