#pragma once

#include <Eigen/Dense>

namespace cvq::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

struct HermitianEigen {
    Vector values;     // ascending
    CMatrix vectors;   // columns; empty when values-only was requested
};

// Spectrum of a Hermitian matrix (lower triangle is referenced). Dispatches to
// the real symmetric LAPACK driver when the imaginary part vanishes.
HermitianEigen hermitian_eigen(const CMatrix& m, bool with_vectors);
Vector hermitian_eigenvalues(const CMatrix& m);

// Shannon/von Neumann entropy in bits of a spectrum; entries below `clamp`
// contribute zero.
double entropy_bits(const Vector& spectrum, double clamp = 1e-14);

// Moore-Penrose pseudo-inverse; singular values below rel_tol * largest are
// treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_tol = 1e-12);

double max_asymmetry(const Matrix& m);

// Principal square root of a symmetric positive semidefinite matrix.
Matrix sqrt_psd(const Matrix& m);

} // namespace cvq::linalg
