#include "cvq/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace cvq::linalg {

namespace {

bool is_real(const CMatrix& m) {
    return m.imag().cwiseAbs().maxCoeff() == 0.0;
}

} // namespace

HermitianEigen hermitian_eigen(const CMatrix& m, bool with_vectors) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigen: matrix not square");
    const lapack_int n = static_cast<lapack_int>(m.rows());
    HermitianEigen out;
    out.values.resize(n);
    if (n == 0) return out;
    const char jobz = with_vectors ? 'V' : 'N';
    lapack_int info = 0;
    if (is_real(m)) {
        Matrix a = m.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, out.values.data());
        if (with_vectors) out.vectors = a.cast<std::complex<double>>();
    } else {
        CMatrix a = m;
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                              reinterpret_cast<lapack_complex_double*>(a.data()), n,
                              out.values.data());
        if (with_vectors) out.vectors = std::move(a);
    }
    if (info != 0) {
        throw std::runtime_error("hermitian_eigen: LAPACK failed with info=" + std::to_string(info));
    }
    return out;
}

Vector hermitian_eigenvalues(const CMatrix& m) {
    return hermitian_eigen(m, false).values;
}

double entropy_bits(const Vector& spectrum, double clamp) {
    double h = 0.0;
    for (double p : spectrum) {
        if (p < clamp) continue;
        h -= p * std::log2(p);
    }
    return h;
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return Matrix::Zero(m.cols(), m.rows());
    const double cut = rel_tol * s(0);
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double max_asymmetry(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace cvq::linalg
