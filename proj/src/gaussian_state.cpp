#include "cvq/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"

namespace cvq {

namespace {

void check_dimensions(const GaussianState& s) {
    if (s.n_modes < 1) throw DimensionError("GaussianState: n_modes must be >= 1");
    const Eigen::Index dim = 2 * s.n_modes;
    if (s.d.size() != dim) {
        throw DimensionError("GaussianState: displacement has length " + std::to_string(s.d.size()) +
                             ", expected " + std::to_string(dim));
    }
    if (s.gamma.rows() != dim || s.gamma.cols() != dim) {
        throw DimensionError("GaussianState: covariance is " + std::to_string(s.gamma.rows()) + "x" +
                             std::to_string(s.gamma.cols()) + ", expected " + std::to_string(dim) +
                             "x" + std::to_string(dim));
    }
}

// Pair moduli that should come in equal couples; returns false if they don't.
bool pair_up(std::vector<double> moduli, double scale, std::vector<double>& out) {
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    out.clear();
    const double tol = 1e-7 * std::max(scale, 1.0);
    for (std::size_t i = 0; i + 1 < moduli.size(); i += 2) {
        if (std::abs(moduli[i] - moduli[i + 1]) > tol) return false;
        out.push_back(0.5 * (moduli[i] + moduli[i + 1]));
    }
    return true;
}

std::vector<double> symmetric_route(const Matrix& gamma) {
    const int n = static_cast<int>(gamma.rows() / 2);
    const Matrix sigma = symplectic_form(n).matrix;
    const Matrix root = linalg::sqrt_psd(gamma);
    const Matrix m = root * sigma.transpose() * gamma * sigma * root;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    std::vector<double> moduli;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        moduli.push_back(std::sqrt(std::max(es.eigenvalues()(i), 0.0)));
    }
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < moduli.size(); i += 2) out.push_back(0.5 * (moduli[i] + moduli[i + 1]));
    return out;
}

} // namespace

SymplecticForm symplectic_form(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("symplectic_form: n must be >= 1");
    SymplecticForm f;
    f.n_modes = n_modes;
    f.matrix = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        f.matrix(2 * k, 2 * k + 1) = 1.0;
        f.matrix(2 * k + 1, 2 * k) = -1.0;
    }
    return f;
}

GaussianState GaussianState::vacuum(int n_modes) {
    if (n_modes < 1) throw DimensionError("vacuum: n_modes must be >= 1");
    return {n_modes, Vector::Zero(2 * n_modes), Matrix::Identity(2 * n_modes, 2 * n_modes)};
}

GaussianState GaussianState::thermal(double nu) {
    return {1, Vector::Zero(2), nu * Matrix::Identity(2, 2)};
}

GaussianState GaussianState::from_covariance(Matrix gamma) {
    if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0) {
        throw DimensionError("from_covariance: covariance must be square with even, nonzero size");
    }
    const int n = static_cast<int>(gamma.rows() / 2);
    return {n, Vector::Zero(2 * n), std::move(gamma)};
}

std::vector<double> symplectic_eigenvalues(const Matrix& gamma) {
    if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0) {
        throw DimensionError("symplectic_eigenvalues: covariance must be square with even size");
    }
    const double asym = linalg::max_asymmetry(gamma);
    if (asym > kSymmetryTolerance) {
        throw std::invalid_argument("symplectic_eigenvalues: covariance is not symmetric (max |g - g^T| = " +
                                    std::to_string(asym) + ")");
    }
    const int n = static_cast<int>(gamma.rows() / 2);
    const Matrix sg = symplectic_form(n).matrix * gamma;
    Eigen::EigenSolver<Matrix> es(sg, false);
    const double scale = gamma.cwiseAbs().maxCoeff();
    std::vector<double> moduli;
    bool imaginary_pairs = true;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.real()) > 1e-7 * std::max(scale, 1.0)) imaginary_pairs = false;
        moduli.push_back(std::abs(z.imag()));
    }
    std::vector<double> nu;
    if (imaginary_pairs && pair_up(moduli, scale, nu)) return nu;

    // Direct route failed its pairing check. The symmetric route needs gamma >= 0.
    Eigen::SelfAdjointEigenSolver<Matrix> ev(0.5 * (gamma + gamma.transpose()), Eigen::EigenvaluesOnly);
    if (ev.eigenvalues().minCoeff() >= -kPhysicalityTolerance) return symmetric_route(gamma);
    std::sort(moduli.begin(), moduli.end(), std::greater<>());
    nu.clear();
    for (std::size_t i = 0; i + 1 < moduli.size(); i += 2) nu.push_back(std::min(moduli[i], moduli[i + 1]));
    std::sort(nu.begin(), nu.end(), std::greater<>());
    return nu;
}

std::vector<double> symplectic_eigenvalues(const GaussianState& s) {
    check_dimensions(s);
    return symplectic_eigenvalues(s.gamma);
}

Validation validate_state(const GaussianState& s) {
    check_dimensions(s);
    Validation v;
    v.asymmetry = linalg::max_asymmetry(s.gamma);
    if (v.asymmetry > kSymmetryTolerance) {
        v.ok = false;
        v.min_nu = std::nan("");
        std::ostringstream os;
        os << "covariance not symmetric: max |gamma - gamma^T| = " << v.asymmetry;
        v.message = os.str();
        return v;
    }
    const auto nu = symplectic_eigenvalues(s.gamma);
    v.min_nu = *std::min_element(nu.begin(), nu.end());
    if (v.min_nu < 1.0 - kPhysicalityTolerance) {
        std::ostringstream os;
        os << "Heisenberg bound violated: min symplectic eigenvalue " << v.min_nu << " < 1";
        v.message = os.str();
        v.ok = false;
    } else {
        v.ok = true;
    }
    return v;
}

GaussianState make_tmsv(double V) {
    if (!(V >= 1.0)) throw std::invalid_argument("make_tmsv: V must be >= 1");
    const double c = std::sqrt(V * V - 1.0);
    Matrix g = Matrix::Zero(4, 4);
    g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = V;
    g(0, 2) = g(2, 0) = c;
    g(1, 3) = g(3, 1) = -c;
    return {2, Vector::Zero(4), g};
}

double thermal_entropy(double nu) {
    if (nu < 1.0 - kPhysicalityTolerance) {
        throw PhysicalityError("thermal_entropy: symplectic eigenvalue " + std::to_string(nu) + " < 1");
    }
    if (nu <= 1.0) return 0.0;
    const double u = 0.5 * (nu - 1.0);
    if (nu > 1.0 + 1e-6) {
        return (u + 1.0) * std::log2(u + 1.0) - u * std::log2(u);
    }
    // (1+u)ln(1+u) = u + u^2/2 + O(u^3); the u ln u term is kept exact.
    return (u + 0.5 * u * u - u * std::log(u)) / std::log(2.0);
}

double von_neumann_entropy(const Matrix& gamma) {
    double h = 0.0;
    for (double nu : symplectic_eigenvalues(gamma)) h += thermal_entropy(nu);
    return h;
}

double von_neumann_entropy(const GaussianState& s) {
    check_dimensions(s);
    return von_neumann_entropy(s.gamma);
}

GaussianState reduce(const GaussianState& s, std::span<const int> keep) {
    check_dimensions(s);
    if (keep.empty()) throw std::invalid_argument("reduce: keep set is empty");
    std::vector<int> seen;
    for (int m : keep) {
        if (m < 0 || m >= s.n_modes) {
            throw std::out_of_range("reduce: mode index " + std::to_string(m) + " out of range [0, " +
                                    std::to_string(s.n_modes) + ")");
        }
        if (std::find(seen.begin(), seen.end(), m) != seen.end()) {
            throw std::invalid_argument("reduce: duplicate mode index " + std::to_string(m));
        }
        seen.push_back(m);
    }
    const int k = static_cast<int>(keep.size());
    GaussianState out{k, Vector(2 * k), Matrix(2 * k, 2 * k)};
    for (int i = 0; i < k; ++i) {
        for (int a = 0; a < 2; ++a) {
            out.d(2 * i + a) = s.d(2 * keep[i] + a);
            for (int j = 0; j < k; ++j) {
                for (int b = 0; b < 2; ++b) {
                    out.gamma(2 * i + a, 2 * j + b) = s.gamma(2 * keep[i] + a, 2 * keep[j] + b);
                }
            }
        }
    }
    return out;
}

GaussianState reduce(const GaussianState& s, std::initializer_list<int> keep) {
    return reduce(s, std::span<const int>(keep.begin(), keep.size()));
}

Williamson williamson(const Matrix& gamma) {
    const Eigen::Index dim = gamma.rows();
    if (dim != gamma.cols() || dim % 2 != 0 || dim == 0) {
        throw DimensionError("williamson: covariance must be square with even size");
    }
    const Matrix sym = 0.5 * (gamma + gamma.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw PhysicalityError("williamson: covariance is not positive definite");
    }
    const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().transpose();
    const Matrix inv_root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
    const int n = static_cast<int>(dim / 2);
    const Matrix k = inv_root * symplectic_form(n).matrix * inv_root;  // antisymmetric

    // Orthonormal basis of K-invariant planes: K u = -omega v, K v = omega u.
    Eigen::SelfAdjointEigenSolver<Matrix> kk(k.transpose() * k);
    Matrix o = Matrix::Zero(dim, dim);
    std::vector<double> nu;
    int filled = 0;
    for (Eigen::Index j = 0; j < dim && filled < dim; ++j) {
        Vector u = kk.eigenvectors().col(j);
        for (int c = 0; c < filled; ++c) u -= o.col(c).dot(u) * o.col(c);
        if (u.norm() < 0.5) continue;
        u.normalize();
        Vector v = -(k * u);
        const double omega = v.norm();
        v /= omega;
        o.col(filled) = u;
        o.col(filled + 1) = v;
        filled += 2;
        nu.push_back(1.0 / omega);
    }
    if (filled != dim) throw std::runtime_error("williamson: failed to build symplectic basis");
    Vector scale(dim);
    for (int m = 0; m < n; ++m) scale(2 * m) = scale(2 * m + 1) = 1.0 / std::sqrt(nu[m]);
    Williamson w;
    w.S = root * o * scale.asDiagonal();
    w.nu = std::move(nu);
    return w;
}

GaussianState project_to_physical(const GaussianState& s, bool* projected) {
    check_dimensions(s);
    if (projected) *projected = false;
    const auto nu = symplectic_eigenvalues(s.gamma);
    if (*std::min_element(nu.begin(), nu.end()) >= 1.0 - kPhysicalityTolerance) return s;
    const Williamson w = williamson(s.gamma);
    Vector diag(2 * s.n_modes);
    for (int m = 0; m < s.n_modes; ++m) diag(2 * m) = diag(2 * m + 1) = std::max(w.nu[m], 1.0);
    GaussianState out = s;
    out.gamma = w.S * diag.asDiagonal() * w.S.transpose();
    out.gamma = 0.5 * (out.gamma + out.gamma.transpose()).eval();
    if (projected) *projected = true;
    return out;
}

} // namespace cvq
