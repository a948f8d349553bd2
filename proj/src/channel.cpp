#include "cvq/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cvq/errors.hpp"

namespace cvq {

bool GaussianChannel::is_completely_positive(const Mat2& X, const Mat2& Y, double tol) {
    if (std::abs(Y(0, 1) - Y(1, 0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Mat2> es(Y);
    const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol * scale) return false;
    const double gap = Y.determinant() - std::pow(X.determinant() - 1.0, 2);
    return gap >= -tol * scale * scale;
}

GaussianChannel GaussianChannel::general(const Mat2& X, const Mat2& Y) {
    if (!X.allFinite() || !Y.allFinite()) throw std::invalid_argument("GaussianChannel: non-finite entries");
    if (!is_completely_positive(X, Y)) {
        throw PhysicalityError("GaussianChannel: (X, Y) violates complete positivity "
                               "(need Y >= 0 and det Y >= (det X - 1)^2)");
    }
    return GaussianChannel(X, 0.5 * (Y + Y.transpose()), std::nullopt);
}

GaussianChannel GaussianChannel::loss_noise(double T, double eps) {
    if (!(T > 0.0 && T <= 1.0)) {
        throw std::invalid_argument("loss_noise: transmittance must lie in (0, 1], got " + std::to_string(T));
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("loss_noise: excess noise must be >= 0, got " + std::to_string(eps));
    }
    const Mat2 x = std::sqrt(T) * Mat2::Identity();
    const Mat2 y = (1.0 - T + T * eps) * Mat2::Identity();
    return GaussianChannel(x, y, std::make_pair(T, eps));
}

GaussianChannel GaussianChannel::identity() {
    return loss_noise(1.0, 0.0);
}

GaussianState apply(const GaussianChannel& c, const GaussianState& s, int mode) {
    if (mode < 0 || mode >= s.n_modes) {
        throw std::out_of_range("apply: mode " + std::to_string(mode) + " out of range");
    }
    if (s.d.size() != 2 * s.n_modes || s.gamma.rows() != 2 * s.n_modes || s.gamma.cols() != 2 * s.n_modes) {
        throw DimensionError("apply: state dimensions inconsistent with n_modes");
    }
    const int dim = 2 * s.n_modes;
    Matrix full = Matrix::Identity(dim, dim);
    full.block(2 * mode, 2 * mode, 2, 2) = c.X();
    GaussianState out = s;
    out.d = full * s.d;
    out.gamma = full * s.gamma * full.transpose();
    out.gamma.block(2 * mode, 2 * mode, 2, 2) += c.Y();
    out.gamma = 0.5 * (out.gamma + out.gamma.transpose()).eval();
    return out;
}

GaussianChannel compose(const GaussianChannel& c2, const GaussianChannel& c1) {
    const GaussianChannel::Mat2 x = c2.X() * c1.X();
    const GaussianChannel::Mat2 y = c2.X() * c1.Y() * c2.X().transpose() + c2.Y();
    return GaussianChannel::general(x, y);
}

} // namespace cvq
