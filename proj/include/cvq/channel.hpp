#pragma once

#include <optional>

#include <Eigen/Dense>

#include "cvq/gaussian_state.hpp"

namespace cvq {

/// Single-mode Gaussian trace-preserving channel: gamma -> X gamma X^T + Y,
/// d -> X d.
class GaussianChannel {
public:
    using Mat2 = Eigen::Matrix2d;

    // Throws PhysicalityError unless complete positivity holds.
    static GaussianChannel general(const Mat2& X, const Mat2& Y);
    // Loss with transmittance T and excess noise eps referred to the channel input.
    static GaussianChannel loss_noise(double T, double eps);
    static GaussianChannel identity();

    static bool is_completely_positive(const Mat2& X, const Mat2& Y, double tol = 1e-12);

    const Mat2& X() const { return x_; }
    const Mat2& Y() const { return y_; }

    // (T, eps) when built by loss_noise; empty for general and composed channels.
    std::optional<std::pair<double, double>> loss_parameters() const { return loss_; }

private:
    GaussianChannel(Mat2 x, Mat2 y, std::optional<std::pair<double, double>> loss)
        : x_(std::move(x)), y_(std::move(y)), loss_(loss) {}

    Mat2 x_;
    Mat2 y_;
    std::optional<std::pair<double, double>> loss_;
};

GaussianState apply(const GaussianChannel& c, const GaussianState& s, int mode);

// Channel equivalent to applying c1 first, then c2.
GaussianChannel compose(const GaussianChannel& c2, const GaussianChannel& c1);

} // namespace cvq
