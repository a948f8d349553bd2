#include "cvq/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cvq::lab {

double discrete_entropy_bits(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

ClassicalGap classical_gap(std::span<const double> points, std::span<const double> probs, double step) {
    if (points.size() != probs.size() || points.empty()) {
        throw std::invalid_argument("classical_gap: points and probabilities must be non-empty and equal in length");
    }
    if (!(step > 0.0)) throw std::invalid_argument("classical_gap: step must be positive");
    const double origin = points[0];
    std::map<long long, double> mass;
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (probs[i] < 0.0) throw std::invalid_argument("classical_gap: negative probability");
        const double k = (points[i] - origin) / step;
        const double kr = std::round(k);
        if (std::abs(k - kr) > 1e-9) throw std::invalid_argument("classical_gap: point off the lattice");
        mass[static_cast<long long>(kr)] += probs[i];
        total += probs[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("classical_gap: total probability is zero");

    ClassicalGap out;
    double mean = 0.0, second = 0.0;
    for (auto& [k, p] : mass) {
        p /= total;
        const double x = origin + static_cast<double>(k) * step;
        mean += p * x;
        second += p * x * x;
    }
    std::vector<double> p_values;
    for (const auto& [k, p] : mass) p_values.push_back(p);
    out.mean = mean;
    out.variance = std::max(second - mean * mean, 0.0);
    out.entropy = discrete_entropy_bits(p_values);
    if (out.variance < 1e-14 * std::max(1.0, mean * mean)) {
        out.degenerate = true;
        out.gaussian_entropy = out.entropy;
        return out;
    }
    const double sigma = std::sqrt(out.variance);
    const auto lo = std::min(mass.begin()->first, static_cast<long long>(std::floor((mean - 12.0 * sigma - origin) / step)));
    const auto hi = std::max(mass.rbegin()->first, static_cast<long long>(std::ceil((mean + 12.0 * sigma - origin) / step)));
    std::vector<double> gauss;
    gauss.reserve(static_cast<std::size_t>(hi - lo + 1));
    double norm = 0.0;
    for (long long k = lo; k <= hi; ++k) {
        const double z = (origin + static_cast<double>(k) * step - mean) / sigma;
        gauss.push_back(std::exp(-0.5 * z * z));
        norm += gauss.back();
    }
    for (double& g : gauss) g /= norm;
    double gauss_var = 0.0;
    for (long long k = lo; k <= hi; ++k) {
        const double x = origin + static_cast<double>(k) * step - mean;
        gauss_var += gauss[static_cast<std::size_t>(k - lo)] * x * x;
    }
    out.grid_bias = (out.variance - gauss_var) / (2.0 * out.variance * std::numbers::ln2);
    out.gaussian_entropy = discrete_entropy_bits(gauss);
    out.gap = out.gaussian_entropy - out.entropy;
    double kl = 0.0;
    for (const auto& [k, p] : mass) {
        if (p > 0.0) kl += p * std::log2(p / gauss[static_cast<std::size_t>(k - lo)]);
    }
    out.kl = kl;
    return out;
}

double gaussian_mutual_information(const Matrix& cov, int nx) {
    const auto n = cov.rows();
    if (cov.cols() != n || nx <= 0 || nx >= n) throw std::invalid_argument("gaussian_mutual_information: bad shape");
    const double det_x = cov.topLeftCorner(nx, nx).determinant();
    const double det_y = cov.bottomRightCorner(n - nx, n - nx).determinant();
    return 0.5 * std::log2(det_x * det_y / cov.determinant());
}

} // namespace cvq::lab
