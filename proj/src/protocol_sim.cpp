#include "cvq/protocol_sim.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "cvq/classical.hpp"
#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"
#include "cvq/parallel.hpp"
#include "cvq/rng.hpp"
#include "cvq/serialize.hpp"

namespace cvq::sim {

namespace {

// Quadrature indices (within one mode) observed by a measurement.
std::vector<int> observed(MeasurementKind kind) {
    switch (kind) {
    case MeasurementKind::homodyne_q: return {0};
    case MeasurementKind::homodyne_p: return {1};
    case MeasurementKind::heterodyne: return {0, 1};
    }
    return {};
}

// Lower factor L with L L^T = cov.
Matrix sampling_factor(const Matrix& cov) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    return linalg::sqrt_psd(cov);
}

void fill_chunk(const JointOutcome& jo, const Matrix& L, std::uint64_t seed, std::size_t chunk, std::size_t rows,
                Matrix& out) {
    rng::Stream stream(seed, chunk);
    const auto k = jo.mean.size();
    Vector z(k);
    for (std::size_t i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) z(j) = stream.normal();
        out.row(static_cast<Eigen::Index>(i)) = (jo.mean + L * z).transpose();
    }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

EstimatedMoments from_outcome_stats(const keyrate::ProtocolConfig& cfg, const Vector& mean, const Matrix& cov,
                                    std::size_t n) {
    const MeasurementKind ka = keyrate::alice_measurement(cfg);
    const MeasurementKind kb = keyrate::bob_measurement(cfg);
    const std::vector<int> obs_a = observed(ka), obs_b = observed(kb);
    const int na = static_cast<int>(obs_a.size());

    EstimatedMoments est;
    est.cfg = cfg;
    est.n = n;
    est.d_hat = Vector::Zero(4);
    est.gamma_hat = Matrix::Zero(4, 4);
    if (cov.cwiseAbs().maxCoeff() == 0.0) {
        est.degenerate = true;
        for (int i = 0; i < na; ++i) est.d_hat(obs_a[i]) = mean(i) / std::numbers::sqrt2;
        for (std::size_t j = 0; j < obs_b.size(); ++j) est.d_hat(2 + obs_b[j]) = mean(na + static_cast<int>(j)) / std::numbers::sqrt2;
        return est;
    }

    // Outcome index of (mode, quadrature), or -1 when unobserved.
    auto slot = [&](int mode, int quad) {
        const std::vector<int>& obs = mode == 0 ? obs_a : obs_b;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (obs[i] == quad) return static_cast<int>(i) + (mode == 0 ? 0 : na);
        }
        return -1;
    };
    auto heterodyne = [&](int mode) { return (mode == 0 ? ka : kb) == MeasurementKind::heterodyne; };

    for (int mode = 0; mode < 2; ++mode) {
        for (int q = 0; q < 2; ++q) {
            const int s = slot(mode, q);
            if (s >= 0) est.d_hat(2 * mode + q) = mean(s) / std::numbers::sqrt2;
        }
    }
    for (int r = 0; r < 4; ++r) {
        for (int c = r; c < 4; ++c) {
            const int mr = r / 2, qr = r % 2, mc = c / 2, qc = c % 2;
            const int sr = slot(mr, qr), sc = slot(mc, qc);
            double v;
            if (sr >= 0 && sc >= 0) {
                v = cov(sr, sc);
                if (r == c && heterodyne(mr)) v -= 1.0;
            } else if (qr == qc && slot(mr, 0) >= 0 && slot(mc, 0) >= 0) {
                // Unobserved P-P entry mirrored from the Q-Q one.
                const int q0 = slot(mr, 0), q1 = slot(mc, 0);
                v = mr == mc ? cov(q0, q1) - (heterodyne(mr) ? 1.0 : 0.0) : -cov(q0, q1);
                est.mirrored = true;
            } else if (qr == qc && slot(mr, 1) >= 0 && slot(mc, 1) >= 0) {
                const int p0 = slot(mr, 1), p1 = slot(mc, 1);
                v = mr == mc ? cov(p0, p1) - (heterodyne(mr) ? 1.0 : 0.0) : -cov(p0, p1);
                est.mirrored = true;
            } else {
                v = 0.0;
                est.zeroed = true;
            }
            est.gamma_hat(r, c) = est.gamma_hat(c, r) = v;
        }
    }
    return est;
}

} // namespace

JointOutcome joint_outcome(const keyrate::ProtocolConfig& cfg, const GaussianState& ab) {
    if (ab.n_modes != 2) throw DimensionError("joint_outcome: AB state must have two modes");
    JointOutcome jo;
    jo.alice_kind = keyrate::alice_measurement(cfg);
    jo.bob_kind = keyrate::bob_measurement(cfg);
    std::vector<int> idx;
    std::vector<bool> het;
    for (int q : observed(jo.alice_kind)) {
        idx.push_back(q);
        het.push_back(jo.alice_kind == MeasurementKind::heterodyne);
    }
    for (int q : observed(jo.bob_kind)) {
        idx.push_back(2 + q);
        het.push_back(jo.bob_kind == MeasurementKind::heterodyne);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    jo.mean.resize(k);
    jo.cov.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        jo.mean(i) = std::numbers::sqrt2 * ab.d(idx[i]);
        for (Eigen::Index j = 0; j < k; ++j) jo.cov(i, j) = ab.gamma(idx[i], idx[j]);
        if (het[i]) jo.cov(i, i) += 1.0;
    }
    return jo;
}

SampleBatch simulate(const keyrate::ProtocolConfig& cfg, double T, double xi, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    const JointOutcome jo = joint_outcome(cfg, keyrate::post_channel_state(cfg, T, xi));
    const Matrix L = sampling_factor(jo.cov);
    const auto k = jo.mean.size();
    Matrix all(static_cast<Eigen::Index>(n), k);
    parallel_for(chunk_count(n), [&](std::size_t c) {
        const std::size_t start = c * kChunkSize;
        const std::size_t rows = std::min(kChunkSize, n - start);
        Matrix block(static_cast<Eigen::Index>(rows), k);
        fill_chunk(jo, L, seed, c, rows, block);
        all.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(rows)) = block;
    });
    SampleBatch b;
    b.cfg = cfg;
    b.T = T;
    b.xi = xi;
    b.seed = seed;
    b.generator = rng::kGeneratorId;
    b.alice_kind = jo.alice_kind;
    b.bob_kind = jo.bob_kind;
    b.alice = all.leftCols(jo.alice_arity());
    b.bob = all.rightCols(jo.bob_arity());
    return b;
}

MomentAccumulator::MomentAccumulator(int dim) : mean_(Vector::Zero(dim)), m2_(Matrix::Zero(dim, dim)) {}

void MomentAccumulator::add(const Vector& z) {
    ++n_;
    const Vector delta = z - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (z - mean_).transpose();
}

void MomentAccumulator::add_rows(const Matrix& rows) {
    if (rows.rows() == 0) return;
    MomentAccumulator block(static_cast<int>(mean_.size()));
    block.n_ = static_cast<std::size_t>(rows.rows());
    block.mean_ = rows.colwise().mean().transpose();
    const Matrix centered = rows.rowwise() - block.mean_.transpose();
    block.m2_ = centered.transpose() * centered;
    merge(block);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
    const double total = na + nb;
    const Vector delta = other.mean_ - mean_;
    mean_ += delta * (nb / total);
    m2_ += other.m2_ + delta * delta.transpose() * (na * nb / total);
    n_ += other.n_;
}

Matrix MomentAccumulator::covariance() const {
    if (n_ < 2) throw std::invalid_argument("covariance needs at least two samples");
    Matrix c = m2_ / static_cast<double>(n_ - 1);
    return 0.5 * (c + c.transpose());
}

EstimatedMoments estimate_moments(const keyrate::ProtocolConfig& cfg, const MomentAccumulator& acc) {
    if (acc.count() < 2) throw std::invalid_argument("estimate_moments: need n >= 2 samples");
    return from_outcome_stats(cfg, acc.mean(), acc.covariance(), acc.count());
}

EstimatedMoments estimate_moments(const SampleBatch& batch) {
    if (batch.n() < 2) throw std::invalid_argument("estimate_moments: need n >= 2 samples");
    Matrix all(batch.alice.rows(), batch.alice.cols() + batch.bob.cols());
    all << batch.alice, batch.bob;
    MomentAccumulator acc(static_cast<int>(all.cols()));
    acc.add_rows(all);
    EstimatedMoments est = estimate_moments(batch.cfg, acc);
    est.T = batch.T;
    est.xi = batch.xi;
    return est;
}

EstimatedMoments simulate_and_estimate(const keyrate::ProtocolConfig& cfg, double T, double xi, std::size_t n,
                                       std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("simulate_and_estimate: need n >= 2 samples");
    const JointOutcome jo = joint_outcome(cfg, keyrate::post_channel_state(cfg, T, xi));
    const Matrix L = sampling_factor(jo.cov);
    const int k = static_cast<int>(jo.mean.size());
    const std::size_t chunks = chunk_count(n);
    std::vector<MomentAccumulator> parts(chunks, MomentAccumulator(k));
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t rows = std::min(kChunkSize, n - c * kChunkSize);
        Matrix block(static_cast<Eigen::Index>(rows), k);
        fill_chunk(jo, L, seed, c, rows, block);
        parts[c].add_rows(block);
    });
    MomentAccumulator acc(k);
    for (const auto& p : parts) acc.merge(p);
    EstimatedMoments est = estimate_moments(cfg, acc);
    est.T = T;
    est.xi = xi;
    return est;
}

EstimatedMoments exact_moments(const keyrate::ProtocolConfig& cfg, double T, double xi) {
    const JointOutcome jo = joint_outcome(cfg, keyrate::post_channel_state(cfg, T, xi));
    EstimatedMoments est = from_outcome_stats(cfg, jo.mean, jo.cov, 0);
    est.T = T;
    est.xi = xi;
    return est;
}

keyrate::KeyRateReport keyrate_from_estimate(const EstimatedMoments& est, const keyrate::ProtocolConfig& cfg) {
    if (est.degenerate) throw PhysicalityError("keyrate_from_estimate: degenerate (zero-variance) estimate");
    GaussianState ab{2, est.d_hat, 0.5 * (est.gamma_hat + est.gamma_hat.transpose())};
    bool projected = false;
    try {
        ab = project_to_physical(ab, &projected);
    } catch (const PhysicalityError&) {
        throw PhysicalityError("keyrate_from_estimate: estimated covariance is not positive definite after " +
                               std::to_string(est.n) + " samples; projection cannot repair it");
    }
    keyrate::KeyRateReport r = keyrate::report_from_state(cfg, ab);
    r.T = est.T;
    r.xi = est.xi;
    r.sift_factor = keyrate::sift_factor(cfg);
    if (r.sift_factor != 1.0) {
        r.I_xy *= r.sift_factor;
        r.chi_xe *= r.sift_factor;
        r.chi_xb *= r.sift_factor;
        r.K_coll = cfg.beta * r.I_xy - r.chi_xe;
        r.K_coll_prime = r.chi_xb - r.chi_xe;
    }
    r.estimated = true;
    r.n_samples = est.n;
    r.projected = projected;
    r.mirrored_entries = est.mirrored;
    r.zeroed_entries = est.zeroed;
    return r;
}

MutualInformationEstimate sample_mutual_information(const SampleBatch& batch, int batches) {
    const std::size_t n = batch.n();
    if (batches < 2 || n < static_cast<std::size_t>(4 * batches)) {
        throw std::invalid_argument("sample_mutual_information: too few samples for the batch count");
    }
    Matrix all(batch.alice.rows(), batch.alice.cols() + batch.bob.cols());
    all << batch.alice, batch.bob;
    const int ka = static_cast<int>(batch.alice.cols());
    auto mi_of = [&](Eigen::Index start, Eigen::Index rows) {
        MomentAccumulator acc(static_cast<int>(all.cols()));
        acc.add_rows(all.middleRows(start, rows));
        return lab::gaussian_mutual_information(acc.covariance(), ka);
    };
    MutualInformationEstimate out;
    out.value = mi_of(0, all.rows());
    const Eigen::Index size = all.rows() / batches;
    double sum = 0.0, sum2 = 0.0;
    for (int b = 0; b < batches; ++b) {
        const double v = mi_of(b * size, size);
        sum += v;
        sum2 += v * v;
    }
    const double m = sum / batches;
    const double var = std::max(0.0, (sum2 - batches * m * m) / (batches - 1));
    out.std_error = std::sqrt(var / batches);
    return out;
}

namespace {
void column_names(std::ostream& out, const char* who, MeasurementKind kind, bool& first) {
    for (int q : observed(kind)) {
        if (!first) out << ',';
        out << who << (q == 0 ? "_q" : "_p");
        first = false;
    }
}
} // namespace

void write_batch_csv(std::ostream& out, const SampleBatch& batch) {
    bool first = true;
    column_names(out, "alice", batch.alice_kind, first);
    column_names(out, "bob", batch.bob_kind, first);
    out << '\n';
    for (Eigen::Index i = 0; i < batch.alice.rows(); ++i) {
        for (Eigen::Index j = 0; j < batch.alice.cols(); ++j) out << (j ? "," : "") << io::format_double(batch.alice(i, j));
        for (Eigen::Index j = 0; j < batch.bob.cols(); ++j) out << ',' << io::format_double(batch.bob(i, j));
        out << '\n';
    }
}

nlohmann::json batch_metadata(const SampleBatch& batch) {
    return {
        {"protocol", keyrate::to_string(batch.cfg.prep)},
        {"bob", keyrate::to_string(batch.cfg.bob)},
        {"recon", keyrate::to_string(batch.cfg.recon)},
        {"V", batch.cfg.V},
        {"T", batch.T},
        {"xi", batch.xi},
        {"n", batch.n()},
        {"seed", batch.seed},
        {"generator", batch.generator},
        {"chunk_size", kChunkSize},
        {"alice_measurement", to_string(batch.alice_kind)},
        {"bob_measurement", to_string(batch.bob_kind)},
    };
}

} // namespace cvq::sim
