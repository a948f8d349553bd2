#include "cvq/fock_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvq/classical.hpp"
#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"

namespace cvq::lab {

namespace {

constexpr double kRankCut = 1e-14;
constexpr std::size_t kChunkBytes = std::size_t{64} << 20;

struct SpectralFactor {
    Vector values;  // all eigenvalues, ascending
    CMatrix W;      // columns sqrt(p_k) |psi_k>, kept for p_k > kRankCut
};

SpectralFactor spectral_factor(const FockDensity& rho) {
    linalg::HermitianEigen eig = linalg::hermitian_eigen(rho.matrix, true);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (eig.values(k) > kRankCut) keep.push_back(k);
    }
    SpectralFactor f;
    f.W.resize(rho.matrix.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        f.W.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(keep[j]) * std::sqrt(eig.values(keep[j]));
    }
    f.values = std::move(eig.values);
    return f;
}

void require_two_mode(const FockDensity& rho, int mode) {
    if (rho.modes != 2) throw std::invalid_argument("conditioning needs a two-mode density");
    if (mode != 0 && mode != 1) throw std::out_of_range("measured mode must be 0 or 1");
}

// Quadrature block (gamma) and mean of one mode of rho.
GaussianState mode_moments(const FockDensity& rho, int mode) {
    const GaussianState m = moments(rho);
    return reduce(m, {mode});
}

// Entropy (bits) of factor * factor^+ / weight using the smaller Gram matrix.
double conditional_entropy(const CMatrix& phi, double norm2, Vector* spectrum = nullptr) {
    if (norm2 <= 0.0) {
        if (spectrum) spectrum->resize(0);
        return 0.0;
    }
    const CMatrix gram = phi.rows() <= phi.cols() ? CMatrix(phi * phi.adjoint()) : CMatrix(phi.adjoint() * phi);
    Vector ev = linalg::hermitian_eigenvalues(gram) / norm2;
    const double h = linalg::entropy_bits(ev);
    if (spectrum) *spectrum = std::move(ev);
    return h;
}

double entropy_of_spectrum(const Vector& values) {
    return linalg::entropy_bits(values);
}

} // namespace

std::size_t PhaseGrid::size() const {
    const auto n = static_cast<std::size_t>(points_per_axis());
    return kind == MeasurementKind::heterodyne ? n * n : n;
}

double PhaseGrid::cell() const {
    return kind == MeasurementKind::heterodyne ? delta * delta / std::numbers::pi : delta;
}

Vector PhaseGrid::outcome(std::size_t i) const {
    const auto n = static_cast<std::size_t>(points_per_axis());
    if (kind != MeasurementKind::heterodyne) {
        Vector v(1);
        v(0) = center_re + delta * (static_cast<double>(i) - half_points);
        return v;
    }
    Vector v(2);
    v(0) = center_re + delta * (static_cast<double>(i / n) - half_points);
    v(1) = center_im + delta * (static_cast<double>(i % n) - half_points);
    return v;
}

PhaseGrid default_grid(const FockDensity& rho, int mode, MeasurementKind kind) {
    const GaussianState m = rho.modes == 1 ? moments(rho) : mode_moments(rho, mode);
    PhaseGrid g;
    g.kind = kind;
    g.half_points = 24;
    double extent = 0.0;
    switch (kind) {
    case MeasurementKind::heterodyne: {
        // Husimi variance of Re/Im alpha is (gamma + I) / 4.
        const Eigen::SelfAdjointEigenSolver<Matrix> es((m.gamma + Matrix::Identity(2, 2)) / 4.0);
        extent = 6.0 * std::sqrt(es.eigenvalues().maxCoeff());
        g.center_re = m.d(0) / std::numbers::sqrt2;
        g.center_im = m.d(1) / std::numbers::sqrt2;
        break;
    }
    case MeasurementKind::homodyne_q:
        extent = 6.0 * std::sqrt(m.gamma(0, 0) / 2.0);
        g.center_re = m.d(0);
        break;
    case MeasurementKind::homodyne_p:
        extent = 6.0 * std::sqrt(m.gamma(1, 1) / 2.0);
        g.center_re = m.d(1);
        break;
    }
    g.delta = extent / 24.0;
    return g;
}

PhaseGrid refine(const PhaseGrid& g) {
    PhaseGrid r = g;
    r.delta = g.delta / 2.0;
    r.half_points = 2 * g.half_points;
    return r;
}

CVector probe_amplitudes(MeasurementKind kind, const Vector& outcome, int levels) {
    CVector amp(levels);
    if (kind == MeasurementKind::heterodyne) {
        const cplx alpha(outcome(0), outcome(1));
        amp(0) = std::exp(-0.5 * std::norm(alpha));
        for (int n = 1; n < levels; ++n) amp(n) = amp(n - 1) * alpha / std::sqrt(static_cast<double>(n));
        return amp;
    }
    // Hermite functions psi_n(x) = <n|x> for the Q eigenbasis.
    const double x = outcome(0);
    std::vector<double> psi(levels);
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (levels > 1) psi[1] = std::numbers::sqrt2 * x * psi[0];
    for (int n = 1; n + 1 < levels; ++n) {
        psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[n - 1];
    }
    const cplx phase_step = kind == MeasurementKind::homodyne_p ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
    cplx phase = 1.0;
    for (int n = 0; n < levels; ++n) {
        amp(n) = phase * psi[n];
        phase *= phase_step;
    }
    return amp;
}

namespace {

void stream_outcomes(const SpectralFactor& f, const FockDensity& rho, int mode, const PhaseGrid& grid,
                     const std::function<void(const OutcomeView&)>& visit) {
    const int d = rho.levels();
    const Eigen::Index r = f.W.cols();
    // MT((rest + d k), measured) = W(index(measured, rest), k).
    CMatrix MT(d * r, d);
    for (Eigen::Index k = 0; k < r; ++k) {
        for (int n0 = 0; n0 < d; ++n0) {
            for (int n1 = 0; n1 < d; ++n1) {
                const cplx w = f.W(n0 * d + n1, k);
                if (mode == 0) {
                    MT(n1 + d * k, n0) = w;
                } else {
                    MT(n0 + d * k, n1) = w;
                }
            }
        }
    }
    const std::size_t total = grid.size();
    const std::size_t per_outcome = static_cast<std::size_t>(d * std::max<Eigen::Index>(r, 1)) * sizeof(cplx);
    const std::size_t chunk = std::max<std::size_t>(1, kChunkBytes / per_outcome);
    const double cell = grid.cell();
    CMatrix phi(d, r);
    for (std::size_t start = 0; start < total; start += chunk) {
        const std::size_t count = std::min(chunk, total - start);
        CMatrix probes(d, static_cast<Eigen::Index>(count));
        for (std::size_t j = 0; j < count; ++j) {
            probes.col(static_cast<Eigen::Index>(j)) =
                probe_amplitudes(grid.kind, grid.outcome(start + j), d).conjugate();
        }
        const CMatrix block = MT * probes;
        for (std::size_t j = 0; j < count; ++j) {
            phi = Eigen::Map<const CMatrix>(block.col(static_cast<Eigen::Index>(j)).data(), d, r);
            const OutcomeView view{start + j, cell * phi.squaredNorm(), phi};
            visit(view);
        }
    }
}

} // namespace

void for_each_outcome(const FockDensity& rho, int mode, const PhaseGrid& grid,
                      const std::function<void(const OutcomeView&)>& visit) {
    require_two_mode(rho, mode);
    stream_outcomes(spectral_factor(rho), rho, mode, grid, visit);
}

FockConditioning condition_fock(const FockDensity& rho, int mode, const PhaseGrid& grid,
                                const ConditioningOptions& opts) {
    require_two_mode(rho, mode);
    FockConditioning out;
    out.grid = grid;
    out.tail_mass = rho.tail_mass;
    out.weights.reserve(grid.size());
    out.entropies.reserve(grid.size());
    const SpectralFactor f = spectral_factor(rho);
    stream_outcomes(f, rho, mode, grid, [&](const OutcomeView& v) {
        const double norm2 = v.factor.squaredNorm();
        out.weights.push_back(v.weight);
        out.entropies.push_back(conditional_entropy(v.factor, norm2));
        if (opts.keep_states) {
            out.states.push_back(norm2 > 0.0 ? CMatrix(v.factor * v.factor.adjoint() / norm2)
                                             : CMatrix::Zero(rho.levels(), rho.levels()));
        }
    });
    double total = 0.0;
    for (double w : out.weights) total += w;
    out.completeness_defect = std::abs(total - 1.0);
    if (opts.max_defect >= 0.0 && out.completeness_defect > opts.max_defect) {
        throw GridError("POVM completeness defect " + std::to_string(out.completeness_defect) +
                            " exceeds " + std::to_string(opts.max_defect) + "; widen or refine the grid",
                        out.completeness_defect);
    }
    return out;
}

FockConditioning heterodyne_condition_fock(const FockDensity& rho, int mode, const std::optional<PhaseGrid>& grid,
                                           const ConditioningOptions& opts) {
    require_two_mode(rho, mode);
    PhaseGrid g = grid ? *grid : default_grid(rho, mode, MeasurementKind::heterodyne);
    if (g.kind != MeasurementKind::heterodyne) throw std::invalid_argument("heterodyne conditioning needs a heterodyne grid");
    return condition_fock(rho, mode, g, opts);
}

FockDensity conditional_at(const FockDensity& rho, int mode, MeasurementKind kind, const Vector& outcome) {
    require_two_mode(rho, mode);
    const int d = rho.levels();
    const CVector amp = probe_amplitudes(kind, outcome, d);
    // Contract the measured index of rho with <probe| on both sides.
    CMatrix out = CMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            const cplx c = std::conj(amp(n)) * amp(m);
            if (std::abs(c) < 1e-300) continue;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const Eigen::Index row = mode == 0 ? n * d + i : i * d + n;
                    const Eigen::Index col = mode == 0 ? m * d + j : j * d + m;
                    out(i, j) += c * rho.matrix(row, col);
                }
            }
        }
    }
    const double tr = out.trace().real();
    if (!(tr > 0.0)) throw std::domain_error("outcome has zero probability");
    FockDensity res{1, rho.cutoff, out / tr, 0.0};
    res.matrix = 0.5 * (res.matrix + res.matrix.adjoint()).eval();
    res.tail_mass = tail_mass(res);
    return res;
}

HolevoOracle holevo_oracle(const FockDensity& rho, int mode, MeasurementKind kind, const std::optional<PhaseGrid>& grid) {
    require_two_mode(rho, mode);
    const PhaseGrid g = grid ? *grid : default_grid(rho, mode, kind);
    const SpectralFactor f = spectral_factor(rho);
    double total = 0.0, weighted = 0.0;
    stream_outcomes(f, rho, mode, g, [&](const OutcomeView& v) {
        total += v.weight;
        weighted += v.weight * conditional_entropy(v.factor, v.factor.squaredNorm());
    });
    HolevoOracle out;
    out.completeness_defect = std::abs(total - 1.0);
    if (out.completeness_defect > kMaxCompletenessDefect) {
        throw GridError("POVM completeness defect " + std::to_string(out.completeness_defect), out.completeness_defect);
    }
    out.joint_entropy = entropy_of_spectrum(f.values);
    out.mean_conditional_entropy = weighted / total;
    out.chi = out.joint_entropy - out.mean_conditional_entropy;
    return out;
}

Decomposition decomposition_check(const FockDensity& rho, int mode, MeasurementKind kind,
                                  const std::optional<PhaseGrid>& grid) {
    require_two_mode(rho, mode);
    const PhaseGrid g = grid ? *grid : default_grid(rho, mode, kind);
    std::vector<double> weights;
    std::vector<double> entropies;
    std::vector<Vector> spectra;
    weights.reserve(g.size());
    entropies.reserve(g.size());
    spectra.reserve(g.size());
    for_each_outcome(rho, mode, g, [&](const OutcomeView& v) {
        Vector spec;
        weights.push_back(v.weight);
        entropies.push_back(conditional_entropy(v.factor, v.factor.squaredNorm(), &spec));
        spectra.push_back(std::move(spec));
    });
    double total = 0.0;
    for (double w : weights) total += w;
    Decomposition out;
    out.completeness_defect = std::abs(total - 1.0);
    if (out.completeness_defect > kMaxCompletenessDefect) {
        throw GridError("POVM completeness defect " + std::to_string(out.completeness_defect), out.completeness_defect);
    }
    double cond = 0.0, reg = 0.0, post = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double p = weights[i] / total;
        if (p <= 0.0) continue;
        cond += p * entropies[i];
        reg -= p * std::log2(p);
        for (Eigen::Index j = 0; j < spectra[i].size(); ++j) {
            const double q = p * spectra[i](j);
            if (q > 0.0) post -= q * std::log2(q);
        }
    }
    out.conditional_entropy = cond;
    out.register_entropy = reg;
    out.post_measurement_entropy = post;
    out.residual = std::abs(cond - (post - reg));
    return out;
}

MutualInformationOracle mutual_information_oracle(const FockDensity& rho, MeasurementKind alice, MeasurementKind bob,
                                                  const std::optional<PhaseGrid>& alice_grid,
                                                  const std::optional<PhaseGrid>& bob_grid) {
    require_two_mode(rho, 0);
    const PhaseGrid ga = alice_grid ? *alice_grid : default_grid(rho, 0, alice);
    const PhaseGrid gb = bob_grid ? *bob_grid : default_grid(rho, 1, bob);
    const int d = rho.levels();
    const std::size_t nb = gb.size();
    CMatrix bob_bras(static_cast<Eigen::Index>(nb), d);
    for (std::size_t y = 0; y < nb; ++y) {
        bob_bras.row(static_cast<Eigen::Index>(y)) = probe_amplitudes(gb.kind, gb.outcome(y), d).adjoint();
    }
    Matrix joint(static_cast<Eigen::Index>(ga.size()), static_cast<Eigen::Index>(nb));
    const double cells = ga.cell() * gb.cell();
    for_each_outcome(rho, 0, ga, [&](const OutcomeView& v) {
        joint.row(static_cast<Eigen::Index>(v.index)) = cells * (bob_bras * v.factor).rowwise().squaredNorm().transpose();
    });
    const double total = joint.sum();
    MutualInformationOracle out;
    out.completeness_defect = std::abs(total - 1.0);
    if (out.completeness_defect > kMaxCompletenessDefect) {
        throw GridError("joint POVM completeness defect " + std::to_string(out.completeness_defect),
                        out.completeness_defect);
    }
    joint /= total;
    const Vector px = joint.rowwise().sum();
    const Vector py = joint.colwise().sum().transpose();
    double I = 0.0;
    for (Eigen::Index x = 0; x < joint.rows(); ++x) {
        for (Eigen::Index y = 0; y < joint.cols(); ++y) {
            const double p = joint(x, y);
            if (p > 0.0) I += p * std::log2(p / (px(x) * py(y)));
        }
    }
    out.I = I;

    // Moments of the discrete joint distribution.
    const int ka = outcome_arity(ga.kind), kb = outcome_arity(gb.kind);
    const int k = ka + kb;
    Vector mean = Vector::Zero(k);
    Matrix second = Matrix::Zero(k, k);
    Vector z(k);
    for (Eigen::Index x = 0; x < joint.rows(); ++x) {
        const Vector ox = ga.outcome(static_cast<std::size_t>(x));
        for (Eigen::Index y = 0; y < joint.cols(); ++y) {
            const double p = joint(x, y);
            if (p == 0.0) continue;
            z.head(ka) = ox;
            z.tail(kb) = gb.outcome(static_cast<std::size_t>(y));
            mean += p * z;
            second += p * z * z.transpose();
        }
    }
    out.I_gaussian = gaussian_mutual_information(second - mean * mean.transpose(), ka);
    return out;
}

HolevoGapCase holevo_gap_case(const FockDensity& rho, const keyrate::ProtocolConfig& cfg) {
    const bool direct = cfg.recon == keyrate::Reconciliation::direct;
    const int mode = direct ? 0 : 1;
    const MeasurementKind kind = direct ? keyrate::alice_measurement(cfg) : keyrate::bob_measurement(cfg);
    const HolevoOracle oracle = holevo_oracle(rho, mode, kind);
    HolevoGapCase c;
    c.cutoff = rho.cutoff;
    c.tail_mass = rho.tail_mass;
    c.chi_oracle = oracle.chi;
    c.chi_gaussian = keyrate::holevo_xe(cfg, moments(rho));
    c.delta = c.chi_gaussian - c.chi_oracle;
    c.completeness_defect = oracle.completeness_defect;
    return c;
}

std::vector<HolevoGapCase> holevo_gap_check(const std::vector<std::string>& family, const keyrate::ProtocolConfig& cfg,
                                            int cutoff, const std::optional<MomentTarget>& target) {
    std::vector<HolevoGapCase> out;
    for (const std::string& spec : family) {
        const FockDensity rho = realize(spec, cutoff);
        if (rho.modes != 2) throw std::invalid_argument("holevo_gap_check: '" + spec + "' is not a two-mode state");
        double mismatch = 0.0;
        if (target) {
            const GaussianState ref = keyrate::post_channel_state(cfg, target->T, target->xi);
            mismatch = (moments(rho).gamma - ref.gamma).cwiseAbs().maxCoeff();
            if (mismatch > 1e-6) {
                throw std::invalid_argument("holevo_gap_check: '" + spec + "' moments differ from the target by " +
                                            std::to_string(mismatch));
            }
        }
        HolevoGapCase c = holevo_gap_case(rho, cfg);
        c.spec = spec;
        c.moment_mismatch = mismatch;
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace cvq::lab
