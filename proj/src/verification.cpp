#include "cvq/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "cvq/channel.hpp"
#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"
#include "cvq/parallel.hpp"

namespace cvq::lab {

namespace {

// exp(-i K) for Hermitian K.
CMatrix unitary_from_generator(const CMatrix& K) {
    const linalg::HermitianEigen eig = linalg::hermitian_eigen(K, true);
    CVector phases(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) phases(k) = std::exp(cplx(0.0, -eig.values(k)));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

std::string fixed(double x, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

} // namespace

GaussianReference gaussian_reference(const GaussianState& m, int cutoff) {
    if (m.n_modes != 1) throw std::invalid_argument("gaussian_reference: single-mode moments only");
    const int pad = std::max(2 * cutoff + 20, cutoff + 80);
    const int levels = pad + 1;

    const Eigen::SelfAdjointEigenSolver<Matrix> es(m.gamma);
    const double l1 = std::max(es.eigenvalues()(0), 1e-300);
    const double l2 = es.eigenvalues()(1);
    const double nu = std::max(1.0, std::sqrt(l1 * l2));
    const double r = 0.25 * std::log(l2 / l1);
    const double theta = std::atan2(-es.eigenvectors()(1, 0), es.eigenvectors()(0, 0));
    const cplx beta(m.d(0) / std::numbers::sqrt2, m.d(1) / std::numbers::sqrt2);

    const CMatrix a = annihilation(levels);
    const CMatrix ad = a.adjoint();
    const cplx i(0.0, 1.0);
    const CMatrix squeeze = unitary_from_generator(i * (r / 2.0) * (a * a - ad * ad));
    const CMatrix displace = unitary_from_generator(i * (beta * ad - std::conj(beta) * a));
    CVector rot(levels);
    for (int n = 0; n < levels; ++n) rot(n) = std::exp(cplx(0.0, -theta * n));
    const CMatrix U = displace * rot.asDiagonal() * squeeze;

    // Thermal populations (1 - x) x^n and their logs, x = (nu - 1)/(nu + 1).
    const double x = (nu - 1.0) / (nu + 1.0);
    const double log_floor = std::log(1e-300);
    Vector pop(levels), log_pop(levels);
    for (int n = 0; n < levels; ++n) {
        if (x > 0.0) {
            log_pop(n) = std::log1p(-x) + n * std::log(x);
        } else {
            log_pop(n) = n == 0 ? 0.0 : log_floor;
        }
        log_pop(n) = std::max(log_pop(n), log_floor);
        pop(n) = std::exp(log_pop(n));
    }
    GaussianReference ref;
    const CMatrix full = U * pop.asDiagonal() * U.adjoint();
    ref.trace_defect = std::abs(full.trace().real() - 1.0);
    const GaussianState got = moments(FockDensity{1, pad, full, 0.0});
    ref.moment_defect = std::max((got.gamma - m.gamma).cwiseAbs().maxCoeff(), (got.d - m.d).cwiseAbs().maxCoeff());
    const int d = cutoff + 1;
    ref.density = full.topLeftCorner(d, d);

    // The log is quadratic in the quadratures:
    //   ln(1 - x) + ln(x) / 2 * (nu (R - d)^T gamma^-1 (R - d) - 1).
    // Building it from ladder matrices with two spare levels is exact on the
    // kept block, unlike the restriction of U log(pop) U^+.
    const int wide = d + 2;
    const CMatrix aw = annihilation(wide);
    const CMatrix q = (aw + aw.adjoint()) / std::numbers::sqrt2 - m.d(0) * CMatrix::Identity(wide, wide);
    const CMatrix p = (aw - aw.adjoint()) / cplx(0.0, std::numbers::sqrt2) - m.d(1) * CMatrix::Identity(wide, wide);
    const Matrix G = nu * m.gamma.inverse();
    const CMatrix form = G(0, 0) * q * q + G(1, 1) * p * p + G(0, 1) * (q * p + p * q);
    const double log_x = x > 0.0 ? std::max(std::log(x), log_floor) : log_floor;
    const CMatrix log_full =
        std::log1p(-x) * CMatrix::Identity(wide, wide) + 0.5 * log_x * (form - CMatrix::Identity(wide, wide));
    ref.log_density = log_full.topLeftCorner(d, d);
    return ref;
}

double relative_entropy_bits(const FockDensity& rho, const CMatrix& log_sigma) {
    const Vector ev = linalg::hermitian_eigenvalues(rho.matrix);
    double tr_rho_log_rho = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (ev(k) > 1e-14) tr_rho_log_rho += ev(k) * std::log(ev(k));
    }
    const double cross = rho.matrix.cwiseProduct(log_sigma.transpose()).sum().real();
    return (tr_rho_log_rho - cross) / std::numbers::ln2;
}

ExtremalityGap extremality_gap(const FockDensity& rho, const GapOptions& opts) {
    ExtremalityGap out;
    const GaussianState m = moments(rho);
    out.tail_mass = rho.tail_mass;
    out.gaussian_entropy = von_neumann_entropy(m.gamma);
    out.entropy = entropy_fock(rho);
    out.delta_H = out.gaussian_entropy - out.entropy;
    if (!opts.build_reference || rho.modes != 1) return out;
    const GaussianReference ref = gaussian_reference(m, rho.cutoff);
    out.relative_entropy = relative_entropy_bits(rho, ref.log_density);
    if (ref.trace_defect > 1e-6 || ref.moment_defect > 1e-5) {
        out.reference_failed = true;
        out.reference_error = "Gaussian reference inaccurate at cutoff " + std::to_string(rho.cutoff) +
                              ": trace defect " + std::to_string(ref.trace_defect) + ", moment defect " +
                              std::to_string(ref.moment_defect);
    }
    return out;
}

Contraction contraction_check(const FockDensity& rho, double T) {
    if (rho.modes != 1) throw std::invalid_argument("contraction_check: single-mode density expected");
    const FockDensity out_state = apply_loss(rho, T, 0);
    Contraction c;
    c.before = extremality_gap(rho, {false}).delta_H;
    c.after = extremality_gap(out_state, {false}).delta_H;
    const GaussianState predicted = apply(GaussianChannel::loss_noise(T, 0.0), moments(rho), 0);
    c.moment_deviation = (moments(out_state).gamma - predicted.gamma).cwiseAbs().maxCoeff();
    return c;
}

namespace {

std::string random_atom(rng::Stream& g) {
    switch (g.below(4)) {
    case 0:
        return "fock:" + std::to_string(g.below(4));
    case 1:
        return "coherent:" + fixed(g.uniform(-1.0, 1.0)) + "," + fixed(g.uniform(-1.0, 1.0));
    case 2:
        return "thermal:" + fixed(g.uniform(0.05, 1.0));
    default:
        return "squeezed:" + fixed(g.uniform(0.05, 0.5));
    }
}

std::string random_base(rng::Stream& g, int modes) {
    if (modes == 1) return random_atom(g);
    if (g.below(2) == 0) return "tmsv:" + fixed(g.uniform(1.2, 2.5));
    return "prod(" + random_atom(g) + ", " + random_atom(g) + ")";
}

std::string random_expr(rng::Stream& g, int modes, int depth) {
    if (depth == 0 || g.uniform() < 0.25) return random_base(g, modes);
    switch (g.below(4)) {
    case 0: {
        const int parts = 2 + static_cast<int>(g.below(2));
        // Weights in steps of 0.05, each at least 0.1.
        int left = 20 - 2 * parts;
        std::vector<int> units(parts, 2);
        while (left-- > 0) ++units[g.below(parts)];
        std::string s = "mix(";
        for (int i = 0; i < parts; ++i) {
            if (i) s += ", ";
            s += fixed(units[i] * 0.05) + "*" + random_expr(g, modes, depth - 1);
        }
        return s + ")";
    }
    case 1:
        return "loss(" + fixed(g.uniform(0.3, 0.95)) + ", " + random_expr(g, modes, depth - 1) + ")";
    case 2:
        return "dephase(" + fixed(g.uniform(0.1, 0.9)) + ", " + random_expr(g, modes, depth - 1) + ")";
    default:
        return "photonsub(" + random_expr(g, modes, depth - 1) + ")";
    }
}

bool has(const std::string& s, const char* what) { return s.find(what) != std::string::npos; }

bool obviously_non_gaussian(const std::string& s) {
    if (has(s, "mix(") || has(s, "fock:1") || has(s, "fock:2") || has(s, "fock:3")) return true;
    // Dephasing leaves phase-invariant states alone, and coherent states are
    // eigenstates of the annihilator.
    if (has(s, "dephase(") && (has(s, "coherent:") || has(s, "squeezed:") || has(s, "tmsv:"))) return true;
    return has(s, "photonsub(") && (has(s, "thermal:") || has(s, "squeezed:") || has(s, "tmsv:"));
}

} // namespace

std::string random_state_spec(rng::Stream& g, const RandomSpecOptions& opts) {
    if (opts.modes != 1 && opts.modes != 2) throw std::invalid_argument("random_state_spec: modes must be 1 or 2");
    for (;;) {
        std::string s = random_expr(g, opts.modes, std::max(1, opts.max_depth));
        if (obviously_non_gaussian(s)) return s;
    }
}

std::vector<SuiteCase> extremality_suite(const SuiteOptions& opts) {
    std::vector<SuiteCase> out(opts.cases);
    parallel_for(opts.cases, [&](std::size_t i) {
        rng::Stream g(opts.seed, i);
        SuiteCase& c = out[i];
        c.index = i;
        c.modes = g.uniform() < opts.two_mode_fraction ? 2 : 1;
        c.cutoff = c.modes == 2 ? opts.two_mode_cutoff : opts.single_mode_cutoff;
        for (int attempt = 0;; ++attempt) {
            c.spec = random_state_spec(g, {c.modes, 3});
            try {
                const FockDensity rho = realize(c.spec, c.cutoff, {opts.tail_budget});
                c.gap = extremality_gap(rho);
                return;
            } catch (const TruncationError&) {
            } catch (const std::domain_error&) {
            }
            if (attempt + 1 >= opts.max_attempts) {
                throw std::runtime_error("extremality_suite: no admissible state for case " + std::to_string(i));
            }
        }
    });
    return out;
}

} // namespace cvq::lab
