#include "cvq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"

namespace cvq::lab {

namespace {

void require_cutoff(int cutoff) {
    if (cutoff < 1) throw std::invalid_argument("Fock cutoff must be >= 1");
}

FockDensity from_amplitudes(const CVector& psi, int modes, int cutoff) {
    const double norm = psi.norm();
    if (norm == 0.0) throw std::domain_error("state vanishes in the truncated space");
    const CVector v = psi / norm;
    FockDensity rho{modes, cutoff, v * v.adjoint(), 0.0};
    rho.tail_mass = tail_mass(rho);
    return rho;
}

FockDensity normalized(FockDensity rho) {
    const double t = trace(rho);
    if (!(t > 0.0)) throw std::domain_error("state has zero trace in the truncated space");
    rho.matrix /= t;
    rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint()).eval();
    rho.tail_mass = tail_mass(rho);
    return rho;
}

// Reorders a two-mode density so that mode 0 and mode 1 trade places.
CMatrix swap_modes(const CMatrix& m, int levels) {
    const Eigen::Index dim = m.rows();
    std::vector<Eigen::Index> perm(dim);
    for (int i = 0; i < levels; ++i) {
        for (int k = 0; k < levels; ++k) perm[i * levels + k] = k * levels + i;
    }
    CMatrix out(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) out(perm[r], perm[c]) = m(r, c);
    }
    return out;
}

// Applies a linear single-mode map to `mode` of rho.
template <class Map>
FockDensity map_mode(const FockDensity& rho, int mode, Map&& f) {
    if (mode < 0 || mode >= rho.modes) {
        throw std::out_of_range("mode " + std::to_string(mode) + " out of range");
    }
    FockDensity out = rho;
    const int d = rho.levels();
    if (rho.modes == 1) {
        out.matrix = f(rho.matrix);
        return out;
    }
    CMatrix work = mode == 1 ? rho.matrix : swap_modes(rho.matrix, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            CMatrix block = work.block(i * d, j * d, d, d);
            work.block(i * d, j * d, d, d) = f(block);
        }
    }
    out.matrix = mode == 1 ? std::move(work) : swap_modes(work, d);
    return out;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Expectation of O_0 (x) O_1 where each factor maps |n> to c(n)|n + shift>.
struct Ladder {
    int shift;
    double (*coef)(int);
};

double c_one(int) { return 1.0; }
double c_lower(int n) { return std::sqrt(static_cast<double>(n)); }
double c_raise(int n) { return std::sqrt(n + 1.0); }
double c_lower2(int n) { return std::sqrt(static_cast<double>(n) * (n - 1)); }
double c_number(int n) { return static_cast<double>(n); }

constexpr Ladder kId{0, c_one};
constexpr Ladder kA{-1, c_lower};
constexpr Ladder kAdag{1, c_raise};
constexpr Ladder kA2{-2, c_lower2};
constexpr Ladder kN{0, c_number};

cplx expect(const FockDensity& rho, Ladder op0, Ladder op1 = kId) {
    const int d = rho.levels();
    cplx acc = 0.0;
    if (rho.modes == 1) {
        for (int n = 0; n < d; ++n) {
            const int m = n + op0.shift;
            if (m < 0 || m >= d) continue;
            acc += op0.coef(n) * rho.matrix(n, m);
        }
        return acc;
    }
    for (int i = 0; i < d; ++i) {
        const int i2 = i + op0.shift;
        if (i2 < 0 || i2 >= d) continue;
        const double ci = op0.coef(i);
        if (ci == 0.0) continue;
        for (int k = 0; k < d; ++k) {
            const int k2 = k + op1.shift;
            if (k2 < 0 || k2 >= d) continue;
            acc += ci * op1.coef(k) * rho.matrix(i * d + k, i2 * d + k2);
        }
    }
    return acc;
}

int suggest_cutoff(const FockDensity& rho, double budget) {
    // Extrapolate the geometric decay of the marginal photon-number tails.
    const int d = rho.levels();
    const int n = rho.cutoff;
    int best = n;
    for (int mode = 0; mode < rho.modes; ++mode) {
        std::vector<double> p(d, 0.0);
        if (rho.modes == 1) {
            for (int k = 0; k < d; ++k) p[k] = std::max(rho.matrix(k, k).real(), 0.0);
        } else {
            for (int i = 0; i < d; ++i) {
                for (int k = 0; k < d; ++k) {
                    p[mode == 0 ? i : k] += std::max(rho.matrix(i * d + k, i * d + k).real(), 0.0);
                }
            }
        }
        const int span = std::min(10, n);
        const double top = p[n] + p[n - 1];
        const double lower = p[n - span] + p[std::max(n - span - 1, 0)];
        double ratio = lower > 0.0 && top > 0.0 ? std::pow(top / lower, 1.0 / span) : 0.5;
        if (!(ratio < 0.999)) {
            best = std::max(best, 2 * n);
            continue;
        }
        int extra = 0;
        double tail = top;
        while (tail > 0.1 * budget && extra < 10 * n + 100) {
            tail *= ratio;
            ++extra;
        }
        best = std::max(best, n + extra + 2);
    }
    return best;
}

FockDensity build(const StateSpec& spec, int cutoff, double& worst_tail) {
    FockDensity rho = std::visit(
        [&](const auto& node) -> FockDensity {
            using N = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<N, FockAtom>) {
                return fock_state(node.n, cutoff);
            } else if constexpr (std::is_same_v<N, CoherentAtom>) {
                return coherent_state({node.re, node.im}, cutoff);
            } else if constexpr (std::is_same_v<N, ThermalAtom>) {
                return thermal_state(node.nbar, cutoff);
            } else if constexpr (std::is_same_v<N, TmsvAtom>) {
                return tmsv_state(node.V, cutoff);
            } else if constexpr (std::is_same_v<N, SqueezedAtom>) {
                return squeezed_vacuum(node.r, cutoff);
            } else if constexpr (std::is_same_v<N, MixNode>) {
                std::vector<FockDensity> parts;
                for (const auto& p : node.parts) parts.push_back(build(*p, cutoff, worst_tail));
                return mix(node.weights, parts);
            } else if constexpr (std::is_same_v<N, LossNode>) {
                const FockDensity arg = build(*node.arg, cutoff, worst_tail);
                return apply_loss(arg, node.T, arg.modes - 1);
            } else if constexpr (std::is_same_v<N, DephaseNode>) {
                const FockDensity arg = build(*node.arg, cutoff, worst_tail);
                return apply_dephasing(arg, node.p, arg.modes - 1);
            } else if constexpr (std::is_same_v<N, PhotonSubNode>) {
                const FockDensity arg = build(*node.arg, cutoff, worst_tail);
                return photon_subtract(arg, arg.modes - 1);
            } else {
                return tensor(build(*node.first, cutoff, worst_tail), build(*node.second, cutoff, worst_tail));
            }
        },
        spec.node);
    worst_tail = std::max(worst_tail, rho.tail_mass);
    return rho;
}

} // namespace

CMatrix annihilation(int levels) {
    CMatrix a = CMatrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMatrix number_operator(int levels) {
    CMatrix n = CMatrix::Zero(levels, levels);
    for (int k = 0; k < levels; ++k) n(k, k) = k;
    return n;
}

FockDensity fock_state(int n, int cutoff) {
    require_cutoff(cutoff);
    if (n < 0 || n > cutoff) {
        throw TruncationError("fock:" + std::to_string(n) + " does not fit below cutoff " + std::to_string(cutoff),
                              cutoff, n + 2, 1.0);
    }
    CVector psi = CVector::Zero(cutoff + 1);
    psi(n) = 1.0;
    return from_amplitudes(psi, 1, cutoff);
}

FockDensity coherent_state(cplx alpha, int cutoff) {
    require_cutoff(cutoff);
    CVector psi(cutoff + 1);
    psi(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= cutoff; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return from_amplitudes(psi, 1, cutoff);
}

FockDensity thermal_state(double nbar, int cutoff) {
    require_cutoff(cutoff);
    if (!(nbar >= 0.0)) throw std::invalid_argument("thermal_state: nbar must be >= 0");
    FockDensity rho{1, cutoff, CMatrix::Zero(cutoff + 1, cutoff + 1), 0.0};
    const double x = nbar / (nbar + 1.0);
    double p = 1.0 / (nbar + 1.0);
    for (int n = 0; n <= cutoff; ++n) {
        rho.matrix(n, n) = p;
        p *= x;
    }
    return normalized(std::move(rho));
}

FockDensity squeezed_vacuum(double r, int cutoff) {
    require_cutoff(cutoff);
    // S(r) = exp(r/2 (a^2 - a^+2)) squeezes Q by e^{-r}.
    CVector psi = CVector::Zero(cutoff + 1);
    psi(0) = 1.0 / std::sqrt(std::cosh(r));
    const double t = -std::tanh(r);
    for (int n = 2; n <= cutoff; n += 2) {
        psi(n) = psi(n - 2) * t * std::sqrt((n - 1.0) / n);
    }
    return from_amplitudes(psi, 1, cutoff);
}

FockDensity tmsv_state(double V, int cutoff) {
    require_cutoff(cutoff);
    if (!(V >= 1.0)) throw std::invalid_argument("tmsv_state: V must be >= 1");
    const int d = cutoff + 1;
    const double t = std::sqrt((V - 1.0) / (V + 1.0));  // tanh r with cosh 2r = V
    CVector psi = CVector::Zero(d * d);
    double lambda = std::sqrt(1.0 - t * t);              // 1 / cosh r
    for (int n = 0; n < d; ++n) {
        psi(n * d + n) = lambda;
        lambda *= t;
    }
    return from_amplitudes(psi, 2, cutoff);
}

FockDensity tensor(const FockDensity& a, const FockDensity& b) {
    if (a.modes != 1 || b.modes != 1) throw std::invalid_argument("tensor: expects two single-mode states");
    if (a.cutoff != b.cutoff) throw std::invalid_argument("tensor: cutoffs differ");
    const int d = a.levels();
    FockDensity out{2, a.cutoff, CMatrix(d * d, d * d), 0.0};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out.matrix.block(i * d, j * d, d, d) = a.matrix(i, j) * b.matrix;
    }
    out.tail_mass = tail_mass(out);
    return out;
}

FockDensity partial_trace(const FockDensity& rho, int keep_mode) {
    if (rho.modes != 2) throw std::invalid_argument("partial_trace: expects a two-mode state");
    if (keep_mode != 0 && keep_mode != 1) throw std::out_of_range("partial_trace: mode out of range");
    const int d = rho.levels();
    FockDensity out{1, rho.cutoff, CMatrix::Zero(d, d), 0.0};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                if (keep_mode == 0) {
                    out.matrix(i, j) += rho.matrix(i * d + k, j * d + k);
                } else {
                    out.matrix(i, j) += rho.matrix(k * d + i, k * d + j);
                }
            }
        }
    }
    out.tail_mass = tail_mass(out);
    return out;
}

FockDensity mix(std::span<const double> weights, std::span<const FockDensity> parts) {
    if (weights.size() != parts.size() || parts.empty()) throw std::invalid_argument("mix: weights/parts mismatch");
    FockDensity out = parts[0];
    out.matrix *= weights[0];
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].modes != out.modes || parts[i].cutoff != out.cutoff) {
            throw std::invalid_argument("mix: components differ in modes or cutoff");
        }
        out.matrix += weights[i] * parts[i].matrix;
    }
    return normalized(std::move(out));
}

FockDensity apply_loss(const FockDensity& rho, double T, int mode) {
    if (!(T > 0.0 && T <= 1.0)) throw std::invalid_argument("apply_loss: T must lie in (0, 1]");
    const int d = rho.levels();
    // coef(k, m): amplitude for losing m photons out of k.
    CMatrix coef = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        for (int m = 0; m <= k; ++m) {
            if (T == 1.0) {
                coef(k, m) = m == 0 ? 1.0 : 0.0;
                continue;
            }
            const double lg = log_binomial(k, m) + (k - m) * std::log(T) + m * std::log1p(-T);
            coef(k, m) = std::exp(0.5 * lg);
        }
    }
    FockDensity out = map_mode(rho, mode, [&](const CMatrix& in) {
        CMatrix res = CMatrix::Zero(d, d);
        for (int l = 0; l < d; ++l) {
            for (int k = 0; k < d; ++k) {
                const cplx v = in(k, l);
                if (v == cplx(0.0)) continue;
                const int mmax = std::min(k, l);
                for (int m = 0; m <= mmax; ++m) res(k - m, l - m) += v * coef(k, m).real() * coef(l, m).real();
            }
        }
        return res;
    });
    out.tail_mass = tail_mass(out);
    return out;
}

FockDensity apply_dephasing(const FockDensity& rho, double p, int mode) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("apply_dephasing: p must lie in [0, 1]");
    FockDensity out = map_mode(rho, mode, [&](const CMatrix& in) {
        CMatrix res = (1.0 - p) * in;
        res.diagonal() = in.diagonal();
        return res;
    });
    out.tail_mass = tail_mass(out);
    return out;
}

FockDensity photon_subtract(const FockDensity& rho, int mode) {
    const int d = rho.levels();
    FockDensity out = map_mode(rho, mode, [&](const CMatrix& in) {
        CMatrix res = CMatrix::Zero(d, d);
        for (int l = 0; l + 1 < d; ++l) {
            for (int k = 0; k + 1 < d; ++k) res(k, l) = std::sqrt((k + 1.0) * (l + 1.0)) * in(k + 1, l + 1);
        }
        return res;
    });
    if (!(trace(out) > 1e-300)) throw std::domain_error("photon subtraction on a state with no photons");
    return normalized(std::move(out));
}

double trace(const FockDensity& rho) {
    return rho.matrix.trace().real();
}

double purity(const FockDensity& rho) {
    return (rho.matrix * rho.matrix).trace().real();
}

double tail_mass(const FockDensity& rho) {
    const int d = rho.levels();
    const int n = rho.cutoff;
    double tail = 0.0;
    if (rho.modes == 1) {
        for (int k = std::max(0, n - 1); k <= n; ++k) tail += rho.matrix(k, k).real();
        return std::max(tail, 0.0);
    }
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            if (i >= n - 1 || k >= n - 1) tail += rho.matrix(i * d + k, i * d + k).real();
        }
    }
    return std::max(tail, 0.0);
}

FockDensity realize(const StateSpec& spec, int cutoff, const RealizeOptions& opts) {
    if (cutoff < 4) throw std::invalid_argument("realize: cutoff must be >= 4");
    double worst = 0.0;
    FockDensity rho = build(spec, cutoff, worst);
    rho.tail_mass = std::max(worst, rho.tail_mass);
    if (rho.tail_mass > opts.tail_budget) {
        const int suggested = suggest_cutoff(rho, opts.tail_budget);
        throw TruncationError("tail mass " + std::to_string(rho.tail_mass) + " exceeds budget " +
                                  std::to_string(opts.tail_budget) + " at cutoff " + std::to_string(cutoff) +
                                  "; try cutoff >= " + std::to_string(suggested),
                              cutoff, suggested, rho.tail_mass);
    }
    return rho;
}

FockDensity realize(std::string_view spec, int cutoff, const RealizeOptions& opts) {
    return realize(*parse_state_spec(spec), cutoff, opts);
}

void check_admissible(const FockDensity& rho, double tail_budget) {
    const double herm = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) throw std::domain_error("density not Hermitian: " + std::to_string(herm));
    const double tr = trace(rho);
    if (std::abs(tr - 1.0) > 1e-8) throw std::domain_error("density trace " + std::to_string(tr) + " != 1");
    const double min_eig = linalg::hermitian_eigenvalues(rho.matrix).minCoeff();
    if (min_eig < -1e-10) throw std::domain_error("density has negative eigenvalue " + std::to_string(min_eig));
    if (rho.tail_mass > tail_budget) {
        throw TruncationError("tail mass " + std::to_string(rho.tail_mass) + " exceeds budget",
                              rho.cutoff, suggest_cutoff(rho, tail_budget), rho.tail_mass);
    }
}

GaussianState moments(const FockDensity& rho) {
    const int n = rho.modes;
    GaussianState s{n, Vector::Zero(2 * n), Matrix::Zero(2 * n, 2 * n)};
    const double r2 = std::sqrt(2.0);
    std::vector<cplx> a(n), a2(n);
    std::vector<double> num(n);
    for (int m = 0; m < n; ++m) {
        const bool first = m == 0;
        a[m] = n == 1 ? expect(rho, kA) : (first ? expect(rho, kA, kId) : expect(rho, kId, kA));
        a2[m] = n == 1 ? expect(rho, kA2) : (first ? expect(rho, kA2, kId) : expect(rho, kId, kA2));
        num[m] = (n == 1 ? expect(rho, kN) : (first ? expect(rho, kN, kId) : expect(rho, kId, kN))).real();
        s.d(2 * m) = r2 * a[m].real();
        s.d(2 * m + 1) = r2 * a[m].imag();
    }
    for (int m = 0; m < n; ++m) {
        const double dq = s.d(2 * m), dp = s.d(2 * m + 1);
        s.gamma(2 * m, 2 * m) = 2.0 * a2[m].real() + 2.0 * num[m] + 1.0 - 2.0 * dq * dq;
        s.gamma(2 * m + 1, 2 * m + 1) = -2.0 * a2[m].real() + 2.0 * num[m] + 1.0 - 2.0 * dp * dp;
        s.gamma(2 * m, 2 * m + 1) = s.gamma(2 * m + 1, 2 * m) = 2.0 * a2[m].imag() - 2.0 * dq * dp;
    }
    if (n == 2) {
        const cplx ab = expect(rho, kA, kA);
        const cplx adb = expect(rho, kAdag, kA);  // <a^+ b>
        const double qa = s.d(0), pa = s.d(1), qb = s.d(2), pb = s.d(3);
        const double qq = 2.0 * (ab.real() + adb.real()) - 2.0 * qa * qb;
        const double qp = 2.0 * (ab.imag() + adb.imag()) - 2.0 * qa * pb;
        const double pq = 2.0 * (ab.imag() - adb.imag()) - 2.0 * pa * qb;
        const double pp = 2.0 * (adb.real() - ab.real()) - 2.0 * pa * pb;
        s.gamma(0, 2) = s.gamma(2, 0) = qq;
        s.gamma(0, 3) = s.gamma(3, 0) = qp;
        s.gamma(1, 2) = s.gamma(2, 1) = pq;
        s.gamma(1, 3) = s.gamma(3, 1) = pp;
    }
    return s;
}

double entropy_fock(const FockDensity& rho) {
    return linalg::entropy_bits(linalg::hermitian_eigenvalues(rho.matrix));
}

} // namespace cvq::lab
