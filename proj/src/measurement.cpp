#include "cvq/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cvq/errors.hpp"
#include "cvq/linalg.hpp"

namespace cvq {

namespace {

void require_valid(const GaussianState& s, const char* who) {
    const Validation v = validate_state(s);
    if (!v.ok) throw PhysicalityError(std::string(who) + ": " + v.message);
}

void require_mode(const GaussianState& s, int mode, const char* who) {
    if (mode < 0 || mode >= s.n_modes) {
        throw std::out_of_range(std::string(who) + ": mode " + std::to_string(mode) + " out of range");
    }
}

// Rows of gamma's quadrature space selected by a measurement of the given kind.
Matrix selector(MeasurementKind kind) {
    switch (kind) {
    case MeasurementKind::homodyne_q: return (Matrix(1, 2) << 1.0, 0.0).finished();
    case MeasurementKind::homodyne_p: return (Matrix(1, 2) << 0.0, 1.0).finished();
    case MeasurementKind::heterodyne: return Matrix::Identity(2, 2);
    }
    throw std::logic_error("unknown measurement kind");
}

} // namespace

int outcome_arity(MeasurementKind kind) {
    return kind == MeasurementKind::heterodyne ? 2 : 1;
}

const char* to_string(MeasurementKind kind) {
    switch (kind) {
    case MeasurementKind::homodyne_q: return "homodyne_q";
    case MeasurementKind::homodyne_p: return "homodyne_p";
    case MeasurementKind::heterodyne: return "heterodyne";
    }
    return "?";
}

Vector ConditionalResult::displacement_at(const Vector& outcome) const {
    if (outcome.size() != outcome_mean.size()) {
        throw DimensionError("displacement_at: outcome has wrong arity");
    }
    return offset + gain * outcome;
}

ClassicalGaussian outcome_marginal(const GaussianState& s, int mode, MeasurementKind kind) {
    require_mode(s, mode, "outcome_marginal");
    require_valid(s, "outcome_marginal");
    const Matrix sel = selector(kind);
    const Matrix gb = s.gamma.block(2 * mode, 2 * mode, 2, 2);
    ClassicalGaussian out;
    out.mean = std::sqrt(2.0) * sel * s.d.segment(2 * mode, 2);
    out.cov = sel * gb * sel.transpose();
    if (kind == MeasurementKind::heterodyne) out.cov += Matrix::Identity(2, 2);
    return out;
}

ConditionalResult condition(const GaussianState& s, int mode, MeasurementKind kind) {
    require_mode(s, mode, "condition");
    if (s.n_modes < 2) throw std::invalid_argument("condition: single-mode state leaves nothing to condition");
    require_valid(s, "condition");

    ConditionalResult r;
    r.kind = kind;
    for (int m = 0; m < s.n_modes; ++m) {
        if (m != mode) r.remaining_modes.push_back(m);
    }
    const GaussianState rest = reduce(s, r.remaining_modes);
    const int dim_rest = 2 * rest.n_modes;
    Matrix cross(dim_rest, 2);
    for (int i = 0; i < rest.n_modes; ++i) {
        cross.block(2 * i, 0, 2, 2) = s.gamma.block(2 * r.remaining_modes[i], 2 * mode, 2, 2);
    }
    const Matrix gb = s.gamma.block(2 * mode, 2 * mode, 2, 2);

    const ClassicalGaussian marginal = outcome_marginal(s, mode, kind);
    r.outcome_mean = marginal.mean;
    r.outcome_cov = marginal.cov;

    // Kernel K with gamma_rest|x = gamma_rest - C K C^T, expressed in the
    // measured quadratures.
    Matrix kernel;
    const Matrix sel = selector(kind);
    if (kind == MeasurementKind::heterodyne) {
        const Matrix shifted = gb + Matrix::Identity(2, 2);
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() != Eigen::Success) {
            throw std::logic_error("condition: gamma_B + I is singular for a valid state");
        }
        kernel = llt.solve(Matrix::Identity(2, 2));
    } else {
        const Matrix projected = sel.transpose() * sel * gb * sel.transpose() * sel;
        kernel = linalg::pseudo_inverse(projected);
    }
    Matrix cond = rest.gamma - cross * kernel * cross.transpose();
    cond = 0.5 * (cond + cond.transpose()).eval();

    // Gain in displacement units per outcome unit (outcome = sqrt(2) * quadrature).
    r.gain = cross * kernel * sel.transpose() / std::sqrt(2.0);
    r.offset = rest.d - r.gain * r.outcome_mean;
    r.conditional_state = GaussianState{rest.n_modes, r.displacement_at(r.outcome_mean), cond};
    return r;
}

} // namespace cvq
