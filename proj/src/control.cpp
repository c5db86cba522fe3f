#include "ecco/control.hpp"

#include <cmath>
#include <stdexcept>

namespace ecco {

namespace {

// Rescale over finite entries, floor at 1; non-finite slots become exactly 1.
Vector finish_diag(Vector raw, bool normalize, double cap, ControlDiagnostics* diag,
                   bool sqrt_after_floor) {
    bool degraded = false;
    double finite_max = 0.0;
    bool any_finite_positive = false;
    for (double r : raw) {
        if (std::isfinite(r)) {
            if (!any_finite_positive || r > finite_max) finite_max = r;
            any_finite_positive = true;
        } else {
            degraded = true;
        }
    }
    if (normalize && any_finite_positive && finite_max > 0.0) {
        const double scale = cap / finite_max;
        for (double& r : raw) {
            if (std::isfinite(r)) r = std::min(r * scale, cap);
        }
    }
    for (double& r : raw) {
        if (!std::isfinite(r)) {
            r = 1.0;
        } else if (sqrt_after_floor) {
            r = std::sqrt(std::max(r, 1.0));
        } else {
            r = std::max(r, 1.0);
        }
    }
    if (diag && degraded) diag->degraded = true;
    return raw;
}

}  // namespace

Vector identity_control(int n) {
    if (n < 1) throw std::invalid_argument("identity_control: dimension must be >= 1");
    return Vector(static_cast<std::size_t>(n), 1.0);
}

Vector normalize_diag(const Vector& raw, double cap) {
    if (cap <= 1.0) throw std::invalid_argument("normalize_diag: cap must exceed 1");
    double m = raw.empty() ? 0.0 : raw[0];
    for (double r : raw) m = std::max(m, r);
    if (!(m > 0.0)) return raw;
    Vector out = raw;
    const double scale = cap / m;
    for (double& r : out) r = std::min(r * scale, cap);
    return out;
}

Vector full_control_diag(const Vector& grad, const SquareMatrix& hess,
                         const ControlPolicy& policy, ControlDiagnostics* diag) {
    if (policy.kind != ControlKind::full_hessian)
        throw std::invalid_argument("full_control_diag: policy kind mismatch");
    if (hess.size() != grad.size())
        throw std::invalid_argument("full_control_diag: shape mismatch");
    const Vector hg = hess.matvec(grad);
    Vector raw(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) raw[i] = grad[i] * hg[i] / policy.delta;
    return finish_diag(std::move(raw), policy.normalize, policy.cap, diag, false);
}

Vector approx_control_diag(const Vector& grad, const ControlState& state,
                           const ControlPolicy& policy, ControlDiagnostics* diag) {
    if (policy.kind != ControlKind::approximate)
        throw std::invalid_argument("approx_control_diag: policy kind mismatch");
    if (!state.ready()) return Vector(grad.size(), 1.0);
    const Vector& prev = *state.prev_gradient;
    if (prev.size() != grad.size())
        throw std::invalid_argument("approx_control_diag: state dimension mismatch");
    const double dt = *state.prev_dt;
    Vector raw(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double a_hat = (grad[i] - prev[i]) / dt;
        raw[i] = -grad[i] * a_hat / policy.delta;
    }
    return finish_diag(std::move(raw), policy.normalize, policy.cap, diag, true);
}

double stored_charge_sq(const Vector& grad) { return dot(grad, grad); }

}  // namespace ecco
