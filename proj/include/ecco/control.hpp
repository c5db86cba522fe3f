#pragma once

// Diagonal of Z^-1, the capacitance-derived trajectory control. Three
// policies: identity (uncontrolled flow), full (gradient-Hessian product),
// and approximate (lagged-gradient estimate of the same quantity). Also the
// adjoint-circuit charge diagnostic.

#include <optional>

#include "ecco/core.hpp"

namespace ecco {

enum class ControlKind { identity, full_hessian, approximate };

struct ControlPolicy {
    ControlKind kind = ControlKind::full_hessian;
    double delta = 1.0;     // regularization weight in the dissipation problem
    bool normalize = true;  // max-rescale the raw diagonal before flooring
    double cap = 10.0;      // rescaled maximum, > 1
};

/// Lagged quantities for the approximate policy: the gradient at the previous
/// trajectory point and the step that led here. Both present or both absent.
struct ControlState {
    std::optional<Vector> prev_gradient;
    std::optional<double> prev_dt;

    bool ready() const { return prev_gradient.has_value() && prev_dt.has_value(); }
};

/// Set when a non-finite raw control entry was degraded to 1.
struct ControlDiagnostics {
    bool degraded = false;
};

/// Z^-1 = I. n must be >= 1.
Vector identity_control(int n);

/// Rescale so the maximum element becomes cap, preserving ratios. A
/// non-positive maximum leaves the input unchanged for downstream flooring.
Vector normalize_diag(const Vector& raw, double cap);

/// Full-Hessian control: raw_i = grad_i * (H grad)_i / delta, optionally
/// normalized, floored at 1. Non-finite raw entries degrade to 1 and set the
/// diagnostics flag; this never throws on numeric overflow.
Vector full_control_diag(const Vector& grad, const SquareMatrix& hess,
                         const ControlPolicy& policy, ControlDiagnostics* diag = nullptr);

/// Hessian-free control: a_hat = (grad - prev_gradient) / prev_dt,
/// raw_i = -grad_i * a_hat_i / delta, optionally normalized, then
/// sqrt(max(raw_i, 1)). Identity on the first iteration (no lagged state).
Vector approx_control_diag(const Vector& grad, const ControlState& state,
                           const ControlPolicy& policy, ControlDiagnostics* diag = nullptr);

/// Squared charge stored in the adjoint-circuit capacitors: ||grad||^2.
double stored_charge_sq(const Vector& grad);

}  // namespace ecco
