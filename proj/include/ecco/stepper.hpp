#pragma once

// Forward-Euler trial steps, the local-truncation-error estimate, the
// passivity-based initial step guess, and the grow/shrink time-step search
// (EATSS). The search returns the largest step that keeps the integration
// error under eta while the objective decreases.

#include "ecco/core.hpp"

namespace ecco {

struct StepperConfig {
    double eta = 0.1;          // LTE tolerance
    double alpha = 0.9;        // shrink factor, in (0,1)
    double beta = 1.1;         // grow factor, > 1
    double dt_fallback = 1e-2; // used when the passivity guess degenerates
    double dt_min = 1e-16;
    double dt_max = 1e6;
    int max_grow = 200;
    int max_shrink = 400;
};

struct StepOutcome {
    double dt = 0.0;
    Vector x_next;
    double f_next = 0.0;
    Vector grad_next;
    double max_lte = 0.0;
    int grow_iters = 0;
    int shrink_iters = 0;
    bool floored = false;  // dt_min or the shrink budget hit while still violating
};

/// x - dt * zdiag .* grad, elementwise.
Vector trial_step(const Vector& x, const Vector& zdiag, const Vector& grad, double dt);

/// Forward-Euler LTE estimate, element i = 0.5 * dt * |grad_t_i - grad_trial_i|.
Vector lte(double dt, const Vector& grad_t, const Vector& grad_trial);

/// Passivity-based first step: (x0 . grad0) / sum_i zdiag0_i * grad0_i.
/// Falls back to cfg.dt_fallback unless the candidate is finite and in
/// (0, dt_max].
double initial_dt(const Vector& x0, const Vector& grad0, const Vector& zdiag0,
                  const StepperConfig& cfg);

/// Error-aware time step search. Grows dt while max LTE < eta and the trial
/// objective strictly decreases, then shrinks while max LTE > eta, the trial
/// ascends, or the trial is non-finite. The trial point, objective, gradient
/// and LTE are re-evaluated after every dt change. grad_x must be the
/// gradient at x.
StepOutcome eatss(const CountedProblem& problem, const Vector& x, double f_x,
                  const Vector& grad_x, const Vector& zdiag, double dt_init,
                  const StepperConfig& cfg);

}  // namespace ecco
