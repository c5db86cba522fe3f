#pragma once

// The ECCO outer loop: control evaluation, EATSS step, steady-state
// detection, trace recording; plus the minibatch adaptation where every
// gradient is replaced by the current batch's sample gradient.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecco/control.hpp"
#include "ecco/core.hpp"
#include "ecco/stepper.hpp"

namespace ecco {

enum class RunStatus { converged, max_iters, step_floored };

const char* to_string(RunStatus s);

struct SolverConfig {
    ControlPolicy control;
    StepperConfig stepper;
    double eps = 1e-4;        // steady-state tolerance on the objective
    int max_iters = 100000;
    int record_every = 1;
    std::uint64_t seed = 0;   // batch-cycle offset for batched problems
    bool use_fd_hessian = true;  // fall back to the oracle when no analytic Hessian
};

struct IterationRecord {
    int iter = 0;
    double t = 0.0;
    double dt = 0.0;
    double f = 0.0;
    double grad_norm = 0.0;
    double max_lte = 0.0;
    double charge_sq = 0.0;
    int grow_iters = 0;
    int shrink_iters = 0;
    std::optional<double> f_full;  // full-data objective, minibatch runs only
};

struct RunReport {
    RunStatus status = RunStatus::max_iters;
    Vector x_final;
    double f_final = 0.0;
    double grad_norm_final = 0.0;
    int iters = 0;
    bool diverged = false;
    bool control_degraded = false;
    EvalCounters counters;
    std::vector<IterationRecord> trace;
    std::string config_echo;
};

/// Test/diagnostic hooks; invoked after every accepted step.
struct SolverCallbacks {
    std::function<void(const IterationRecord&, const Vector& x, const Vector& zdiag)> on_step;
};

/// |f_prev - f_curr| <= eps.
bool converged(double f_prev, double f_curr, double eps);

RunReport ecco_minimize(const ObjectiveProblem& problem, const Vector& x0,
                        const SolverConfig& cfg, const SolverCallbacks* callbacks = nullptr);

/// Minibatch variant: per outer iteration the objective and gradient are the
/// current batch's sample versions (control, EATSS and the step all see the
/// batch quantities; the descent check applies to the batch objective). The
/// batch counter advances once per outer iteration starting at cfg.seed.
/// Records additionally carry the full-data objective at record points.
RunReport ecco_minibatch(const ObjectiveProblem& problem, const Vector& x0,
                         const SolverConfig& cfg, int epochs, int batches_per_epoch,
                         const SolverCallbacks* callbacks = nullptr);

}  // namespace ecco
