#include "ecco/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ecco {

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iters: return "max_iters";
        case RunStatus::step_floored: return "step_floored";
    }
    return "unknown";
}

bool converged(double f_prev, double f_curr, double eps) {
    return std::abs(f_prev - f_curr) <= eps;
}

namespace {

const char* to_string(ControlKind k) {
    switch (k) {
        case ControlKind::identity: return "identity";
        case ControlKind::full_hessian: return "full";
        case ControlKind::approximate: return "approx";
    }
    return "unknown";
}

std::string echo_config(const SolverConfig& cfg) {
    std::ostringstream os;
    os << "control=" << to_string(cfg.control.kind) << " delta=" << cfg.control.delta
       << " normalize=" << (cfg.control.normalize ? 1 : 0) << " cap=" << cfg.control.cap
       << " eta=" << cfg.stepper.eta << " alpha=" << cfg.stepper.alpha
       << " beta=" << cfg.stepper.beta << " eps=" << cfg.eps
       << " max_iters=" << cfg.max_iters << " seed=" << cfg.seed;
    return os.str();
}

struct ControlEngine {
    const SolverConfig* cfg;
    const CountedProblem* problem;
    ControlState state;
    ControlDiagnostics diag;

    Vector evaluate(const Vector& x, const Vector& grad) {
        switch (cfg->control.kind) {
            case ControlKind::identity:
                return identity_control(static_cast<int>(grad.size()));
            case ControlKind::full_hessian: {
                SquareMatrix h;
                if (problem->problem().has_hessian()) {
                    h = problem->hessian(x);
                } else if (cfg->use_fd_hessian) {
                    // probe through a counting view so n_grad stays exact
                    ObjectiveProblem view;
                    view.dim = problem->problem().dim;
                    view.gradient = [this](const Vector& v) { return problem->gradient(v); };
                    h = fd_hessian(view, x);
                } else {
                    throw std::invalid_argument(
                        "ecco: full-Hessian control requested with no Hessian source");
                }
                return full_control_diag(grad, h, cfg->control, &diag);
            }
            case ControlKind::approximate:
                return approx_control_diag(grad, state, cfg->control, &diag);
        }
        throw std::logic_error("ecco: unknown control kind");
    }
};

// Steady state of the equivalent circuit: both the objective and the stored
// adjoint charge change by no more than eps per unit time over the accepted
// step (capped at eps in absolute terms), on two consecutive steps.
constexpr int kSteadySteps = 2;

struct SteadyDetector {
    double eps;
    int streak = 0;

    bool update(double df, double dq, double dt) {
        const double bound = eps * std::min(1.0, dt);
        streak = (df <= bound && dq <= bound) ? streak + 1 : 0;
        return streak >= kSteadySteps;
    }
};

struct LoopShared {
    RunReport report;
    SteadyDetector steady;
    double t = 0.0;
    int last_recorded = -1;
};

void record_step(LoopShared& s, const SolverConfig& cfg, const IterationRecord& rec,
                 const SolverCallbacks* callbacks, const Vector& x, const Vector& zdiag,
                 bool force) {
    if (force || cfg.record_every <= 1 || rec.iter % cfg.record_every == 0) {
        if (s.last_recorded != rec.iter) {
            s.report.trace.push_back(rec);
            s.last_recorded = rec.iter;
        }
    }
    if (callbacks && callbacks->on_step) callbacks->on_step(rec, x, zdiag);
}

}  // namespace

RunReport ecco_minimize(const ObjectiveProblem& problem, const Vector& x0,
                        const SolverConfig& cfg, const SolverCallbacks* callbacks) {
    if (static_cast<int>(x0.size()) != problem.dim)
        throw std::invalid_argument("ecco_minimize: x0 length does not match problem.dim");
    if (!all_finite(x0)) throw std::invalid_argument("ecco_minimize: x0 must be finite");
    if (cfg.control.kind == ControlKind::full_hessian && !problem.has_hessian() &&
        !cfg.use_fd_hessian)
        throw std::invalid_argument("ecco_minimize: no Hessian source for full control");

    LoopShared s;
    s.steady.eps = cfg.eps;
    s.report.config_echo = echo_config(cfg);
    CountedProblem counted(problem, s.report.counters);
    ControlEngine control{&cfg, &counted, {}, {}};

    Vector x = x0;
    double fx = counted.value(x);
    Vector gx = counted.gradient(x);

    Vector zdiag = control.evaluate(x, gx);
    double dt = initial_dt(x, gx, zdiag, cfg.stepper);
    dt = std::clamp(dt, cfg.stepper.dt_min, cfg.stepper.dt_max);

    int iter = 0;
    RunStatus status = RunStatus::max_iters;
    while (iter < cfg.max_iters) {
        if (iter > 0) zdiag = control.evaluate(x, gx);
        const StepOutcome out = eatss(counted, x, fx, gx, zdiag, dt, cfg.stepper);

        control.state.prev_gradient = gx;
        control.state.prev_dt = out.dt;

        const double f_prev = fx;
        const double q_prev = stored_charge_sq(gx);
        const bool apply = std::isfinite(out.f_next) && out.f_next <= fx;
        if (apply) {
            x = out.x_next;
            fx = out.f_next;
            gx = out.grad_next;
        }
        s.t += out.dt;
        dt = out.dt;
        ++iter;

        IterationRecord rec{iter,       s.t,
                            out.dt,     fx,
                            norm2(gx),  out.max_lte,
                            stored_charge_sq(gx), out.grow_iters,
                            out.shrink_iters, std::nullopt};
        const bool done_floored = out.floored;
        const bool done_steady =
            !done_floored &&
            s.steady.update(std::abs(f_prev - fx), std::abs(q_prev - stored_charge_sq(gx)),
                            out.dt);
        const bool done = done_floored || done_steady || iter >= cfg.max_iters;
        record_step(s, cfg, rec, callbacks, x, zdiag, done);
        if (done_floored) {
            status = RunStatus::step_floored;
            break;
        }
        if (done_steady) {
            status = RunStatus::converged;
            break;
        }
    }

    s.report.status = status;
    s.report.x_final = x;
    s.report.f_final = fx;
    s.report.grad_norm_final = norm2(gx);
    s.report.iters = iter;
    s.report.control_degraded = control.diag.degraded;
    return s.report;
}

RunReport ecco_minibatch(const ObjectiveProblem& problem, const Vector& x0,
                         const SolverConfig& cfg, int epochs, int batches_per_epoch,
                         const SolverCallbacks* callbacks) {
    if (!problem.has_batches())
        throw std::invalid_argument("ecco_minibatch: problem has no batch interface");
    if (static_cast<int>(x0.size()) != problem.dim)
        throw std::invalid_argument("ecco_minibatch: x0 length does not match problem.dim");
    if (epochs < 1 || batches_per_epoch < 1)
        throw std::invalid_argument("ecco_minibatch: epochs and batches_per_epoch must be >= 1");

    const int budget = std::min(cfg.max_iters, epochs * batches_per_epoch);

    LoopShared s;
    s.steady.eps = cfg.eps;
    s.report.config_echo = echo_config(cfg);
    CountedProblem counted(problem, s.report.counters);
    ControlEngine control{&cfg, &counted, {}, {}};

    // Fixed-batch view; rebound to the current batch id each outer iteration.
    std::uint64_t batch_id = cfg.seed;
    ObjectiveProblem view;
    view.name = problem.name;
    view.dim = problem.dim;
    view.value = [&problem, &batch_id](const Vector& v) {
        return problem.batch_value(v, batch_id);
    };
    view.gradient = [&problem, &batch_id](const Vector& v) {
        return problem.batch_gradient(v, batch_id);
    };
    CountedProblem counted_view(view, s.report.counters);

    Vector x = x0;
    double fx = counted_view.value(x);
    Vector gx = counted_view.gradient(x);

    Vector zdiag = control.evaluate(x, gx);
    double dt = initial_dt(x, gx, zdiag, cfg.stepper);
    dt = std::clamp(dt, cfg.stepper.dt_min, cfg.stepper.dt_max);

    int iter = 0;
    RunStatus status = RunStatus::max_iters;
    while (iter < budget) {
        if (iter > 0) {
            batch_id = cfg.seed + static_cast<std::uint64_t>(iter);
            fx = counted_view.value(x);
            gx = counted_view.gradient(x);
            zdiag = control.evaluate(x, gx);
        }
        const StepOutcome out = eatss(counted_view, x, fx, gx, zdiag, dt, cfg.stepper);

        control.state.prev_gradient = gx;
        control.state.prev_dt = out.dt;

        const double f_prev = fx;
        const double q_prev = stored_charge_sq(gx);
        const bool apply = std::isfinite(out.f_next) && out.f_next <= fx;
        if (apply) {
            x = out.x_next;
            fx = out.f_next;
            gx = out.grad_next;
        }
        s.t += out.dt;
        dt = out.dt;
        ++iter;

        IterationRecord rec{iter,       s.t,
                            out.dt,     fx,
                            norm2(gx),  out.max_lte,
                            stored_charge_sq(gx), out.grow_iters,
                            out.shrink_iters, std::nullopt};
        const bool done_floored = out.floored;
        const bool done_steady =
            !done_floored &&
            s.steady.update(std::abs(f_prev - fx), std::abs(q_prev - stored_charge_sq(gx)),
                            out.dt);
        const bool done = done_floored || done_steady || iter >= budget;
        const bool recording =
            done || cfg.record_every <= 1 || rec.iter % cfg.record_every == 0;
        if (recording) rec.f_full = counted.value(x);
        record_step(s, cfg, rec, callbacks, x, zdiag, done);
        if (done_floored) {
            status = RunStatus::step_floored;
            break;
        }
        if (done_steady) {
            status = RunStatus::converged;
            break;
        }
    }

    s.report.status = status;
    s.report.x_final = x;
    s.report.f_final = counted.value(x);
    s.report.grad_norm_final = norm2(gx);
    s.report.iters = iter;
    s.report.control_degraded = control.diag.degraded;
    return s.report;
}

}  // namespace ecco
