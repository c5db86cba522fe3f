#include "ecco/stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace ecco {

Vector trial_step(const Vector& x, const Vector& zdiag, const Vector& grad, double dt) {
    if (x.size() != zdiag.size() || x.size() != grad.size())
        throw std::invalid_argument("trial_step: length mismatch");
    if (!(dt > 0.0)) throw std::invalid_argument("trial_step: dt must be positive");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - dt * zdiag[i] * grad[i];
    return out;
}

Vector lte(double dt, const Vector& grad_t, const Vector& grad_trial) {
    if (grad_t.size() != grad_trial.size())
        throw std::invalid_argument("lte: length mismatch");
    Vector out(grad_t.size());
    for (std::size_t i = 0; i < grad_t.size(); ++i)
        out[i] = 0.5 * dt * std::abs(grad_t[i] - grad_trial[i]);
    return out;
}

double initial_dt(const Vector& x0, const Vector& grad0, const Vector& zdiag0,
                  const StepperConfig& cfg) {
    if (x0.size() != grad0.size() || x0.size() != zdiag0.size())
        throw std::invalid_argument("initial_dt: length mismatch");
    double denom = 0.0;
    for (std::size_t i = 0; i < zdiag0.size(); ++i) denom += zdiag0[i] * grad0[i];
    const double candidate = dot(x0, grad0) / denom;
    if (std::isfinite(candidate) && candidate > 0.0 && candidate <= cfg.dt_max)
        return candidate;
    return cfg.dt_fallback;
}

namespace {

struct Trial {
    Vector x;
    double f = 0.0;
    Vector grad;
    double max_lte = 0.0;
    bool finite = false;
};

Trial evaluate_trial(const CountedProblem& problem, const Vector& x, const Vector& grad_x,
                     const Vector& zdiag, double dt) {
    Trial t;
    t.x = trial_step(x, zdiag, grad_x, dt);
    t.f = problem.value(t.x);
    t.grad = problem.gradient(t.x);
    double m = 0.0;
    for (std::size_t i = 0; i < grad_x.size(); ++i)
        m = std::max(m, 0.5 * dt * std::abs(grad_x[i] - t.grad[i]));
    t.max_lte = m;
    t.finite = std::isfinite(t.f) && all_finite(t.grad) && std::isfinite(t.max_lte);
    return t;
}

}  // namespace

StepOutcome eatss(const CountedProblem& problem, const Vector& x, double f_x,
                  const Vector& grad_x, const Vector& zdiag, double dt_init,
                  const StepperConfig& cfg) {
    double dt = dt_init;
    Trial t = evaluate_trial(problem, x, grad_x, zdiag, dt);
    int grow = 0;
    int shrink = 0;

    while (t.finite && t.max_lte < cfg.eta && t.f < f_x && grow < cfg.max_grow &&
           dt * cfg.beta <= cfg.dt_max) {
        dt *= cfg.beta;
        t = evaluate_trial(problem, x, grad_x, zdiag, dt);
        ++grow;
    }
    while ((!t.finite || t.max_lte > cfg.eta || t.f > f_x) && shrink < cfg.max_shrink &&
           dt > cfg.dt_min) {
        dt *= cfg.alpha;
        t = evaluate_trial(problem, x, grad_x, zdiag, dt);
        ++shrink;
    }

    if (dt < cfg.dt_min) {
        dt = cfg.dt_min;
        t = evaluate_trial(problem, x, grad_x, zdiag, dt);
    }
    const bool violating = !t.finite || t.max_lte > cfg.eta || t.f > f_x;

    StepOutcome out;
    out.dt = dt;
    out.x_next = std::move(t.x);
    out.f_next = t.f;
    out.grad_next = std::move(t.grad);
    out.max_lte = t.max_lte;
    out.grow_iters = grow;
    out.shrink_iters = shrink;
    out.floored = violating;
    return out;
}

}  // namespace ecco
