#include "ecco/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ecco {

const char* to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::gd_fixed: return "gd_fixed";
        case BaselineMethod::gd_armijo: return "gd_armijo";
        case BaselineMethod::adam: return "adam";
        case BaselineMethod::rmsprop: return "rmsprop";
    }
    return "unknown";
}

std::optional<BaselineMethod> baseline_from_string(const std::string& name) {
    if (name == "gd_fixed") return BaselineMethod::gd_fixed;
    if (name == "gd_armijo") return BaselineMethod::gd_armijo;
    if (name == "adam") return BaselineMethod::adam;
    if (name == "rmsprop") return BaselineMethod::rmsprop;
    return std::nullopt;
}

namespace {

std::string echo_config(const BaselineConfig& cfg) {
    std::ostringstream os;
    os << "method=" << to_string(cfg.method) << " lr=" << cfg.lr << " armijo_c=" << cfg.armijo_c
       << " armijo_shrink=" << cfg.armijo_shrink << " alpha0=" << cfg.alpha0
       << " beta1=" << cfg.beta1 << " beta2=" << cfg.beta2 << " decay=" << cfg.decay
       << " eps_div=" << cfg.eps_div << " eps=" << cfg.eps << " max_iters=" << cfg.max_iters;
    return os.str();
}

void validate(const BaselineConfig& cfg) {
    switch (cfg.method) {
        case BaselineMethod::gd_fixed:
            if (!(cfg.lr > 0.0)) throw std::invalid_argument("gd_fixed: lr must be positive");
            break;
        case BaselineMethod::gd_armijo:
            if (!(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0))
                throw std::invalid_argument("gd_armijo: armijo_c must be in (0,1)");
            if (!(cfg.armijo_shrink > 0.0 && cfg.armijo_shrink < 1.0))
                throw std::invalid_argument("gd_armijo: shrink must be in (0,1)");
            if (!(cfg.alpha0 > 0.0)) throw std::invalid_argument("gd_armijo: alpha0 must be positive");
            break;
        case BaselineMethod::adam:
            if (!(cfg.lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
            if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
                throw std::invalid_argument("adam: beta1, beta2 must be in [0,1)");
            break;
        case BaselineMethod::rmsprop:
            if (!(cfg.lr > 0.0)) throw std::invalid_argument("rmsprop: lr must be positive");
            if (!(cfg.decay >= 0.0 && cfg.decay < 1.0))
                throw std::invalid_argument("rmsprop: decay must be in [0,1)");
            break;
    }
}

struct BaselineLoop {
    const ObjectiveProblem* problem;
    const BaselineConfig* cfg;
    RunReport report;
    Vector x;
    double fx = 0.0;
    Vector gx;
    double f0_scale = 0.0;
    double t = 0.0;
    int streak = 0;

    explicit BaselineLoop(const ObjectiveProblem& p, const Vector& x0, const BaselineConfig& c)
        : problem(&p), cfg(&c), x(x0) {
        if (static_cast<int>(x0.size()) != p.dim)
            throw std::invalid_argument("baseline: x0 length does not match problem.dim");
        report.config_echo = echo_config(c);
        CountedProblem counted(p, report.counters);
        fx = counted.value(x);
        gx = counted.gradient(x);
        f0_scale = 1e12 * (1.0 + std::abs(fx));
    }

    bool diverged_value(double f) const { return !std::isfinite(f) || f > f0_scale; }

    // Returns true when the run should stop. step_scale plays the role of the
    // time step in the shared steady-state rule.
    bool account(int iter, double step_scale, double f_prev, double q_prev, int backtracks) {
        CountedProblem counted(*problem, report.counters);
        const double q = stored_charge_sq(gx);
        IterationRecord rec{iter, t, step_scale, fx, norm2(gx), 0.0, q, 0, backtracks,
                            std::nullopt};
        bool stop = false;
        if (diverged_value(fx)) {
            report.diverged = true;
            report.status = RunStatus::max_iters;
            stop = true;
        } else {
            const double bound = cfg->eps * std::min(1.0, step_scale);
            streak = (std::abs(f_prev - fx) <= bound && std::abs(q_prev - q) <= bound)
                         ? streak + 1
                         : 0;
            if (streak >= 2) {
                report.status = RunStatus::converged;
                stop = true;
            } else if (iter >= cfg->max_iters) {
                report.status = RunStatus::max_iters;
                stop = true;
            }
        }
        if (stop || cfg->record_every <= 1 || iter % cfg->record_every == 0)
            report.trace.push_back(rec);
        return stop;
    }

    RunReport finish(int iters) {
        report.x_final = x;
        report.f_final = fx;
        report.grad_norm_final = norm2(gx);
        report.iters = iters;
        return std::move(report);
    }
};

}  // namespace

RunReport gd_fixed(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg) {
    validate(cfg);
    BaselineLoop loop(problem, x0, cfg);
    CountedProblem counted(problem, loop.report.counters);
    int iter = 0;
    while (iter < cfg.max_iters) {
        const double f_prev = loop.fx;
        const double q_prev = stored_charge_sq(loop.gx);
        for (std::size_t i = 0; i < loop.x.size(); ++i) loop.x[i] -= cfg.lr * loop.gx[i];
        loop.fx = counted.value(loop.x);
        loop.gx = counted.gradient(loop.x);
        loop.t += cfg.lr;
        ++iter;
        if (loop.account(iter, cfg.lr, f_prev, q_prev, 0)) break;
    }
    return loop.finish(iter);
}

RunReport gd_armijo(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg) {
    validate(cfg);
    BaselineLoop loop(problem, x0, cfg);
    CountedProblem counted(problem, loop.report.counters);
    int iter = 0;
    while (iter < cfg.max_iters) {
        const double f_prev = loop.fx;
        const double q_prev = stored_charge_sq(loop.gx);
        const double gg = stored_charge_sq(loop.gx);
        double a = cfg.alpha0;
        int k = 0;
        Vector xt(loop.x.size());
        double ft = 0.0;
        bool accepted = false;
        while (k <= 200) {
            for (std::size_t i = 0; i < loop.x.size(); ++i)
                xt[i] = loop.x[i] - a * loop.gx[i];
            ft = counted.value(xt);
            if (std::isfinite(ft) && ft <= loop.fx - cfg.armijo_c * a * gg) {
                accepted = true;
                break;
            }
            a *= cfg.armijo_shrink;
            ++k;
        }
        ++iter;
        if (!accepted) {
            loop.report.status = RunStatus::step_floored;
            loop.report.trace.push_back({iter, loop.t, 0.0, loop.fx, norm2(loop.gx), 0.0,
                                         stored_charge_sq(loop.gx), 0, k, std::nullopt});
            break;
        }
        loop.x = xt;
        loop.fx = ft;
        loop.gx = counted.gradient(loop.x);
        loop.t += a;
        if (loop.account(iter, a, f_prev, q_prev, k)) break;
    }
    return loop.finish(iter);
}

RunReport adam(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg) {
    validate(cfg);
    BaselineLoop loop(problem, x0, cfg);
    CountedProblem counted(problem, loop.report.counters);
    Vector m(x0.size(), 0.0), v(x0.size(), 0.0);
    int iter = 0;
    while (iter < cfg.max_iters) {
        const double f_prev = loop.fx;
        const double q_prev = stored_charge_sq(loop.gx);
        ++iter;
        const double bc1 = 1.0 - std::pow(cfg.beta1, iter);
        const double bc2 = 1.0 - std::pow(cfg.beta2, iter);
        for (std::size_t i = 0; i < loop.x.size(); ++i) {
            const double g = loop.gx[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            loop.x[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps_div);
        }
        loop.fx = counted.value(loop.x);
        loop.gx = counted.gradient(loop.x);
        loop.t += cfg.lr;
        if (loop.account(iter, cfg.lr, f_prev, q_prev, 0)) break;
    }
    return loop.finish(iter);
}

RunReport rmsprop(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg) {
    validate(cfg);
    BaselineLoop loop(problem, x0, cfg);
    CountedProblem counted(problem, loop.report.counters);
    Vector v(x0.size(), 0.0);
    int iter = 0;
    while (iter < cfg.max_iters) {
        const double f_prev = loop.fx;
        const double q_prev = stored_charge_sq(loop.gx);
        for (std::size_t i = 0; i < loop.x.size(); ++i) {
            const double g = loop.gx[i];
            v[i] = cfg.decay * v[i] + (1.0 - cfg.decay) * g * g;
            loop.x[i] -= cfg.lr * g / (std::sqrt(v[i]) + cfg.eps_div);
        }
        loop.fx = counted.value(loop.x);
        loop.gx = counted.gradient(loop.x);
        loop.t += cfg.lr;
        ++iter;
        if (loop.account(iter, cfg.lr, f_prev, q_prev, 0)) break;
    }
    return loop.finish(iter);
}

RunReport run_baseline(const ObjectiveProblem& problem, const Vector& x0,
                       const BaselineConfig& cfg) {
    switch (cfg.method) {
        case BaselineMethod::gd_fixed: return gd_fixed(problem, x0, cfg);
        case BaselineMethod::gd_armijo: return gd_armijo(problem, x0, cfg);
        case BaselineMethod::adam: return adam(problem, x0, cfg);
        case BaselineMethod::rmsprop: return rmsprop(problem, x0, cfg);
    }
    throw std::logic_error("run_baseline: unknown method");
}

namespace {

void apply_axis(BaselineConfig& cfg, const std::string& axis, double v) {
    if (axis == "lr") cfg.lr = v;
    else if (axis == "beta1") cfg.beta1 = v;
    else if (axis == "beta2") cfg.beta2 = v;
    else if (axis == "decay") cfg.decay = v;
    else if (axis == "armijo_c") cfg.armijo_c = v;
    else if (axis == "alpha0") cfg.alpha0 = v;
    else throw std::invalid_argument("grid_search: unknown axis '" + axis + "'");
}

}  // namespace

GridSearchResult grid_search(BaselineMethod method, const ObjectiveProblem& problem,
                             const Vector& x0, const GridAxes& grids, int budget_per_point,
                             const BaselineConfig& base) {
    if (grids.empty()) throw std::invalid_argument("grid_search: empty grid");
    std::vector<std::string> axes;
    std::vector<std::vector<double>> values;
    for (const auto& [axis, vals] : grids) {
        if (vals.empty()) throw std::invalid_argument("grid_search: empty axis '" + axis + "'");
        axes.push_back(axis);
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        values.push_back(std::move(sorted));
    }

    GridSearchResult result;
    std::vector<std::size_t> idx(axes.size(), 0);
    std::size_t best_rank = 0;
    bool have_best = false;
    while (true) {
        BaselineConfig cfg = base;
        cfg.method = method;
        cfg.max_iters = budget_per_point;
        for (std::size_t a = 0; a < axes.size(); ++a) apply_axis(cfg, axes[a], values[a][idx[a]]);

        GridPoint point;
        point.config = cfg;
        try {
            const RunReport rep = run_baseline(problem, x0, cfg);
            point.status = rep.status;
            point.diverged = rep.diverged || !std::isfinite(rep.f_final);
            point.f_final = rep.f_final;
            point.iters = rep.iters;
        } catch (const std::invalid_argument&) {
            point.diverged = true;  // out-of-domain grid value, e.g. beta = 1
            point.f_final = std::numeric_limits<double>::infinity();
        }
        result.table.push_back(point);

        const std::size_t rank = result.table.size() - 1;
        if (!point.diverged) {
            const GridPoint* best = have_best ? &result.table[best_rank] : nullptr;
            const bool better =
                !best || point.f_final < best->f_final ||
                (point.f_final == best->f_final && point.iters < best->iters);
            if (better) {
                best_rank = rank;
                have_best = true;
            }
        }

        bool rolled_over = true;
        for (std::size_t a = axes.size(); a > 0;) {
            --a;
            if (++idx[a] < values[a].size()) {
                rolled_over = false;
                break;
            }
            idx[a] = 0;
        }
        if (rolled_over) break;
    }

    if (have_best) {
        result.best = result.table[best_rank].config;
    } else {
        result.all_diverged = true;
    }
    return result;
}

}  // namespace ecco
