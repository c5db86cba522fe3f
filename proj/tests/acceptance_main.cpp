// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ecco/baselines.hpp"
#include "ecco/control.hpp"
#include "ecco/problems.hpp"
#include "ecco/report_io.hpp"
#include "ecco/solver.hpp"
#include "ecco/stepper.hpp"

using namespace ecco;

namespace {

struct Cell {
    std::string problem;
    int dim;
    Vector x0;
    bool unimodal;  // terminal point must sit near a known critical point
};

std::vector<Cell> experiment_cells() {
    std::vector<Cell> cells;
    for (const Vector& s : {Vector{-2, -2}, Vector{0, 0}, Vector{-5, -5}})
        cells.push_back({"rosenbrock", 2, s, true});
    for (const Vector& s : {Vector{1, 1}, Vector{20, 20}, Vector{-5, -5}})
        cells.push_back({"himmelblau", 2, s, false});
    for (const Vector& s : {Vector{5, 5}, Vector{5, -5}, Vector{-2, -2}})
        cells.push_back({"booth", 2, s, true});
    for (const Vector& s : {Vector{1, 1}, Vector{0, -1}, Vector{-1, -1}})
        cells.push_back({"three_hump", 2, s, true});
    cells.push_back({"rastrigin", 2, {0.5, 0.5}, false});
    cells.push_back({"ext_wood", 8, Vector(8, 2.0), true});
    cells.push_back({"ext_wood", 8, Vector(8, 10.0), true});
    return cells;
}

struct Captured {
    RunReport report;
    std::vector<Vector> iterates;
    std::vector<double> dts;
    std::vector<Vector> zdiags;
};

Captured run_captured(const ObjectiveProblem& problem, const Vector& x0,
                      const SolverConfig& cfg) {
    Captured cap;
    SolverCallbacks cb;
    cb.on_step = [&](const IterationRecord& rec, const Vector& x, const Vector& z) {
        cap.iterates.push_back(x);
        cap.dts.push_back(rec.dt);
        cap.zdiags.push_back(z);
    };
    cap.report = ecco_minimize(problem, x0, cfg, &cb);
    return cap;
}

double dist_to_nearest_critical(const ObjectiveProblem& p, const Vector& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& c : p.known_critical_points) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

ObjectiveProblem half_square() {
    ObjectiveProblem p;
    p.name = "half_square";
    p.dim = 1;
    p.value = [](const Vector& v) { return 0.5 * v[0] * v[0]; };
    p.gradient = [](const Vector& v) { return Vector{v[0]}; };
    return p;
}

struct Harness {
    int failures = 0;

    void report(int id, bool pass, const std::string& detail) {
        std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion 11 helpers ----

double time_once(int n, bool full, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector g(n);
    for (auto& v : g) v = u(rng);
    ControlPolicy policy;
    volatile double sink = 0.0;

    if (full) {
        SquareMatrix h(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h(i, j) = u(rng);
        policy.kind = ControlKind::full_hessian;
        const int reps = std::max(1, (1 << 22) / (n * n));
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r) {
            const Vector z = full_control_diag(g, h, policy);
            sink = sink + z[0];
        }
        return seconds_since(t0) / reps;
    }
    policy.kind = ControlKind::approximate;
    ControlState state;
    state.prev_gradient = g;
    state.prev_dt = 0.01;
    Vector g2 = g;
    for (auto& v : g2) v += 0.01 * u(rng);
    const int reps = std::max(64, (1 << 22) / n);
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) {
        const Vector z = approx_control_diag(g2, state, policy);
        sink = sink + z[0];
    }
    (void)sink;
    return seconds_since(t0) / reps;
}

double measured_slope(bool full) {
    std::mt19937_64 rng(full ? 101 : 202);
    std::vector<double> lx, ly;
    for (int n = 64; n <= 4096; n *= 2) {
        std::vector<double> samples;
        for (int s = 0; s < 5; ++s) samples.push_back(time_once(n, full, rng));
        std::sort(samples.begin(), samples.end());
        lx.push_back(std::log2(static_cast<double>(n)));
        ly.push_back(std::log2(samples[samples.size() / 2]));
    }
    const double m = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

int main() {
    Harness h;
    const auto cells = experiment_cells();
    SolverConfig defaults;  // delta=1, alpha=0.9, beta=1.1, eta=0.1, eps=1e-4

    // ---- criterion 1: the scalar demo reaches the -0.2 steady state ----
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Captured demo = run_captured(demo_quadratic(), {1.0}, defaults);
        const double secs = seconds_since(t0);
        const double err = std::abs(demo.report.x_final[0] + 0.2);
        std::ostringstream os;
        os << "demo fixed point: |x+0.2|=" << err << " iters=" << demo.report.iters
           << " time=" << secs << "s";
        h.report(1, demo.report.status == RunStatus::converged && err <= 1e-3 && secs < 1.0,
                 os.str());
    }

    // ---- criterion 2: all 15 cells converge tightly with defaults ----
    std::vector<Captured> full_runs;
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::ostringstream detail;
        for (const Cell& c : cells) {
            const ObjectiveProblem p = catalog(c.problem, c.dim);
            full_runs.push_back(run_captured(p, c.x0, defaults));
            const RunReport& rep = full_runs.back().report;
            bool cell_ok = rep.status == RunStatus::converged && rep.grad_norm_final <= 1e-2;
            if (c.unimodal)
                cell_ok = cell_ok && dist_to_nearest_critical(p, rep.x_final) <= 1e-2;
            if (!cell_ok) {
                ok = false;
                detail << " [" << c.problem << " from " << c.x0[0] << "," << c.x0[1]
                       << ": status=" << to_string(rep.status)
                       << " |g|=" << rep.grad_norm_final << "]";
            }
        }
        const double secs = seconds_since(t0);
        std::ostringstream os;
        os << "15-cell convergence at defaults, time=" << secs << "s" << detail.str();
        h.report(2, ok && secs < 120.0, os.str());
    }

    // ---- criterion 3: iteration-count ordering vs Armijo GD and identity ----
    std::vector<Captured> identity_runs;
    {
        int wins = 0;
        bool identity_ok = true;
        std::ostringstream detail;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const ObjectiveProblem p = catalog(cells[i].problem, cells[i].dim);
            BaselineConfig bcfg;
            bcfg.method = BaselineMethod::gd_armijo;
            const RunReport armijo = gd_armijo(p, cells[i].x0, bcfg);
            SolverConfig icfg = defaults;
            icfg.control.kind = ControlKind::identity;
            identity_runs.push_back(run_captured(p, cells[i].x0, icfg));
            const int full_iters = full_runs[i].report.iters;
            detail << " [" << cells[i].problem << ": full=" << full_iters
                   << " armijo=" << armijo.iters
                   << " identity=" << identity_runs[i].report.iters << "]";
            if (full_iters < armijo.iters) ++wins;
            if (full_iters > 2 * identity_runs[i].report.iters) identity_ok = false;
        }
        std::ostringstream os;
        os << "speed ordering: ECCO-full beats Armijo on " << wins
           << "/15 cells (need >=10); identity-2x clause "
           << (identity_ok ? "holds" : "fails") << ";" << detail.str();
        h.report(3, wins >= 10 && identity_ok, os.str());
    }

    // ---- criterion 4: full vs approximate control on Rastrigin overlap ----
    Captured ras_full, ras_approx;
    {
        const ObjectiveProblem ras = catalog("rastrigin");
        ras_full = run_captured(ras, {0.5, 0.5}, defaults);
        SolverConfig acfg = defaults;
        acfg.control.kind = ControlKind::approximate;
        ras_approx = run_captured(ras, {0.5, 0.5}, acfg);
        const double pt_dist = std::hypot(
            ras_full.report.x_final[0] - ras_approx.report.x_final[0],
            ras_full.report.x_final[1] - ras_approx.report.x_final[1]);
        double worst_rel = 0.0;
        const std::size_t m =
            std::min(ras_full.report.trace.size(), ras_approx.report.trace.size());
        for (std::size_t k = 0; k < m; ++k) {
            const double a = ras_full.report.trace[k].f;
            const double b = ras_approx.report.trace[k].f;
            worst_rel = std::max(
                worst_rel, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}));
        }
        std::ostringstream os;
        os << "full/approx Rastrigin: terminal distance=" << pt_dist
           << " (need <=1e-3), worst matched-iteration rel f gap=" << worst_rel
           << " (need <=0.05), full ends at (" << ras_full.report.x_final[0] << ","
           << ras_full.report.x_final[1] << "), approx at (" << ras_approx.report.x_final[0]
           << "," << ras_approx.report.x_final[1] << ")";
        h.report(4, pt_dist <= 1e-3 && worst_rel <= 0.05, os.str());
    }

    // ---- criterion 5: descent and LTE compliance recomputed from iterates ----
    {
        bool ok = true;
        std::ostringstream detail;
        auto check_run = [&](const std::string& label, const ObjectiveProblem& p,
                             const Vector& x0, const Captured& cap) {
            Vector prev = x0;
            Vector gprev = p.gradient(prev);
            double fprev = p.value(prev);
            for (std::size_t k = 0; k < cap.iterates.size(); ++k) {
                const Vector& x = cap.iterates[k];
                const double f = p.value(x);
                const Vector g = p.gradient(x);
                if (f > fprev) {
                    ok = false;
                    detail << " [" << label << ": ascent at step " << k + 1 << "]";
                    return;
                }
                if (x != prev && norm_inf(lte(cap.dts[k], gprev, g)) > defaults.stepper.eta) {
                    ok = false;
                    detail << " [" << label << ": LTE violated at step " << k + 1 << "]";
                    return;
                }
                prev = x;
                gprev = g;
                fprev = f;
            }
        };
        check_run("demo", demo_quadratic(), {1.0},
                  run_captured(demo_quadratic(), {1.0}, defaults));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const ObjectiveProblem p = catalog(cells[i].problem, cells[i].dim);
            check_run(cells[i].problem + "/full", p, cells[i].x0, full_runs[i]);
            check_run(cells[i].problem + "/identity", p, cells[i].x0, identity_runs[i]);
        }
        const ObjectiveProblem ras = catalog("rastrigin");
        check_run("rastrigin/full", ras, {0.5, 0.5}, ras_full);
        check_run("rastrigin/approx", ras, {0.5, 0.5}, ras_approx);
        h.report(5, ok,
                 "descent and LTE compliance recomputed over every accepted step" +
                     detail.str());
    }

    // ---- criterion 6: control diagonals stay inside [1, cap] ----
    {
        bool ok = true;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        auto scan = [&](const Captured& cap) {
            for (const Vector& z : cap.zdiags)
                for (double v : z) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                    if (v < 1.0 || v > defaults.control.cap) ok = false;
                }
        };
        for (const Captured& cap : full_runs) scan(cap);
        for (const Captured& cap : identity_runs) scan(cap);
        scan(ras_full);
        scan(ras_approx);

        SquareMatrix hess(3);
        for (int i = 0; i < 3; ++i) hess(i, i) = 4.0 + i;
        ControlPolicy fullp;
        fullp.kind = ControlKind::full_hessian;
        ControlPolicy approxp;
        approxp.kind = ControlKind::approximate;
        ControlState st;
        st.prev_gradient = Vector{1.0, 2.0, 3.0};
        st.prev_dt = 0.1;
        const bool zero_ok =
            full_control_diag(Vector(3, 0.0), hess, fullp) == Vector(3, 1.0) &&
            approx_control_diag(Vector(3, 0.0), st, approxp) == Vector(3, 1.0);
        std::ostringstream os;
        os << "recorded z range [" << lo << ", " << hi << "] within [1, "
           << defaults.control.cap << "]; zero-gradient gives exactly 1";
        h.report(6, ok && zero_ok, os.str());
    }

    // ---- criterion 7: robustness over eta and delta; fixed-step divergence ----
    {
        bool ok = true;
        std::ostringstream detail;
        const auto t0 = std::chrono::steady_clock::now();
        for (double eta : {1e-3, 1e-2, 1e-1, 1.0}) {
            for (double delta : {0.1, 1.0, 10.0}) {
                for (const Cell& c : cells) {
                    SolverConfig cfg = defaults;
                    cfg.stepper.eta = eta;
                    cfg.control.delta = delta;
                    cfg.max_iters = 2000000;
                    const RunReport rep = ecco_minimize(catalog(c.problem, c.dim), c.x0, cfg);
                    if (rep.status != RunStatus::converged) {
                        ok = false;
                        detail << " [" << c.problem << " eta=" << eta << " delta=" << delta
                               << ": " << to_string(rep.status) << "]";
                    }
                }
            }
        }
        BaselineConfig bad;
        bad.method = BaselineMethod::gd_fixed;
        bad.lr = 2.5;
        const RunReport diverged = gd_fixed(half_square(), {1.0}, bad);
        if (!diverged.diverged) {
            ok = false;
            detail << " [gd_fixed lr=2.5 not flagged diverged]";
        }
        std::ostringstream os;
        os << "eta x delta robustness sweep plus fixed-step divergence flag, time="
           << seconds_since(t0) << "s" << detail.str();
        h.report(7, ok, os.str());
    }

    // ---- criterion 8: fixed-step FE oscillates where EATSS stays monotone ----
    {
        const ObjectiveProblem ros = catalog("rosenbrock");
        BaselineConfig fixed;
        fixed.method = BaselineMethod::gd_fixed;
        fixed.lr = 0.02;
        fixed.max_iters = 500;
        fixed.eps = 0.0;  // keep the raw 500-step trajectory
        const RunReport fe = gd_fixed(ros, {0.0, 0.0}, fixed);
        bool nonmono = false;
        for (std::size_t i = 1; i < fe.trace.size() && !nonmono; ++i)
            if (fe.trace[i].f > fe.trace[i - 1].f || !std::isfinite(fe.trace[i].f))
                nonmono = true;

        const Captured& eatss_run = identity_runs[1];  // rosenbrock from (0,0)
        bool mono = eatss_run.report.status == RunStatus::converged;
        for (std::size_t i = 1; i < eatss_run.report.trace.size(); ++i)
            if (eatss_run.report.trace[i].f > eatss_run.report.trace[i - 1].f) mono = false;
        std::ostringstream os;
        os << "fixed dt=0.02 non-monotone within 500 steps: " << (nonmono ? "yes" : "no")
           << "; identity EATSS monotone and converged: " << (mono ? "yes" : "no");
        h.report(8, nonmono && mono, os.str());
    }

    // ---- criterion 9: oracle suites ----
    {
        bool ok = true;
        std::ostringstream detail;

        std::mt19937_64 rng(501);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (const std::string name : {"rosenbrock", "himmelblau", "booth", "three_hump",
                                       "rastrigin", "ext_wood", "demo_quadratic"}) {
            const ObjectiveProblem p = catalog(name);
            for (int k = 0; k < 20 && ok; ++k) {
                Vector x(p.dim);
                for (auto& v : x) v = u(rng);
                const Vector g = p.gradient(x);
                const Vector gf = fd_gradient(p, x);
                const double tol = 1e-5 * std::max(1.0, norm2(g));
                for (int i = 0; i < p.dim; ++i)
                    if (std::abs(g[i] - gf[i]) > tol) ok = false;
            }
            for (int k = 0; k < 10 && ok; ++k) {
                Vector x(p.dim);
                for (auto& v : x) v = u(rng);
                const SquareMatrix hess = p.hessian(x);
                const SquareMatrix hf = fd_hessian(p, x);
                for (int i = 0; i < p.dim; ++i)
                    for (int j = 0; j < p.dim; ++j)
                        if (std::abs(hess(i, j) - hf(i, j)) >
                            1e-4 * std::max(1.0, std::abs(hess(i, j))))
                            ok = false;
            }
            if (!ok) {
                detail << " [fd oracle mismatch on " << name << "]";
                break;
            }
        }

        const ObjectiveProblem hs = half_square();
        EvalCounters c;
        CountedProblem counted(hs, c);
        const StepOutcome out = eatss(counted, {1.0}, 0.5, {1.0}, {1.0}, 0.1, {});
        if (std::abs(out.dt - 0.413547) > 1e-6) {
            ok = false;
            detail << " [EATSS dt=" << out.dt << "]";
        }

        ObjectiveProblem sq;
        sq.dim = 1;
        sq.value = [](const Vector& v) { return v[0] * v[0]; };
        sq.gradient = [](const Vector& v) { return Vector{2.0 * v[0]}; };
        BaselineConfig one;
        one.max_iters = 1;
        one.lr = 0.1;
        one.method = BaselineMethod::adam;
        if (std::abs(adam(sq, {1.0}, one).x_final[0] - 0.9000000005) > 1e-9) {
            ok = false;
            detail << " [adam first step off]";
        }
        one.method = BaselineMethod::rmsprop;
        one.decay = 0.9;
        const double rms_expect = 1.0 - 0.1 * 2.0 / (std::sqrt(0.4) + 1e-8);
        if (std::abs(rmsprop(sq, {1.0}, one).x_final[0] - rms_expect) > 1e-9) {
            ok = false;
            detail << " [rmsprop first step off]";
        }
        h.report(9, ok, "finite-difference, EATSS and Adam/RMSProp oracles" + detail.str());
    }

    // ---- criterion 10: toy minibatch training ----
    {
        const auto t0 = std::chrono::steady_clock::now();
        const ToyMlp mlp = toy_mlp(7, 200, 25);
        SolverConfig cfg;
        cfg.control.kind = ControlKind::approximate;
        cfg.eps = 1e-12;  // let the epoch budget drive termination
        cfg.seed = 0;
        const Vector x0 = mlp.initial_params();
        const double loss0 = mlp.full_loss(x0);
        const RunReport rep =
            ecco_minibatch(mlp.problem(), x0, cfg, 50, mlp.batches_per_epoch());
        const RunReport rep2 =
            ecco_minibatch(mlp.problem(), x0, cfg, 50, mlp.batches_per_epoch());
        const double loss1 = mlp.full_loss(rep.x_final);
        const double acc = mlp.accuracy(rep.x_final);
        const bool identical =
            trace_to_csv(rep.trace) == trace_to_csv(rep2.trace) &&
            rep.x_final == rep2.x_final;
        const double secs = seconds_since(t0);
        std::ostringstream os;
        os << "toy minibatch: loss " << loss0 << " -> " << loss1 << " ("
           << 100.0 * (1.0 - loss1 / loss0) << "% drop, need >=50%), accuracy=" << acc
           << " (need >=0.9), bit-identical rerun=" << (identical ? "yes" : "no")
           << ", time=" << secs << "s";
        h.report(10, loss1 <= 0.5 * loss0 && acc >= 0.9 && identical && secs < 30.0,
                 os.str());
    }

    // ---- criterion 11: control evaluation cost scaling ----
    {
        const double s_approx = measured_slope(false);
        const double s_full = measured_slope(true);
        std::ostringstream os;
        os << "log-log cost slopes over n=64..4096: approx=" << s_approx
           << " (need <=1.4), full=" << s_full << " (need <=2.4)";
        h.report(11, s_approx <= 1.4 && s_full <= 2.4, os.str());
    }

    if (h.failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criterion(s) failed\n", h.failures);
    }
    return h.failures == 0 ? 0 : 1;
}
