#pragma once

// Comparison optimizers sharing the solver's report schema: fixed-step GD,
// GD with Armijo backtracking, Adam, RMSProp, and the grid-search protocol.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecco/core.hpp"
#include "ecco/solver.hpp"

namespace ecco {

enum class BaselineMethod { gd_fixed, gd_armijo, adam, rmsprop };

const char* to_string(BaselineMethod m);
std::optional<BaselineMethod> baseline_from_string(const std::string& name);

struct BaselineConfig {
    BaselineMethod method = BaselineMethod::gd_fixed;
    double lr = 0.1;
    double armijo_c = 1e-4;
    double armijo_shrink = 0.5;
    double alpha0 = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double decay = 0.9;
    double eps_div = 1e-8;
    double eps = 1e-4;      // shared stop rule, as in SolverConfig
    int max_iters = 100000;
    int record_every = 1;
};

RunReport gd_fixed(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg);
RunReport gd_armijo(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg);
RunReport adam(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg);
RunReport rmsprop(const ObjectiveProblem& problem, const Vector& x0, const BaselineConfig& cfg);

RunReport run_baseline(const ObjectiveProblem& problem, const Vector& x0,
                       const BaselineConfig& cfg);

/// Axis values per hyperparameter name (lr, beta1, beta2, decay, armijo_c).
/// Missing axes keep the base config's value.
using GridAxes = std::map<std::string, std::vector<double>>;

struct GridPoint {
    BaselineConfig config;
    RunStatus status = RunStatus::max_iters;
    bool diverged = false;
    double f_final = 0.0;
    int iters = 0;
};

struct GridSearchResult {
    std::optional<BaselineConfig> best;  // empty when every point diverged
    std::vector<GridPoint> table;
    bool all_diverged = false;
};

/// Runs every grid point for budget_per_point iterations and returns the
/// config minimizing final f; ties break on fewer iterations, then on the
/// enumeration (lexicographic) order of the sorted axes. Diverged points
/// rank below every finished one.
GridSearchResult grid_search(BaselineMethod method, const ObjectiveProblem& problem,
                             const Vector& x0, const GridAxes& grids, int budget_per_point,
                             const BaselineConfig& base = {});

}  // namespace ecco
