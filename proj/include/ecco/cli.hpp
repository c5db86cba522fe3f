#pragma once

// Command-line front end: single runs, benchmark suites from a JSON
// manifest, hyperparameter sweeps, and grid search. All commands write
// bit-exact CSV/JSON artifacts. The ECCO_OUT_DIR environment variable sets
// the default output directory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecco/baselines.hpp"
#include "ecco/solver.hpp"

namespace ecco {

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 success/converged, 1 usage error, 2 max_iters, 3 step_floored.
int cli_main(int argc, const char* const* argv);

/// One resolvable (problem, start, method, config, seed) benchmark cell.
struct ManifestEntry {
    std::string problem;
    std::optional<int> dim;
    Vector x0;
    std::string method;
    std::string config_json;  // raw object, applied over the defaults
    std::uint64_t seed = 0;
};

struct SummaryRow {
    int index = 0;
    std::string problem;
    std::string start;
    std::string method;
    std::string status;  // run status, "diverged", or "error: ..."
    int iters = 0;
    double f_final = 0.0;
    double grad_norm_final = 0.0;
    std::int64_t n_f = 0;
    std::int64_t n_grad = 0;
    std::int64_t n_hess = 0;
    double wall_ms = 0.0;
};

std::vector<ManifestEntry> parse_manifest(const std::string& json_text);

/// Runs all entries with the given worker count; per-entry failures become
/// error rows. Traces are written under out_dir when non-empty. Rows come
/// back ordered by manifest index regardless of parallelism.
std::vector<SummaryRow> run_bench(const std::vector<ManifestEntry>& entries, int parallelism,
                                  const std::string& out_dir);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

/// Known method names: ecco_full, ecco_approx, ecco_identity, gd_fixed,
/// gd_armijo, adam, rmsprop.
bool is_known_method(const std::string& method);

/// Preset grids: gd_paper, adam_paper, rmsprop_paper, armijo_paper.
GridAxes grid_preset(const std::string& name);

}  // namespace ecco
