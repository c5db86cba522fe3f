#include "ecco/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecco/problems.hpp"
#include "ecco/report_io.hpp"

namespace ecco {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string default_out_dir() {
    const char* env = std::getenv("ECCO_OUT_DIR");
    return env && *env ? std::string(env) : std::string(".");
}

Vector parse_vector(const std::string& csv) {
    Vector out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(parse_double(tok));
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated vector");
    return out;
}

std::string join_vector(const Vector& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += format_double(v[i]);
    }
    return out;
}

ControlKind control_from_name(const std::string& name) {
    if (name == "identity") return ControlKind::identity;
    if (name == "full") return ControlKind::full_hessian;
    if (name == "approx") return ControlKind::approximate;
    throw std::invalid_argument("unknown control '" + name + "'");
}

bool is_ecco_method(const std::string& method) {
    return method == "ecco_full" || method == "ecco_approx" || method == "ecco_identity";
}

void apply_solver_config(SolverConfig& cfg, const ordered_json& j) {
    if (j.contains("eta")) cfg.stepper.eta = j.at("eta").get<double>();
    if (j.contains("alpha")) cfg.stepper.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) cfg.stepper.beta = j.at("beta").get<double>();
    if (j.contains("delta")) cfg.control.delta = j.at("delta").get<double>();
    if (j.contains("normalize")) cfg.control.normalize = j.at("normalize").get<bool>();
    if (j.contains("cap")) cfg.control.cap = j.at("cap").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<int>();
    if (j.contains("record_every")) cfg.record_every = j.at("record_every").get<int>();
}

void apply_baseline_config(BaselineConfig& cfg, const ordered_json& j) {
    if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
    if (j.contains("armijo_c")) cfg.armijo_c = j.at("armijo_c").get<double>();
    if (j.contains("armijo_shrink")) cfg.armijo_shrink = j.at("armijo_shrink").get<double>();
    if (j.contains("alpha0")) cfg.alpha0 = j.at("alpha0").get<double>();
    if (j.contains("beta1")) cfg.beta1 = j.at("beta1").get<double>();
    if (j.contains("beta2")) cfg.beta2 = j.at("beta2").get<double>();
    if (j.contains("decay")) cfg.decay = j.at("decay").get<double>();
    if (j.contains("eps_div")) cfg.eps_div = j.at("eps_div").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<int>();
    if (j.contains("record_every")) cfg.record_every = j.at("record_every").get<int>();
}

RunReport run_method(const std::string& method, const ObjectiveProblem& problem,
                     const Vector& x0, const std::string& config_json, std::uint64_t seed) {
    const ordered_json j =
        config_json.empty() ? ordered_json::object() : ordered_json::parse(config_json);
    if (is_ecco_method(method)) {
        SolverConfig cfg;
        cfg.seed = seed;
        if (method == "ecco_full") cfg.control.kind = ControlKind::full_hessian;
        else if (method == "ecco_approx") cfg.control.kind = ControlKind::approximate;
        else cfg.control.kind = ControlKind::identity;
        apply_solver_config(cfg, j);
        return ecco_minimize(problem, x0, cfg);
    }
    const auto m = baseline_from_string(method);
    if (!m) throw std::invalid_argument("unknown method '" + method + "'");
    BaselineConfig cfg;
    cfg.method = *m;
    apply_baseline_config(cfg, j);
    return run_baseline(problem, x0, cfg);
}

}  // namespace

bool is_known_method(const std::string& method) {
    return is_ecco_method(method) || baseline_from_string(method).has_value();
}

std::vector<ManifestEntry> parse_manifest(const std::string& json_text) {
    const ordered_json j = ordered_json::parse(json_text);
    std::vector<ManifestEntry> entries;
    for (const auto& e : j.at("entries")) {
        ManifestEntry m;
        m.problem = e.at("problem").get<std::string>();
        if (e.contains("dim")) m.dim = e.at("dim").get<int>();
        m.x0 = e.at("x0").get<Vector>();
        m.method = e.at("method").get<std::string>();
        if (e.contains("config")) m.config_json = e.at("config").dump();
        if (e.contains("seed")) m.seed = e.at("seed").get<std::uint64_t>();
        entries.push_back(std::move(m));
    }
    return entries;
}

std::vector<SummaryRow> run_bench(const std::vector<ManifestEntry>& entries, int parallelism,
                                  const std::string& out_dir) {
    std::vector<SummaryRow> rows(entries.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(entries.size())));

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            const ManifestEntry& e = entries[i];
            SummaryRow& row = rows[i];
            row.index = static_cast<int>(i);
            row.problem = e.problem;
            row.start = join_vector(e.x0, ';');
            row.method = e.method;
            try {
                const ObjectiveProblem problem = catalog(e.problem, e.dim);
                const auto t0 = std::chrono::steady_clock::now();
                const RunReport rep = run_method(e.method, problem, e.x0, e.config_json, e.seed);
                const auto t1 = std::chrono::steady_clock::now();
                row.status = rep.diverged ? "diverged" : to_string(rep.status);
                row.iters = rep.iters;
                row.f_final = rep.f_final;
                row.grad_norm_final = rep.grad_norm_final;
                row.n_f = rep.counters.n_f;
                row.n_grad = rep.counters.n_grad;
                row.n_hess = rep.counters.n_hess;
                row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                if (!out_dir.empty()) {
                    std::ostringstream name;
                    name << "run_" << i << "_" << e.problem << "_" << e.method << ".csv";
                    write_text_file((std::filesystem::path(out_dir) / name.str()).string(),
                                    trace_to_csv(rep.trace));
                }
            } catch (const std::exception& ex) {
                row.status = std::string("error: ") + ex.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "problem,start,method,status,iters,f_final,grad_norm_final,n_f,n_grad,n_hess,wall_ms";
    out += '\n';
    for (const auto& r : rows) {
        out += r.problem;
        out += ',';
        out += r.start;
        out += ',';
        out += r.method;
        out += ',';
        out += r.status;
        out += ',';
        out += std::to_string(r.iters);
        out += ',';
        out += format_double(r.f_final);
        out += ',';
        out += format_double(r.grad_norm_final);
        out += ',';
        out += std::to_string(r.n_f);
        out += ',';
        out += std::to_string(r.n_grad);
        out += ',';
        out += std::to_string(r.n_hess);
        out += ',';
        out += format_double(r.wall_ms);
        out += '\n';
    }
    return out;
}

GridAxes grid_preset(const std::string& name) {
    GridAxes axes;
    const auto linspace_step = [](double lo, double hi, double step) {
        std::vector<double> v;
        for (int k = 0;; ++k) {
            const double x = lo + k * step;
            if (x > hi + 1e-12) break;
            v.push_back(x);
        }
        return v;
    };
    if (name == "gd_paper") {
        axes["lr"] = linspace_step(0.001, 1.0, 0.005);
    } else if (name == "adam_paper") {
        axes["lr"] = linspace_step(0.001, 1.0, 0.005);
        axes["beta1"] = linspace_step(0.70, 1.0, 0.01);
        axes["beta2"] = linspace_step(0.70, 1.0, 0.01);
    } else if (name == "rmsprop_paper") {
        axes["lr"] = linspace_step(0.001, 1.0, 0.005);
        axes["decay"] = linspace_step(0.1, 1.0, 0.005);
    } else if (name == "armijo_paper") {
        axes["armijo_c"] = {1e-5, 1e-4, 1e-3, 1e-2};
    } else {
        throw std::invalid_argument("unknown grid preset '" + name + "'");
    }
    return axes;
}

namespace {

struct RunOptions {
    std::string problem;
    std::optional<int> dim;
    std::string x0_csv;
    std::string control = "full";
    double eta = 0.1, delta = 1.0, alpha = 0.9, beta = 1.1, eps = 1e-4;
    int max_iters = 100000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

int do_run(const RunOptions& opt) {
    const ObjectiveProblem problem = catalog(opt.problem, opt.dim);
    Vector x0 = opt.x0_csv.empty() ? problem.default_starts.front() : parse_vector(opt.x0_csv);
    if (static_cast<int>(x0.size()) != problem.dim) {
        std::ostringstream os;
        os << "x0 has dimension " << x0.size() << " but " << problem.name << " needs "
           << problem.dim;
        throw std::invalid_argument(os.str());
    }
    SolverConfig cfg;
    cfg.control.kind = control_from_name(opt.control);
    cfg.control.delta = opt.delta;
    cfg.stepper.eta = opt.eta;
    cfg.stepper.alpha = opt.alpha;
    cfg.stepper.beta = opt.beta;
    cfg.eps = opt.eps;
    cfg.max_iters = opt.max_iters;
    cfg.seed = opt.seed;
    const RunReport rep = ecco_minimize(problem, x0, cfg);

    std::string path = opt.out;
    if (path.empty()) {
        const std::string ext = opt.format == "json" ? ".json" : ".csv";
        path = (std::filesystem::path(default_out_dir()) / ("run_" + problem.name + ext))
                   .string();
    }
    write_text_file(path, opt.format == "json" ? report_to_json(rep) : trace_to_csv(rep.trace));
    std::cout << problem.name << ": " << to_string(rep.status) << " iters=" << rep.iters
              << " f=" << format_double(rep.f_final)
              << " grad_norm=" << format_double(rep.grad_norm_final) << " trace=" << path
              << "\n";
    switch (rep.status) {
        case RunStatus::converged: return 0;
        case RunStatus::max_iters: return 2;
        case RunStatus::step_floored: return 3;
    }
    return 1;
}

struct SweepOptions {
    std::string problem;
    std::optional<int> dim;
    std::string x0_csv;
    std::string method = "ecco_full";
    std::string parameter;
    std::string values_csv;
    std::string config_json;
    std::uint64_t seed = 0;
    std::string out;
};

bool parameter_in_domain(const std::string& p, double v) {
    if (p == "eta" || p == "delta" || p == "lr") return v > 0.0;
    if (p == "beta1" || p == "beta2" || p == "decay") return v >= 0.0 && v < 1.0;
    if (p == "armijo_c") return v > 0.0 && v < 1.0;
    return false;
}

int do_sweep(const SweepOptions& opt) {
    static const std::vector<std::string> kParams = {"eta",   "delta", "lr",      "beta1",
                                                     "beta2", "decay", "armijo_c"};
    if (std::find(kParams.begin(), kParams.end(), opt.parameter) == kParams.end())
        throw std::invalid_argument("sweep: unknown parameter '" + opt.parameter + "'");
    if (!is_known_method(opt.method))
        throw std::invalid_argument("sweep: unknown method '" + opt.method + "'");
    const ObjectiveProblem problem = catalog(opt.problem, opt.dim);
    const Vector x0 =
        opt.x0_csv.empty() ? problem.default_starts.front() : parse_vector(opt.x0_csv);
    const Vector values = parse_vector(opt.values_csv);

    std::string csv = "parameter,value,status,f_final,iters,converged,diverged\n";
    for (double v : values) {
        csv += opt.parameter;
        csv += ',';
        csv += format_double(v);
        csv += ',';
        if (!parameter_in_domain(opt.parameter, v)) {
            csv += "error: value outside domain,nan,0,0,0\n";
            continue;
        }
        try {
            ordered_json j = opt.config_json.empty() ? ordered_json::object()
                                                     : ordered_json::parse(opt.config_json);
            j[opt.parameter] = v;
            const RunReport rep = run_method(opt.method, problem, x0, j.dump(), opt.seed);
            csv += to_string(rep.status);
            csv += ',';
            csv += format_double(rep.f_final);
            csv += ',';
            csv += std::to_string(rep.iters);
            csv += ',';
            csv += rep.status == RunStatus::converged ? "1" : "0";
            csv += ',';
            csv += rep.diverged ? "1" : "0";
            csv += '\n';
        } catch (const std::exception& ex) {
            csv += std::string("error: ") + ex.what() + ",nan,0,0,0\n";
        }
    }
    std::string path = opt.out;
    if (path.empty())
        path = (std::filesystem::path(default_out_dir()) / ("sweep_" + opt.parameter + ".csv"))
                   .string();
    write_text_file(path, csv);
    std::cout << "sweep written to " << path << "\n";
    return 0;
}

struct GridOptions {
    std::string method;
    std::string problem;
    std::optional<int> dim;
    std::string x0_csv;
    std::string preset;
    std::string grid_spec;  // e.g. "lr=0.1,0.5;beta1=0.9"
    int budget = 2000;
    std::string out;
};

GridAxes parse_grid_spec(const std::string& spec) {
    GridAxes axes;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("grid spec needs axis=v1,v2 pairs");
        axes[part.substr(0, eq)] = parse_vector(part.substr(eq + 1));
    }
    if (axes.empty()) throw std::invalid_argument("empty grid spec");
    return axes;
}

int do_gridsearch(const GridOptions& opt) {
    const auto method = baseline_from_string(opt.method);
    if (!method) throw std::invalid_argument("gridsearch: unknown method '" + opt.method + "'");
    if (opt.preset.empty() == opt.grid_spec.empty())
        throw std::invalid_argument("gridsearch: give exactly one of --preset or --grid");
    const GridAxes axes =
        opt.preset.empty() ? parse_grid_spec(opt.grid_spec) : grid_preset(opt.preset);
    const ObjectiveProblem problem = catalog(opt.problem, opt.dim);
    const Vector x0 =
        opt.x0_csv.empty() ? problem.default_starts.front() : parse_vector(opt.x0_csv);

    const GridSearchResult result = grid_search(*method, problem, x0, axes, opt.budget);

    std::string table = "lr,beta1,beta2,decay,armijo_c,status,diverged,f_final,iters\n";
    for (const auto& p : result.table) {
        table += format_double(p.config.lr);
        table += ',';
        table += format_double(p.config.beta1);
        table += ',';
        table += format_double(p.config.beta2);
        table += ',';
        table += format_double(p.config.decay);
        table += ',';
        table += format_double(p.config.armijo_c);
        table += ',';
        table += to_string(p.status);
        table += ',';
        table += p.diverged ? "1" : "0";
        table += ',';
        table += format_double(p.f_final);
        table += ',';
        table += std::to_string(p.iters);
        table += '\n';
    }

    ordered_json best;
    if (result.all_diverged) {
        best["all_diverged"] = true;
    } else {
        best["all_diverged"] = false;
        best["method"] = to_string(result.best->method);
        best["lr"] = result.best->lr;
        best["beta1"] = result.best->beta1;
        best["beta2"] = result.best->beta2;
        best["decay"] = result.best->decay;
        best["armijo_c"] = result.best->armijo_c;
    }

    const std::filesystem::path dir =
        opt.out.empty() ? std::filesystem::path(default_out_dir()) : std::filesystem::path(opt.out);
    std::filesystem::create_directories(dir);
    write_text_file((dir / ("grid_" + opt.method + "_" + opt.problem + "_table.csv")).string(),
                    table);
    write_text_file((dir / ("grid_" + opt.method + "_" + opt.problem + "_best.json")).string(),
                    best.dump(2) + "\n");
    std::cout << (result.all_diverged ? "all grid points diverged" : "best config written")
              << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"ECCO: circuit-controlled gradient flow optimizer and benchmark suite"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run one ECCO minimization");
    run->add_option("--problem", run_opt.problem, "catalog problem name")->required();
    int run_dim = 0;
    run->add_option("--dim", run_dim, "dimension (family problems)");
    run->add_option("--x0", run_opt.x0_csv, "start point, comma separated");
    run->add_option("--control", run_opt.control, "identity|full|approx");
    run->add_option("--eta", run_opt.eta, "LTE tolerance");
    run->add_option("--delta", run_opt.delta, "control regularization");
    run->add_option("--alpha", run_opt.alpha, "shrink factor");
    run->add_option("--beta", run_opt.beta, "grow factor");
    run->add_option("--eps", run_opt.eps, "convergence tolerance");
    run->add_option("--max-iters", run_opt.max_iters, "iteration cap");
    run->add_option("--seed", run_opt.seed, "batch seed");
    run->add_option("--out", run_opt.out, "trace output path");
    run->add_option("--format", run_opt.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string bench_manifest, bench_out;
    int bench_parallelism = 1;
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark manifest");
    bench->add_option("--manifest", bench_manifest, "manifest JSON path")->required();
    bench->add_option("--parallelism", bench_parallelism, "worker count");
    bench->add_option("--out", bench_out, "output directory");

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "one run per parameter value");
    sweep->add_option("--problem", sweep_opt.problem)->required();
    int sweep_dim = 0;
    sweep->add_option("--dim", sweep_dim);
    sweep->add_option("--x0", sweep_opt.x0_csv);
    sweep->add_option("--method", sweep_opt.method, "ecco_* or baseline method");
    sweep->add_option("--param", sweep_opt.parameter, "eta|delta|lr|beta1|beta2|decay|armijo_c")
        ->required();
    sweep->add_option("--values", sweep_opt.values_csv, "comma separated values")->required();
    sweep->add_option("--config", sweep_opt.config_json, "base config JSON");
    sweep->add_option("--seed", sweep_opt.seed);
    sweep->add_option("--out", sweep_opt.out);

    GridOptions grid_opt;
    CLI::App* grid = app.add_subcommand("gridsearch", "baseline hyperparameter grid search");
    grid->add_option("--method", grid_opt.method)->required();
    grid->add_option("--problem", grid_opt.problem)->required();
    int grid_dim = 0;
    grid->add_option("--dim", grid_dim);
    grid->add_option("--x0", grid_opt.x0_csv);
    grid->add_option("--preset", grid_opt.preset, "gd_paper|adam_paper|rmsprop_paper|armijo_paper");
    grid->add_option("--grid", grid_opt.grid_spec, "axis=v1,v2;axis=v3 explicit grid");
    grid->add_option("--budget", grid_opt.budget, "iterations per grid point");
    grid->add_option("--out", grid_opt.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (run->parsed()) {
            if (run->count("--dim")) run_opt.dim = run_dim;
            return do_run(run_opt);
        }
        if (bench->parsed()) {
            const auto entries = parse_manifest(read_text_file(bench_manifest));
            const std::string out_dir = bench_out.empty() ? default_out_dir() : bench_out;
            std::filesystem::create_directories(out_dir);
            const auto rows = run_bench(entries, bench_parallelism, out_dir);
            const std::string path =
                (std::filesystem::path(out_dir) / "summary.csv").string();
            write_text_file(path, summary_to_csv(rows));
            std::cout << "bench: " << rows.size() << " rows, summary at " << path << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            if (sweep->count("--dim")) sweep_opt.dim = sweep_dim;
            return do_sweep(sweep_opt);
        }
        if (grid->parsed()) {
            if (grid->count("--dim")) grid_opt.dim = grid_dim;
            return do_gridsearch(grid_opt);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace ecco
