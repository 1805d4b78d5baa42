// Command-line front end: sample, fit, eval, experiment.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmfe/errors.hpp"
#include "vmfe/estimation.hpp"
#include "vmfe/experiment.hpp"
#include "vmfe/io.hpp"

namespace fs = std::filesystem;
using namespace vmfe;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kParse = 2, kDomain = 3, kConvergence = 4, kIo = 5, kInterrupted = 130 };

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct SampleArgs {
    std::string params;
    long long n = 0;
    std::uint64_t seed = 0;
    std::string out;
};

struct FitArgs {
    std::string data;
    std::string generator = "gaussian";
    std::string method = "gd";
    std::string init = "moment";
    std::string init_params;
    double lr = 0.01;
    int max_iters = 5000;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    std::string out_params;
    std::string out_report;
    std::string out_trace;
};

struct EvalArgs {
    std::string params;
    std::string data;
};

struct ExperimentArgs {
    std::string spec_file;
    std::vector<double> taus;
    std::vector<int> dims;
    std::vector<std::string> generators;
    std::optional<int> n_samples;
    std::optional<int> trials;
    std::optional<double> eccentricity_max;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    std::optional<double> lr;
    std::optional<int> max_iters;
    std::optional<double> tol;
    bool init_from_truth = false;
    std::string out_dir = ".";
    std::optional<unsigned> threads;
    bool no_timing = false;
};

int cmd_sample(const SampleArgs& a) {
    if (a.n < 0) throw DomainError("--n must be >= 0");
    const VmfEllipticalParams params = io::read_params(a.params);
    RandomSource rng(a.seed);
    io::write_samples(fs::path(a.out), sample(params, static_cast<Eigen::Index>(a.n), rng));
    return kOk;
}

int cmd_fit(const FitArgs& a) {
    const SampleMatrix data = io::read_samples(fs::path(a.data));
    const GeneratorKind kind = parse_generator_kind(a.generator);
    FitConfig config;
    config.method = parse_fit_method(a.method);
    config.init = parse_init_strategy(a.init);
    config.learning_rate = a.lr;
    config.max_iters = a.max_iters;
    config.tol = a.tol;
    if (!a.init_params.empty()) {
        config.initial = io::read_params(a.init_params);
        config.init = InitStrategy::Provided;
    }
    config.validate();

    // Fail on unwritable outputs before spending time on the fit.
    const std::string trace_path =
        !a.out_trace.empty() ? a.out_trace : (a.out_report.empty() ? "" : a.out_report + ".trace.csv");
    std::ofstream params_out = io::open_output(a.out_params);
    std::optional<std::ofstream> report_out, trace_out;
    if (!a.out_report.empty()) report_out = io::open_output(a.out_report);
    if (!trace_path.empty()) trace_out = io::open_output(trace_path);

    RandomSource rng(a.seed);
    const FitReport report = fit(data, kind, config, rng);

    params_out << io::params_to_json(report.params).dump(2) << '\n';
    if (report_out) *report_out << io::report_to_json(report, config, trace_path).dump(2) << '\n';
    if (trace_out) io::write_trace(*trace_out, report);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (!report.converged) std::cerr << "warning: not converged after " << report.iters << " iterations\n";
    std::printf("%.12g\n", report.final_loglik());
    return kOk;
}

int cmd_eval(const EvalArgs& a) {
    const VmfEllipticalParams params = io::read_params(a.params);
    const SampleMatrix data = io::read_samples(fs::path(a.data));
    std::printf("%.12g\n", log_likelihood(data, params));
    return kOk;
}

ExperimentSpec build_spec(const ExperimentArgs& a) {
    ExperimentSpec spec;
    if (!a.spec_file.empty()) {
        std::ifstream in(a.spec_file);
        if (!in) throw IoError("cannot open " + a.spec_file);
        try {
            spec = io::spec_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(a.spec_file + ": " + e.what());
        }
    }
    if (!a.taus.empty()) spec.taus = a.taus;
    if (!a.dims.empty()) spec.dims = a.dims;
    if (!a.generators.empty()) {
        spec.generators.clear();
        for (const std::string& g : a.generators) spec.generators.push_back(parse_generator_kind(g));
    }
    if (a.n_samples) spec.n_samples = *a.n_samples;
    if (a.trials) spec.trials = *a.trials;
    if (a.eccentricity_max) spec.eccentricity_max = *a.eccentricity_max;
    if (a.seed) spec.seed = *a.seed;
    if (a.method) spec.method = parse_fit_method(*a.method);
    if (a.lr) spec.learning_rate = *a.lr;
    if (a.max_iters) spec.max_iters = *a.max_iters;
    if (a.tol) spec.tol = *a.tol;
    if (a.init_from_truth) spec.init_from_truth = true;
    spec.validate();
    return spec;
}

unsigned thread_count(const ExperimentArgs& a) {
    if (a.threads) return *a.threads;
    if (const char* env = std::getenv("VMFE_THREADS"); env != nullptr && *env != '\0') {
        const double value = io::parse_double(env, "VMFE_THREADS");
        if (!(value >= 0.0) || value != std::floor(value)) throw ParseError("VMFE_THREADS must be a non-negative integer");
        return static_cast<unsigned>(value);
    }
    return 0;
}

int cmd_experiment(const ExperimentArgs& a) {
    const ExperimentSpec spec = build_spec(a);
    const unsigned threads = thread_count(a);

    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::ofstream results = io::open_output(dir / "results.csv");
    std::ofstream summary = io::open_output(dir / "summary.csv");

    write_results_header(results);
    results.flush();
    std::signal(SIGINT, on_sigint);

    GridOptions options;
    options.threads = threads;
    options.record_time = !a.no_timing;
    options.cancel = &g_interrupted;
    options.on_row = [&](const CaseResult& row) {
        write_result_row(results, row);
        results.flush();
    };
    const GridResult grid = run_grid(spec, options);
    write_summary_csv(summary, grid.summary);
    if (!results || !summary) throw IoError("failed writing results to " + dir.string());
    if (!grid.complete) {
        std::cerr << "interrupted: wrote " << grid.rows.size() << " rows from completed cells\n";
        return kInterrupted;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vMF elliptical distributions: sampling, fitting and synthetic experiments"};
    app.require_subcommand(1);

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample", "Draw samples from a parameters document");
    sample_cmd->add_option("--params", sample_args.params, "Parameters JSON")->required();
    sample_cmd->add_option("-n,--n", sample_args.n, "Number of draws")->required();
    sample_cmd->add_option("--seed", sample_args.seed, "Random seed");
    sample_cmd->add_option("--out", sample_args.out, "Output CSV")->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit to a data CSV");
    fit_cmd->add_option("--data", fit_args.data, "Data CSV with header x1..xm")->required();
    fit_cmd->add_option("--generator", fit_args.generator, "gaussian or cauchy")->capture_default_str();
    fit_cmd->add_option("--method", fit_args.method, "gd or fixed-point")->capture_default_str();
    fit_cmd->add_option("--init", fit_args.init, "moment or random")->capture_default_str();
    fit_cmd->add_option("--init-params", fit_args.init_params, "Start from this parameters document");
    fit_cmd->add_option("--lr", fit_args.lr, "Learning rate")->capture_default_str();
    fit_cmd->add_option("--max-iters", fit_args.max_iters, "Iteration cap")->capture_default_str();
    fit_cmd->add_option("--tol", fit_args.tol, "Relative log-likelihood tolerance")->capture_default_str();
    fit_cmd->add_option("--seed", fit_args.seed, "Random seed");
    fit_cmd->add_option("--out-params", fit_args.out_params, "Fitted parameters JSON")->required();
    fit_cmd->add_option("--out-report", fit_args.out_report, "Fit report JSON");
    fit_cmd->add_option("--out-trace", fit_args.out_trace, "Log-likelihood trace CSV (default: <report>.trace.csv)");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Print the total log-likelihood of a data CSV");
    eval_cmd->add_option("--params", eval_args.params, "Parameters JSON")->required();
    eval_cmd->add_option("--data", eval_args.data, "Data CSV")->required();

    ExperimentArgs exp_args;
    auto* exp_cmd = app.add_subcommand("experiment", "Run the synthetic error-ratio grid");
    exp_cmd->add_option("--spec", exp_args.spec_file, "Experiment spec JSON; flags override its fields");
    exp_cmd->add_option("--taus", exp_args.taus, "Concentrations")->delimiter(',');
    exp_cmd->add_option("--dims", exp_args.dims, "Dimensions")->delimiter(',');
    exp_cmd->add_option("--generators", exp_args.generators, "gaussian,cauchy")->delimiter(',');
    exp_cmd->add_option("--n-samples", exp_args.n_samples, "Samples per cell");
    exp_cmd->add_option("--trials", exp_args.trials, "Fits per cell");
    exp_cmd->add_option("--eccentricity-max", exp_args.eccentricity_max, "Max eigenvalue ratio of Sigma");
    exp_cmd->add_option("--seed", exp_args.seed, "Master seed");
    exp_cmd->add_option("--method", exp_args.method, "gd or fixed-point");
    exp_cmd->add_option("--lr", exp_args.lr, "Learning rate");
    exp_cmd->add_option("--max-iters", exp_args.max_iters, "Iteration cap");
    exp_cmd->add_option("--tol", exp_args.tol, "Relative log-likelihood tolerance");
    exp_cmd->add_flag("--init-from-truth", exp_args.init_from_truth, "Start fits at the generating parameters");
    exp_cmd->add_option("--out-dir", exp_args.out_dir, "Directory for results.csv and summary.csv")
        ->capture_default_str();
    exp_cmd->add_option("--threads", exp_args.threads, "Worker threads (0 = all cores; default $VMFE_THREADS or 0)");
    exp_cmd->add_flag("--no-timing", exp_args.no_timing, "Write wall_time_s as 0 for byte-stable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (*sample_cmd) return cmd_sample(sample_args);
        if (*fit_cmd) return cmd_fit(fit_args);
        if (*eval_cmd) return cmd_eval(eval_args);
        if (*exp_cmd) return cmd_experiment(exp_args);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const ShapeError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kDomain;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
