#include "vmfe/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include <Eigen/Dense>

#include "vmfe/errors.hpp"
#include "vmfe/io.hpp"

namespace vmfe {

void ExperimentSpec::validate() const {
    if (taus.empty() || dims.empty() || generators.empty()) throw DomainError("experiment grid is empty");
    for (double tau : taus) {
        if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("experiment taus must be finite and > 0");
    }
    for (int m : dims) {
        if (m < 2) throw DomainError("experiment dims must be >= 2");
    }
    if (n_samples < 1) throw DomainError("n_samples must be >= 1");
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (!(eccentricity_max >= 1.0)) throw DomainError("eccentricity_max must be >= 1");
    FitConfig config;
    config.method = method;
    config.learning_rate = learning_rate;
    config.max_iters = max_iters;
    config.tol = tol;
    config.validate();
}

std::vector<Cell> cells(const ExperimentSpec& spec) {
    std::vector<Cell> out;
    for (GeneratorKind g : spec.generators) {
        for (int m : spec.dims) {
            for (double tau : spec.taus) out.push_back({g, m, tau});
        }
    }
    return out;
}

VmfEllipticalParams random_truth(int m, double tau, double eccentricity_max, GeneratorKind generator,
                                 RandomSource& rng) {
    if (m < 2) throw DomainError("random_truth requires m >= 2");
    if (!(tau > 0.0)) throw DomainError("random_truth requires tau > 0");
    if (!(eccentricity_max >= 1.0)) throw DomainError("eccentricity_max must be >= 1");

    Eigen::MatrixXd gauss(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) gauss(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ();
    // Sign fix makes Q Haar-distributed.
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }

    Eigen::VectorXd log_eig(m);
    for (int i = 0; i < m; ++i) log_eig[i] = std::log(eccentricity_max) * rng.uniform();
    log_eig.array() -= log_eig.mean();
    const Eigen::VectorXd eig = log_eig.array().exp();
    Eigen::MatrixXd sigma = q * eig.asDiagonal() * q.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());

    Eigen::VectorXd mu(m);
    for (int i = 0; i < m; ++i) mu[i] = 2.0 * rng.uniform() - 1.0;
    const UnitVector direction = uniform_sphere_sample(m, rng);
    const Eigen::MatrixXd lambda = sigma.llt().matrixL();
    return VmfEllipticalParams(mu, lambda, VmfParams(direction, tau), generator);
}

namespace {

std::uint64_t cell_key(GeneratorKind g) { return g == GeneratorKind::Gaussian ? 1 : 2; }

std::uint64_t cell_seed(const ExperimentSpec& spec, const Cell& cell) {
    return derive_seed(spec.seed, {cell_key(cell.generator), static_cast<std::uint64_t>(cell.m),
                                   std::bit_cast<std::uint64_t>(cell.tau)});
}

std::uint64_t trial_seed(const ExperimentSpec& spec, const Cell& cell, int trial) {
    return derive_seed(spec.seed, {cell_key(cell.generator), static_cast<std::uint64_t>(cell.m),
                                   std::bit_cast<std::uint64_t>(cell.tau), static_cast<std::uint64_t>(trial) + 1});
}

}  // namespace

std::vector<CaseResult> run_case(const ExperimentSpec& spec, const Cell& cell, bool record_time,
                                 const std::atomic<bool>* cancel) {
    RandomSource cell_rng(cell_seed(spec, cell));
    const VmfEllipticalParams truth = random_truth(cell.m, cell.tau, spec.eccentricity_max, cell.generator, cell_rng);
    const SampleMatrix data = sample(truth, spec.n_samples, cell_rng);
    const double l_true = log_likelihood(data, truth);

    FitConfig config;
    config.method = spec.method;
    config.learning_rate = spec.learning_rate;
    config.max_iters = spec.max_iters;
    config.tol = spec.tol;
    if (spec.init_from_truth) {
        config.init = InitStrategy::Provided;
        config.initial = truth;
    } else {
        config.init = InitStrategy::Random;
    }

    std::vector<CaseResult> rows;
    for (int trial = 0; trial < spec.trials; ++trial) {
        if (cancel != nullptr && cancel->load()) break;
        RandomSource rng(trial_seed(spec, cell, trial));
        CaseResult row{cell.generator, cell.m, cell.tau, trial, std::numeric_limits<double>::infinity(), 0, false, 0.0};
        const auto start = std::chrono::steady_clock::now();
        try {
            const FitReport report = fit(data, cell.generator, config, rng);
            row.error_ratio = error_ratio(report.final_loglik(), l_true);
            row.iters = report.iters;
            row.converged = report.converged;
        } catch (const Error&) {
            // Recorded as a failed, non-converged trial.
        }
        if (record_time) {
            row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        rows.push_back(row);
    }
    return rows;
}

GridResult run_grid(const ExperimentSpec& spec, const GridOptions& options) {
    spec.validate();
    const std::vector<Cell> grid = cells(spec);
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));

    std::vector<std::vector<CaseResult>> slots(grid.size());
    std::vector<char> done(grid.size(), 0);
    std::size_t next_cell = 0;
    std::size_t next_emit = 0;
    std::mutex mutex;
    GridResult result;

    auto cancelled = [&] { return options.cancel != nullptr && options.cancel->load(); };
    // Emits the longest finished prefix; must hold the mutex.
    auto emit_ready = [&] {
        while (next_emit < grid.size() && done[next_emit]) {
            for (const CaseResult& row : slots[next_emit]) {
                if (options.on_row) options.on_row(row);
                result.rows.push_back(row);
            }
            ++next_emit;
        }
    };

    auto worker = [&] {
        while (true) {
            std::size_t index;
            {
                std::lock_guard lock(mutex);
                if (next_cell >= grid.size() || cancelled()) return;
                index = next_cell++;
            }
            std::vector<CaseResult> rows = run_case(spec, grid[index], options.record_time, options.cancel);
            std::lock_guard lock(mutex);
            // A cell cut short by cancellation is dropped rather than reported half-done.
            if (static_cast<int>(rows.size()) < spec.trials) continue;
            slots[index] = std::move(rows);
            done[index] = 1;
            emit_ready();
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // After a cancellation, report the finished cells past the first gap too.
    for (std::size_t i = next_emit; i < grid.size(); ++i) {
        if (!done[i]) {
            result.complete = false;
            continue;
        }
        for (const CaseResult& row : slots[i]) {
            if (options.on_row) options.on_row(row);
            result.rows.push_back(row);
        }
    }
    result.summary = summarize(result.rows);
    return result;
}

std::vector<CellSummary> summarize(const std::vector<CaseResult>& rows) {
    std::vector<CellSummary> out;
    std::vector<std::vector<double>> ratios;
    for (const CaseResult& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CellSummary& s) {
            return s.generator == row.generator && s.m == row.m && s.tau == row.tau;
        });
        if (it == out.end()) {
            out.push_back({row.generator, row.m, row.tau, 0.0, 0.0, 0});
            ratios.emplace_back();
            it = out.end() - 1;
        }
        ratios[static_cast<std::size_t>(it - out.begin())].push_back(row.error_ratio);
        if (row.converged) ++it->n_converged;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::vector<double>& r = ratios[i];
        const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
        double ss = 0.0;
        for (double x : r) ss += (x - mean) * (x - mean);
        out[i].mean_error_ratio = mean;
        out[i].std_error_ratio = r.size() > 1 ? std::sqrt(ss / static_cast<double>(r.size() - 1)) : 0.0;
    }
    return out;
}

void write_results_header(std::ostream& out) {
    out << "generator,m,tau,trial,error_ratio,iters,converged,wall_time_s\n";
}

void write_result_row(std::ostream& out, const CaseResult& row) {
    out << to_string(row.generator) << ',' << row.m << ',' << io::format_double(row.tau) << ',' << row.trial << ','
        << io::format_double(row.error_ratio) << ',' << row.iters << ',' << (row.converged ? 1 : 0) << ','
        << io::format_double(row.wall_time_s) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary) {
    out << "generator,m,tau,mean_error_ratio,std_error_ratio,n_converged\n";
    for (const CellSummary& s : summary) {
        out << to_string(s.generator) << ',' << s.m << ',' << io::format_double(s.tau) << ','
            << io::format_double(s.mean_error_ratio) << ',' << io::format_double(s.std_error_ratio) << ','
            << s.n_converged << '\n';
    }
}

}  // namespace vmfe
