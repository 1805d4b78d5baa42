#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "vmfe/estimation.hpp"

namespace vmfe {

/// Grid of synthetic fitting problems: one truth and dataset per
/// (generator, m, tau) cell, refitted `trials` times from random starts.
struct ExperimentSpec {
    std::vector<double> taus{2 * std::numbers::sqrt2, 4 * std::numbers::sqrt2, 6 * std::numbers::sqrt2,
                             8 * std::numbers::sqrt2, 10 * std::numbers::sqrt2};
    std::vector<int> dims{2, 4, 8, 16, 32};
    std::vector<GeneratorKind> generators{GeneratorKind::Gaussian, GeneratorKind::Cauchy};
    int n_samples = 1000;
    int trials = 10;
    double eccentricity_max = 4.0;
    std::uint64_t seed = 0;

    FitMethod method = FitMethod::FixedPoint;
    double learning_rate = 0.01;
    int max_iters = 5000;
    double tol = 1e-8;
    /// Start every fit at the truth instead of a random point (optimization-gap check).
    bool init_from_truth = false;

    void validate() const;
};

struct Cell {
    GeneratorKind generator;
    int m;
    double tau;
};

struct CaseResult {
    GeneratorKind generator;
    int m;
    double tau;
    int trial;
    /// +inf when the fit failed.
    double error_ratio;
    int iters;
    bool converged;
    double wall_time_s;
};

struct CellSummary {
    GeneratorKind generator;
    int m;
    double tau;
    double mean_error_ratio;
    double std_error_ratio;
    int n_converged;
};

/// Cells in output order: generator, then m, then tau, each as listed in the spec.
std::vector<Cell> cells(const ExperimentSpec& spec);

/// Random ground truth: mu ~ U[-1,1]^m, mu_v uniform, Sigma = Q D Q^T with Q
/// Haar-random and D log-uniform with geometric mean 1 and max/min <= eccentricity_max.
VmfEllipticalParams random_truth(int m, double tau, double eccentricity_max, GeneratorKind generator,
                                 RandomSource& rng);

/// Seeds are derived from (spec.seed, generator, m, tau[, trial]) so a cell's
/// results do not depend on which other cells run or in what order.
std::vector<CaseResult> run_case(const ExperimentSpec& spec, const Cell& cell, bool record_time = true,
                                 const std::atomic<bool>* cancel = nullptr);

struct GridOptions {
    /// Worker threads; 0 means hardware concurrency.
    unsigned threads = 1;
    bool record_time = true;
    /// Checked between fits; completed cells are still reported.
    const std::atomic<bool>* cancel = nullptr;
    /// Called from a single thread, in cell order, once per row.
    std::function<void(const CaseResult&)> on_row;
};

struct GridResult {
    std::vector<CaseResult> rows;
    std::vector<CellSummary> summary;
    bool complete = true;
};

GridResult run_grid(const ExperimentSpec& spec, const GridOptions& options = {});

/// One summary per distinct cell, in first-seen order. The std is the sample
/// standard deviation (zero for a single trial).
std::vector<CellSummary> summarize(const std::vector<CaseResult>& rows);

void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const CaseResult& row);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary);

}  // namespace vmfe
