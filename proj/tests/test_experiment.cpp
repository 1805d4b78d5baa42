#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "vmfe/errors.hpp"
#include "vmfe/experiment.hpp"

using namespace vmfe;

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.dims = {2, 3};
    spec.taus = {2.0 * std::numbers::sqrt2, 10.0 * std::numbers::sqrt2};
    spec.n_samples = 300;
    spec.trials = 2;
    spec.seed = 7;
    return spec;
}

std::string results_csv(const GridResult& r) {
    std::ostringstream out;
    write_results_header(out);
    for (const CaseResult& row : r.rows) write_result_row(out, row);
    return out.str();
}

}  // namespace

TEST(ExperimentSpec, DefaultsDescribeTheFullGrid) {
    const ExperimentSpec spec;
    EXPECT_NO_THROW(spec.validate());
    EXPECT_EQ(cells(spec).size(), 50u);
    EXPECT_EQ(spec.n_samples, 1000);
    EXPECT_EQ(spec.trials, 10);
    EXPECT_DOUBLE_EQ(spec.eccentricity_max, 4.0);
    EXPECT_DOUBLE_EQ(spec.taus.back(), 10.0 * std::numbers::sqrt2);
}

TEST(ExperimentSpec, Validation) {
    ExperimentSpec spec;
    spec.taus = {0.0};
    EXPECT_THROW(spec.validate(), DomainError);
    spec = ExperimentSpec{};
    spec.dims = {1};
    EXPECT_THROW(spec.validate(), DomainError);
    spec = ExperimentSpec{};
    spec.trials = 0;
    EXPECT_THROW(spec.validate(), DomainError);
    spec = ExperimentSpec{};
    spec.eccentricity_max = 0.5;
    EXPECT_THROW(spec.validate(), DomainError);
}

TEST(Cells, OrderIsGeneratorDimTau) {
    const std::vector<Cell> grid = cells(small_spec());
    ASSERT_EQ(grid.size(), 8u);
    EXPECT_EQ(grid[0].generator, GeneratorKind::Gaussian);
    EXPECT_EQ(grid[0].m, 2);
    EXPECT_EQ(grid[1].tau, small_spec().taus[1]);
    EXPECT_EQ(grid[2].m, 3);
    EXPECT_EQ(grid[4].generator, GeneratorKind::Cauchy);
}

TEST(RandomTruth, RespectsEccentricityAndShape) {
    RandomSource rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + trial % 15;
        const VmfEllipticalParams p = random_truth(m, 3.0, 4.0, GeneratorKind::Gaussian, rng);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.sigma());
        const Eigen::VectorXd ev = eig.eigenvalues();
        EXPECT_LE(ev.maxCoeff() / ev.minCoeff(), 4.0 + 1e-9);
        EXPECT_NEAR(ev.array().log().sum(), 0.0, 1e-9);  // geometric mean one
        EXPECT_NEAR(p.vmf().mu_v().coords().norm(), 1.0, 1e-12);
        EXPECT_LE(p.mu().cwiseAbs().maxCoeff(), 1.0);
        EXPECT_DOUBLE_EQ(p.vmf().tau(), 3.0);
        // Eigenvectors form a rotation up to sign.
        EXPECT_NEAR(std::abs(eig.eigenvectors().determinant()), 1.0, 1e-10);
    }
}

TEST(RandomTruth, Validation) {
    RandomSource rng(2);
    EXPECT_THROW(random_truth(1, 1.0, 4.0, GeneratorKind::Gaussian, rng), DomainError);
    EXPECT_THROW(random_truth(2, 0.0, 4.0, GeneratorKind::Gaussian, rng), DomainError);
}

TEST(RunCase, ProducesOneRowPerTrial) {
    const ExperimentSpec spec = small_spec();
    const Cell cell{GeneratorKind::Cauchy, 3, spec.taus[0]};
    const std::vector<CaseResult> rows = run_case(spec, cell);
    ASSERT_EQ(rows.size(), 2u);
    for (int t = 0; t < 2; ++t) {
        EXPECT_EQ(rows[t].trial, t);
        EXPECT_EQ(rows[t].m, 3);
        EXPECT_GE(rows[t].error_ratio, 0.0);
        EXPECT_GT(rows[t].iters, 0);
    }
}

TEST(RunCase, FittingFromTruthOnlyGainsTheWilksExcess) {
    // Starting at the truth, the optimum beats it by about half a chi-square
    // with one degree of freedom per free parameter.
    RandomSource rng(3);
    for (int m : {2, 4, 8}) {
        const int k = m + m * (m + 1) / 2 + m;
        const double bound = 0.5 * boost::math::quantile(boost::math::chi_squared(k), 0.999);
        const VmfEllipticalParams truth = random_truth(m, 6.0 * std::numbers::sqrt2, 4.0, GeneratorKind::Gaussian, rng);
        const SampleMatrix data = sample(truth, 1000, rng);
        FitConfig config;
        config.method = FitMethod::FixedPoint;
        config.init = InitStrategy::Provided;
        config.initial = truth;
        const double gain = fit(data, GeneratorKind::Gaussian, config, rng).final_loglik() - log_likelihood(data, truth);
        EXPECT_GE(gain, 0.0) << m;
        EXPECT_LE(gain, bound) << m;
    }
}

TEST(RunCase, InitFromTruthUsesProvidedStart) {
    ExperimentSpec spec = small_spec();
    spec.init_from_truth = true;
    spec.trials = 2;
    const std::vector<CaseResult> rows = run_case(spec, cells(spec)[0]);
    ASSERT_EQ(rows.size(), 2u);
    // No random start is involved, so trials coincide.
    EXPECT_EQ(rows[0].error_ratio, rows[1].error_ratio);
    EXPECT_LT(rows[0].error_ratio, 0.01);
}

TEST(RunGrid, DeterministicAndOrderIndependent) {
    ExperimentSpec spec = small_spec();
    GridOptions serial;
    serial.record_time = false;
    GridOptions parallel = serial;
    parallel.threads = 4;
    const GridResult a = run_grid(spec, serial);
    const GridResult b = run_grid(spec, parallel);
    EXPECT_TRUE(a.complete);
    EXPECT_EQ(a.rows.size(), 16u);
    EXPECT_EQ(results_csv(a), results_csv(b));

    // A cell's results do not depend on which other cells are in the grid.
    ExperimentSpec single = spec;
    single.dims = {3};
    single.generators = {GeneratorKind::Cauchy};
    single.taus = {spec.taus[1]};
    const GridResult c = run_grid(single, serial);
    ASSERT_EQ(c.rows.size(), 2u);
    const auto it = std::find_if(a.rows.begin(), a.rows.end(), [&](const CaseResult& r) {
        return r.generator == GeneratorKind::Cauchy && r.m == 3 && r.tau == spec.taus[1];
    });
    ASSERT_NE(it, a.rows.end());
    EXPECT_EQ(it->error_ratio, c.rows[0].error_ratio);
    EXPECT_EQ(it->iters, c.rows[0].iters);
}

TEST(RunGrid, StreamsRowsInCellOrder) {
    GridOptions options;
    options.threads = 3;
    std::vector<CaseResult> seen;
    options.on_row = [&](const CaseResult& r) { seen.push_back(r); };
    const GridResult r = run_grid(small_spec(), options);
    ASSERT_EQ(seen.size(), r.rows.size());
    const std::vector<Cell> grid = cells(small_spec());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        EXPECT_EQ(seen[i].m, grid[i / 2].m);
        EXPECT_EQ(seen[i].tau, grid[i / 2].tau);
        EXPECT_EQ(seen[i].trial, static_cast<int>(i % 2));
    }
}

TEST(RunGrid, CancelledBeforeStartReportsNothing) {
    std::atomic<bool> cancel{true};
    GridOptions options;
    options.cancel = &cancel;
    const GridResult r = run_grid(small_spec(), options);
    EXPECT_FALSE(r.complete);
    EXPECT_TRUE(r.rows.empty());
}

TEST(RunGrid, CancelMidwayKeepsWholeCells) {
    std::atomic<bool> cancel{false};
    GridOptions options;
    options.cancel = &cancel;
    int count = 0;
    options.on_row = [&](const CaseResult&) {
        if (++count == 4) cancel.store(true);
    };
    const GridResult r = run_grid(small_spec(), options);
    EXPECT_FALSE(r.complete);
    EXPECT_EQ(r.rows.size(), 4u);
    EXPECT_EQ(r.summary.size(), 2u);
}

TEST(Summarize, MeanStdAndConvergedCount) {
    std::vector<CaseResult> rows{
        {GeneratorKind::Gaussian, 2, 1.0, 0, 0.01, 10, true, 0.0},
        {GeneratorKind::Gaussian, 2, 1.0, 1, 0.03, 10, false, 0.0},
        {GeneratorKind::Cauchy, 2, 1.0, 0, 0.02, 10, true, 0.0},
    };
    const std::vector<CellSummary> s = summarize(rows);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_DOUBLE_EQ(s[0].mean_error_ratio, 0.02);
    EXPECT_NEAR(s[0].std_error_ratio, std::sqrt(2e-4), 1e-15);
    EXPECT_EQ(s[0].n_converged, 1);
    EXPECT_DOUBLE_EQ(s[1].std_error_ratio, 0.0);
}

TEST(Csv, Formats) {
    std::ostringstream out;
    write_results_header(out);
    write_result_row(out, {GeneratorKind::Cauchy, 4, 2.5, 1, std::numeric_limits<double>::infinity(), 0, false, 0.0});
    EXPECT_EQ(out.str(), "generator,m,tau,trial,error_ratio,iters,converged,wall_time_s\ncauchy,4,2.5,1,inf,0,0,0\n");
    std::ostringstream summary;
    write_summary_csv(summary, {{GeneratorKind::Gaussian, 2, 0.5, 0.25, 0.0, 3}});
    EXPECT_EQ(summary.str(),
              "generator,m,tau,mean_error_ratio,std_error_ratio,n_converged\ngaussian,2,0.5,0.25,0,3\n");
}
