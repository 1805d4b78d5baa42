#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vmfe/radial.hpp"
#include "vmfe/random.hpp"
#include "vmfe/vmf_elliptical.hpp"

namespace vmfe {

enum class FitMethod { GradientDescent, FixedPoint };
enum class InitStrategy { Random, Moment, Provided };

std::string_view to_string(FitMethod method);
FitMethod parse_fit_method(std::string_view tag);
std::string_view to_string(InitStrategy init);
InitStrategy parse_init_strategy(std::string_view tag);

struct FitConfig {
    FitMethod method = FitMethod::GradientDescent;
    /// Step size for (mu, Lambda), applied to the gradient of the per-sample mean log-likelihood.
    double learning_rate = 0.01;
    int max_iters = 5000;
    /// Stop once |L_k - L_{k-1}| <= tol * |L_{k-1}|.
    double tol = 1e-8;
    InitStrategy init = InitStrategy::Moment;
    /// Starting point when init == Provided.
    std::optional<VmfEllipticalParams> initial;
    int max_backtracks = 20;
    /// Also run from skew_init and keep the better optimum. The likelihood has
    /// a spurious near-symmetric mode that traps starts in the bulk of
    /// strongly skewed data. Ignored for Provided starts.
    bool skew_restart = true;

    void validate() const;
};

struct FitReport {
    VmfEllipticalParams params;
    /// Log-likelihood at the initial point followed by one entry per iteration.
    std::vector<double> loglik_trace;
    bool converged = false;
    int iters = 0;
    std::vector<std::string> warnings;

    double final_loglik() const { return loglik_trace.back(); }
};

/// Sum_i log_pdf(x_i, params), constants included. Zero for an empty sample.
/// Throws DegeneratePointError naming the first row with t < kMinMahalanobis.
double log_likelihood(const SampleMatrix& data, const VmfEllipticalParams& params);

struct Gradients {
    Eigen::VectorXd v;       // dL/dv, v = tau mu_v
    Eigen::VectorXd mu;      // dL/dmu
    Eigen::MatrixXd lambda;  // dL/dLambda over the full matrix (upper part unused by the optimizer)
};

/// Analytic gradients of the total log-likelihood.
Gradients gradients(const SampleMatrix& data, const VmfEllipticalParams& params);

/// -n rho_m(||v||) v/||v|| + sum_i z_i; just sum_i z_i at v = 0.
Eigen::VectorXd grad_v(const SampleMatrix& data, const VmfEllipticalParams& params);
Eigen::VectorXd grad_mu(const SampleMatrix& data, const VmfEllipticalParams& params);
Eigen::MatrixXd grad_lambda(const SampleMatrix& data, const VmfEllipticalParams& params);

/// Keeps the lower triangle (diagonal included) and zeroes the rest.
Eigen::MatrixXd project_lower(const Eigen::MatrixXd& g);

/// One alternating sweep of the stationarity equations: v in closed form,
/// then mu, then Sigma (symmetrized, eigenvalues floored at 1e-10, refactored).
///
/// Throws DegenerateDataError when the mean resultant length reaches one and
/// StalledStepError when the weighted location update has a vanishing denominator.
VmfEllipticalParams fixed_point_step(const SampleMatrix& data, const VmfEllipticalParams& params);

/// Maximum-likelihood fit.
///
/// GradientDescent: steepest ascent on (mu, Lambda) with halving backtracking
/// and the exact closed-form v update every iteration. FixedPoint: repeated
/// fixed_point_step, falling back to damped or gradient steps whenever a
/// sweep would lower the likelihood. Throws ConvergenceError on a non-finite
/// likelihood. The report traces the run that was kept.
FitReport fit(const SampleMatrix& data, GeneratorKind generator, const FitConfig& config, RandomSource& rng);

/// Initial parameters used by fit for the Moment and Random strategies.
VmfEllipticalParams moment_init(const SampleMatrix& data, GeneratorKind generator);
VmfEllipticalParams random_init(const SampleMatrix& data, GeneratorKind generator, RandomSource& rng);
/// moment_init with the location moved two whitened units against the
/// third-moment skew direction.
VmfEllipticalParams skew_init(const SampleMatrix& data, GeneratorKind generator);

/// |l_est - l_true| / |l_true|. Throws DomainError when |l_true| < 1e-12.
double error_ratio(double l_est, double l_true);

}  // namespace vmfe
