#include "vmfe/vmf_elliptical.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "vmfe/errors.hpp"
#include "vmfe/special_functions.hpp"

namespace vmfe {

VmfEllipticalParams::VmfEllipticalParams(Eigen::VectorXd mu, Eigen::MatrixXd lambda, VmfParams vmf,
                                         GeneratorKind generator)
    : mu_(std::move(mu)),
      lambda_(std::move(lambda)),
      vmf_(std::move(vmf)),
      generator_(generator, static_cast<int>(mu_.size())) {
    const Eigen::Index m = mu_.size();
    if (lambda_.rows() != m || lambda_.cols() != m) {
        throw ShapeError("lambda must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    if (vmf_.dim() != m) {
        throw ShapeError("mu_v has dimension " + std::to_string(vmf_.dim()) + ", expected " + std::to_string(m));
    }
    if (!mu_.allFinite() || !lambda_.allFinite()) {
        throw DomainError("location and scatter parameters must be finite");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(lambda_(i, i) > 0.0)) {
            throw DomainError("lambda diagonal must be positive (entry " + std::to_string(i) + ")");
        }
        for (Eigen::Index j = i + 1; j < m; ++j) {
            if (lambda_(i, j) != 0.0) throw DomainError("lambda must be lower triangular");
        }
    }
}

Eigen::MatrixXd VmfEllipticalParams::sigma() const { return lambda_ * lambda_.transpose(); }

double VmfEllipticalParams::log_det_sigma() const {
    return 2.0 * lambda_.diagonal().array().log().sum();
}

VmfEllipticalParams VmfEllipticalParams::with_location(Eigen::VectorXd mu) const {
    return VmfEllipticalParams(std::move(mu), lambda_, vmf_, generator_.kind());
}

VmfEllipticalParams VmfEllipticalParams::with_lambda(Eigen::MatrixXd lambda) const {
    return VmfEllipticalParams(mu_, std::move(lambda), vmf_, generator_.kind());
}

VmfEllipticalParams VmfEllipticalParams::with_vmf(VmfParams vmf) const {
    return VmfEllipticalParams(mu_, lambda_, std::move(vmf), generator_.kind());
}

WhitenedPoint whiten(const Eigen::VectorXd& x, const VmfEllipticalParams& params) {
    if (x.size() != params.dim()) {
        throw ShapeError("point has dimension " + std::to_string(x.size()) + ", expected " +
                         std::to_string(params.dim()));
    }
    Eigen::VectorXd y = params.lambda().triangularView<Eigen::Lower>().solve(x - params.mu());
    const double t = y.squaredNorm();
    if (!(t >= kMinMahalanobis)) {
        throw DegeneratePointError("point coincides with the location parameter (t = " + std::to_string(t) + ")",
                                   0);
    }
    return {UnitVector::normalized(y), t};
}

double log_pdf(const Eigen::VectorXd& x, const VmfEllipticalParams& params) {
    const WhitenedPoint w = whiten(x, params);
    return -0.5 * params.log_det_sigma() + vmf_log_pdf(w.z, params.vmf()) + params.generator().log_g(w.t);
}

double symmetric_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& lambda,
                         const RadialGenerator& generator) {
    const Eigen::VectorXd y = lambda.triangularView<Eigen::Lower>().solve(x - mu);
    const double log_det = 2.0 * lambda.diagonal().array().log().sum();
    return -0.5 * log_det - special::log_sphere_area(static_cast<int>(mu.size())) + generator.log_g(y.squaredNorm());
}

SampleMatrix sample(const VmfEllipticalParams& params, Eigen::Index n, RandomSource& rng) {
    const Eigen::Index m = params.dim();
    RowMatrix out(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = params.generator().sample_r(rng);
        const UnitVector v = vmf_sample(params.vmf(), rng);
        out.row(i) = (params.mu() + r * (params.lambda() * v.coords())).transpose();
    }
    return SampleMatrix(std::move(out));
}

Eigen::VectorXd mean(const VmfEllipticalParams& params) {
    const double mean_r = params.generator().mean_r();
    return params.mu() + mean_r * (params.lambda() * vmf_mean(params.vmf()));
}

Eigen::MatrixXd covariance(const VmfEllipticalParams& params) {
    const double mean_r = params.generator().mean_r();
    const double mean_r2 = params.generator().mean_r2();
    const Eigen::VectorXd ev = vmf_mean(params.vmf());
    const Eigen::MatrixXd inner = mean_r2 * vmf_second_moment(params.vmf()) - mean_r * mean_r * ev * ev.transpose();
    return params.lambda() * inner * params.lambda().transpose();
}

SampleMatrix approximate_sample(const VmfEllipticalParams& params, Eigen::Index n, RandomSource& rng) {
    const double tau = params.vmf().tau();
    if (!(tau > 0.0)) throw DomainError("the large-concentration approximation requires tau > 0");
    const Eigen::Index m = params.dim();
    const Eigen::VectorXd skew_axis = params.lambda() * params.vmf().mu_v().coords();
    const double inv_sqrt_tau = 1.0 / std::sqrt(tau);
    RowMatrix out(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = params.generator().sample_r(rng);
        const double chi = std::sqrt(rng.chi_squared(static_cast<double>(m)));
        const UnitVector u = uniform_sphere_sample(m, rng);
        out.row(i) = (params.mu() + r * skew_axis + inv_sqrt_tau * r * chi * (params.lambda() * u.coords())).transpose();
    }
    return SampleMatrix(std::move(out));
}

}  // namespace vmfe
