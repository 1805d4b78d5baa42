#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "vmfe/radial.hpp"
#include "vmfe/random.hpp"
#include "vmfe/vmf.hpp"

namespace vmfe {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x m data, one observation per row.
class SampleMatrix {
public:
    /// Empty sample of dimension m.
    explicit SampleMatrix(Eigen::Index m) : rows_(0, m) {}
    explicit SampleMatrix(RowMatrix rows) : rows_(std::move(rows)) {}

    Eigen::Index size() const { return rows_.rows(); }
    Eigen::Index dim() const { return rows_.cols(); }
    auto row(Eigen::Index i) const { return rows_.row(i); }
    const RowMatrix& matrix() const { return rows_; }
    RowMatrix& matrix() { return rows_; }

private:
    RowMatrix rows_;
};

/// Parameters of x = mu + R Lambda V, V ~ vMF(mu_v, tau).
///
/// Sigma = Lambda Lambda^T is carried only through its lower-triangular
/// Cholesky factor; construction rejects a non-triangular Lambda or a
/// non-positive diagonal.
class VmfEllipticalParams {
public:
    VmfEllipticalParams(Eigen::VectorXd mu, Eigen::MatrixXd lambda, VmfParams vmf, GeneratorKind generator);

    int dim() const { return static_cast<int>(mu_.size()); }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& lambda() const { return lambda_; }
    const VmfParams& vmf() const { return vmf_; }
    GeneratorKind generator_kind() const { return generator_.kind(); }
    const RadialGenerator& generator() const { return generator_; }

    Eigen::MatrixXd sigma() const;
    /// ln det Sigma = 2 sum_i ln Lambda_ii.
    double log_det_sigma() const;

    VmfEllipticalParams with_location(Eigen::VectorXd mu) const;
    VmfEllipticalParams with_lambda(Eigen::MatrixXd lambda) const;
    VmfEllipticalParams with_vmf(VmfParams vmf) const;

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd lambda_;
    VmfParams vmf_;
    RadialGenerator generator_;
};

/// Whitened direction z = Lambda^{-1}(x - mu) / sqrt(t) and squared Mahalanobis distance t.
struct WhitenedPoint {
    UnitVector z;
    double t;
};

/// Smallest squared Mahalanobis distance at which a point is not treated as the centre.
inline constexpr double kMinMahalanobis = 1e-12;

/// Throws DegeneratePointError (row 0) when t < kMinMahalanobis.
WhitenedPoint whiten(const Eigen::VectorXd& x, const VmfEllipticalParams& params);

/// -1/2 ln det Sigma + ln p_V(z) + ln g(t).
double log_pdf(const Eigen::VectorXd& x, const VmfEllipticalParams& params);

/// Log density of the symmetric elliptical law with the same (mu, Lambda, g):
/// the tau = 0 member of the family, with the uniform sphere density in place of p_V.
double symmetric_log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, const Eigen::MatrixXd& lambda,
                         const RadialGenerator& generator);

/// n independent draws of mu + R Lambda V.
SampleMatrix sample(const VmfEllipticalParams& params, Eigen::Index n, RandomSource& rng);

/// E[X] = mu + rho_m(tau) E[R] Lambda mu_v. Throws NoMomentError for Cauchy.
Eigen::VectorXd mean(const VmfEllipticalParams& params);

/// Var[X] = Lambda (E[R^2] E[V V^T] - E[R]^2 E[V] E[V]^T) Lambda^T. Throws NoMomentError for Cauchy.
Eigen::MatrixXd covariance(const VmfEllipticalParams& params);

/// Large-tau approximation mu + Lambda mu_v R + tau^{-1/2} Lambda (R sqrt(chi2_m)) U
/// with R, chi2_m and U independent. Throws DomainError at tau = 0.
SampleMatrix approximate_sample(const VmfEllipticalParams& params, Eigen::Index n, RandomSource& rng);

}  // namespace vmfe
