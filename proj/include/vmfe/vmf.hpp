#pragma once

#include <Eigen/Core>

#include "vmfe/random.hpp"

namespace vmfe {

/// A point on the unit sphere S^{m-1}.
class UnitVector {
public:
    /// Tolerance on | ||coords|| - 1 | accepted by the checked constructor.
    static constexpr double kNormTolerance = 1e-12;

    /// Wraps coords, which must already have unit norm. Throws DomainError otherwise.
    explicit UnitVector(Eigen::VectorXd coords);

    /// Scales v to unit length. Throws DomainError for a zero or non-finite vector.
    static UnitVector normalized(const Eigen::VectorXd& v);

    /// The first canonical basis vector of R^m.
    static UnitVector pole(Eigen::Index m);

    const Eigen::VectorXd& coords() const { return coords_; }
    Eigen::Index dim() const { return coords_.size(); }
    double operator[](Eigen::Index i) const { return coords_[i]; }

private:
    struct Unchecked {};
    UnitVector(Eigen::VectorXd coords, Unchecked) : coords_(std::move(coords)) {}

    Eigen::VectorXd coords_;
};

/// von Mises-Fisher parameters: mean direction and concentration tau >= 0.
class VmfParams {
public:
    VmfParams(UnitVector mu_v, double tau);

    const UnitVector& mu_v() const { return mu_v_; }
    double tau() const { return tau_; }
    int dim() const { return static_cast<int>(mu_v_.dim()); }

    /// Natural parameter v = tau * mu_v.
    Eigen::VectorXd natural() const { return tau_ * mu_v_.coords(); }

    /// Inverse of natural(): tau = ||v||, mu_v = v / ||v||. A zero vector maps
    /// to tau = 0 with mu_v set to the first basis vector.
    static VmfParams from_natural(const Eigen::VectorXd& v);

private:
    UnitVector mu_v_;
    double tau_;
};

/// ln C_m(tau) = (m/2-1) ln tau - (m/2) ln 2pi - ln I_{m/2-1}(tau); at tau = 0
/// the log density of the uniform distribution on the sphere.
double vmf_log_normalizer(int m, double tau);

/// Log density with respect to surface measure on S^{m-1}.
double vmf_log_pdf(const UnitVector& v, const VmfParams& params);

/// Wood's rejection sampler for the cosine along mu_v, uniform tangent
/// direction, then the Householder reflection taking e_1 to mu_v.
UnitVector vmf_sample(const VmfParams& params, RandomSource& rng);

/// Uniform draw on S^{m-1} (normalized Gaussian vector).
UnitVector uniform_sphere_sample(Eigen::Index m, RandomSource& rng);

/// Draw in the frame where the mean direction is e_1.
Eigen::VectorXd vmf_sample_at_pole(int m, double tau, RandomSource& rng);

/// Applies the Householder reflection H with H e_1 = target to x.
Eigen::VectorXd reflect_from_pole(const UnitVector& target, const Eigen::VectorXd& x);

/// E[V] = rho_m(tau) mu_v.
Eigen::VectorXd vmf_mean(const VmfParams& params);

/// E[V V^T] = rho/tau I + (1 - m rho/tau) mu_v mu_v^T; I/m at tau = 0.
Eigen::MatrixXd vmf_second_moment(const VmfParams& params);

}  // namespace vmfe
