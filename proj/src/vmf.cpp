#include "vmfe/vmf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vmfe/errors.hpp"
#include "vmfe/special_functions.hpp"

namespace vmfe {

UnitVector::UnitVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    const double norm = coords_.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
        throw DomainError("unit vector has norm " + std::to_string(norm));
    }
}

UnitVector UnitVector::normalized(const Eigen::VectorXd& v) {
    const double norm = v.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
        throw DomainError("cannot normalize a zero or non-finite vector");
    }
    return UnitVector(v / norm, Unchecked{});
}

UnitVector UnitVector::pole(Eigen::Index m) {
    return UnitVector(Eigen::VectorXd::Unit(m, 0), Unchecked{});
}

VmfParams::VmfParams(UnitVector mu_v, double tau) : mu_v_(std::move(mu_v)), tau_(tau) {
    if (mu_v_.dim() < 2) {
        throw DomainError("vMF dimension must be >= 2");
    }
    if (!std::isfinite(tau_) || tau_ < 0.0) {
        throw DomainError("vMF concentration must be finite and >= 0, got " + std::to_string(tau_));
    }
}

VmfParams VmfParams::from_natural(const Eigen::VectorXd& v) {
    const double tau = v.norm();
    if (tau == 0.0) return VmfParams(UnitVector::pole(v.size()), 0.0);
    return VmfParams(UnitVector::normalized(v), tau);
}

double vmf_log_normalizer(int m, double tau) {
    if (tau == 0.0) return -special::log_sphere_area(m);
    const double half_m = 0.5 * m;
    return (half_m - 1.0) * std::log(tau) - half_m * std::log(2.0 * std::numbers::pi) -
           special::log_bessel_i(half_m - 1.0, tau);
}

double vmf_log_pdf(const UnitVector& v, const VmfParams& params) {
    if (v.dim() != params.dim()) {
        throw ShapeError("vmf_log_pdf: point has dimension " + std::to_string(v.dim()) +
                         " but parameters have dimension " + std::to_string(params.dim()));
    }
    const double log_c = vmf_log_normalizer(params.dim(), params.tau());
    if (params.tau() == 0.0) return log_c;
    return log_c + params.tau() * params.mu_v().coords().dot(v.coords());
}

UnitVector uniform_sphere_sample(Eigen::Index m, RandomSource& rng) {
    for (;;) {
        Eigen::VectorXd g = rng.normal_vector(m);
        if (g.squaredNorm() > 0.0) return UnitVector::normalized(g);
    }
}

Eigen::VectorXd vmf_sample_at_pole(int m, double tau, RandomSource& rng) {
    if (tau == 0.0) return uniform_sphere_sample(m, rng).coords();

    const double dof = m - 1.0;
    const double b = dof / (2.0 * tau + std::sqrt(4.0 * tau * tau + dof * dof));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = tau * x0 + dof * std::log(1.0 - x0 * x0);

    double w = 0.0;
    for (;;) {
        const double z = rng.beta(0.5 * dof, 0.5 * dof);
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        const double u = rng.uniform();
        if (tau * w + dof * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }

    Eigen::VectorXd tangent = rng.normal_vector(m - 1);
    while (tangent.squaredNorm() == 0.0) tangent = rng.normal_vector(m - 1);
    tangent.normalize();

    Eigen::VectorXd x(m);
    x[0] = w;
    x.tail(m - 1) = std::sqrt(std::max(0.0, 1.0 - w * w)) * tangent;
    return x;
}

Eigen::VectorXd reflect_from_pole(const UnitVector& target, const Eigen::VectorXd& x) {
    Eigen::VectorXd u = -target.coords();
    u[0] += 1.0;
    const double uu = u.squaredNorm();
    if (uu < 1e-300) return x;
    return x - (2.0 * u.dot(x) / uu) * u;
}

UnitVector vmf_sample(const VmfParams& params, RandomSource& rng) {
    const Eigen::VectorXd at_pole = vmf_sample_at_pole(params.dim(), params.tau(), rng);
    if (params.tau() == 0.0) return UnitVector::normalized(at_pole);
    return UnitVector::normalized(reflect_from_pole(params.mu_v(), at_pole));
}

Eigen::VectorXd vmf_mean(const VmfParams& params) {
    return special::bessel_ratio(params.dim(), params.tau()) * params.mu_v().coords();
}

Eigen::MatrixXd vmf_second_moment(const VmfParams& params) {
    const int m = params.dim();
    const double ratio = special::bessel_ratio_over_tau(m, params.tau());
    const Eigen::VectorXd& mu = params.mu_v().coords();
    Eigen::MatrixXd out = ratio * Eigen::MatrixXd::Identity(m, m);
    out.noalias() += (1.0 - m * ratio) * mu * mu.transpose();
    return out;
}

}  // namespace vmfe
