#include "vmfe/radial.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vmfe/errors.hpp"

namespace vmfe {

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Gaussian: return "gaussian";
        case GeneratorKind::Cauchy: return "cauchy";
    }
    return "unknown";
}

GeneratorKind parse_generator_kind(std::string_view tag) {
    if (tag == "gaussian") return GeneratorKind::Gaussian;
    if (tag == "cauchy") return GeneratorKind::Cauchy;
    throw ParseError("unknown generator '" + std::string(tag) + "' (expected gaussian or cauchy)");
}

RadialGenerator::RadialGenerator(GeneratorKind kind, int m) : kind_(kind), m_(m) {
    if (m < 2) throw DomainError("generator dimension must be >= 2, got " + std::to_string(m));
    const double half_m = 0.5 * m;
    switch (kind_) {
        case GeneratorKind::Gaussian:
            // p_R = chi density with m dof.
            log_norm_ = (1.0 - half_m) * std::numbers::ln2 - std::lgamma(half_m);
            break;
        case GeneratorKind::Cauchy:
            // p_R = radial density of the m-variate Student t with one dof.
            log_norm_ = std::numbers::ln2 + std::lgamma(half_m + 0.5) - std::lgamma(half_m) -
                        0.5 * std::log(std::numbers::pi);
            break;
    }
}

double RadialGenerator::log_g(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("density generator requires finite t > 0, got " + std::to_string(t));
    }
    switch (kind_) {
        case GeneratorKind::Gaussian: return log_norm_ - 0.5 * t;
        case GeneratorKind::Cauchy: return log_norm_ - 0.5 * (m_ + 1.0) * std::log1p(t);
    }
    return 0.0;
}

double RadialGenerator::psi(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("score function requires finite t >= 0, got " + std::to_string(t));
    }
    switch (kind_) {
        case GeneratorKind::Gaussian: return -0.5;
        case GeneratorKind::Cauchy: return -0.5 * (m_ + 1.0) / (1.0 + t);
    }
    return 0.0;
}

double RadialGenerator::sample_r(RandomSource& rng) const {
    switch (kind_) {
        case GeneratorKind::Gaussian: return std::sqrt(rng.chi_squared(m_));
        case GeneratorKind::Cauchy: {
            const double numerator = rng.normal_vector(m_).norm();
            double w = 0.0;
            while (w == 0.0) w = rng.normal();
            return numerator / std::abs(w);
        }
    }
    return 0.0;
}

RadialMoments RadialGenerator::moments() const {
    RadialMoments out;
    if (kind_ == GeneratorKind::Gaussian) {
        out.has_mean = true;
        out.mean_r = std::numbers::sqrt2 * std::exp(std::lgamma(0.5 * (m_ + 1.0)) - std::lgamma(0.5 * m_));
        out.mean_r2 = static_cast<double>(m_);
    }
    return out;
}

double RadialGenerator::mean_r() const {
    const RadialMoments mom = moments();
    if (!mom.mean_r) throw NoMomentError(std::string(to_string(kind_)) + " radial law has no finite mean");
    return *mom.mean_r;
}

double RadialGenerator::mean_r2() const {
    const RadialMoments mom = moments();
    if (!mom.mean_r2) {
        throw NoMomentError(std::string(to_string(kind_)) + " radial law has no finite second moment");
    }
    return *mom.mean_r2;
}

}  // namespace vmfe
