#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vmfe/random.hpp"

namespace vmfe {

enum class GeneratorKind { Gaussian, Cauchy };

std::string_view to_string(GeneratorKind kind);

/// Parses "gaussian" or "cauchy". Throws ParseError otherwise.
GeneratorKind parse_generator_kind(std::string_view tag);

/// Moments of the radial variable R that enter the closed-form moments.
struct RadialMoments {
    bool has_mean = false;
    std::optional<double> mean_r;   // E[R]
    std::optional<double> mean_r2;  // E[R^2]
};

/// Radial law R of x = mu + R Lambda V together with its density generator.
///
/// The generator follows g(t) = t^{-(m-1)/2} p_R(sqrt(t)), so it already
/// contains the normalizing constant of p_R and the vMF elliptical density is
/// det(Sigma)^{-1/2} p_V(z) g(t) with nothing else multiplied in.
class RadialGenerator {
public:
    RadialGenerator(GeneratorKind kind, int m);

    GeneratorKind kind() const { return kind_; }
    int dim() const { return m_; }

    /// ln g(t), t > 0.
    double log_g(double t) const;

    /// psi(t) = g'(t) / g(t). At t = 0 the continuous extension is returned.
    double psi(double t) const;

    /// One draw of R.
    double sample_r(RandomSource& rng) const;

    RadialMoments moments() const;

    /// E[R] or NoMomentError.
    double mean_r() const;
    /// E[R^2] or NoMomentError.
    double mean_r2() const;

private:
    GeneratorKind kind_;
    int m_;
    double log_norm_;  // t-independent part of ln g
};

}  // namespace vmfe
