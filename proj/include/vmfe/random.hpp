#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Core>

namespace vmfe {

/// Seeded pseudo-random source. Not thread-safe; give each thread its own.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double gamma(double shape);
    double beta(double a, double b);
    double chi_squared(double dof);

    /// Vector of i.i.d. standard normals.
    Eigen::VectorXd normal_vector(Eigen::Index m);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stable 64-bit mix of a master seed with a list of keys (splitmix64 chain).
/// Identical inputs give identical outputs on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

}  // namespace vmfe
