#include "vmfe/random.hpp"

namespace vmfe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double RandomSource::uniform() {
    // 53 random bits, shifted off zero.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomSource::normal() { return normal_(engine_); }

double RandomSource::gamma(double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(engine_);
}

double RandomSource::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

double RandomSource::chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

Eigen::VectorXd RandomSource::normal_vector(Eigen::Index m) {
    Eigen::VectorXd out(m);
    for (Eigen::Index i = 0; i < m; ++i) out[i] = normal();
    return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = splitmix64(master);
    for (const std::uint64_t key : keys) {
        h = splitmix64(h ^ splitmix64(key));
    }
    return h;
}

}  // namespace vmfe
