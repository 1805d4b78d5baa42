#include "vmfe/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "vmfe/errors.hpp"
#include "vmfe/special_functions.hpp"

namespace vmfe {

std::string_view to_string(FitMethod method) {
    return method == FitMethod::GradientDescent ? "gd" : "fixed-point";
}

FitMethod parse_fit_method(std::string_view tag) {
    if (tag == "gd" || tag == "gradient-descent") return FitMethod::GradientDescent;
    if (tag == "fixed-point" || tag == "fp") return FitMethod::FixedPoint;
    throw ParseError("unknown fit method '" + std::string(tag) + "' (expected gd or fixed-point)");
}

std::string_view to_string(InitStrategy init) {
    switch (init) {
        case InitStrategy::Random: return "random";
        case InitStrategy::Moment: return "moment";
        case InitStrategy::Provided: return "provided";
    }
    return "unknown";
}

InitStrategy parse_init_strategy(std::string_view tag) {
    if (tag == "random") return InitStrategy::Random;
    if (tag == "moment") return InitStrategy::Moment;
    if (tag == "provided") return InitStrategy::Provided;
    throw ParseError("unknown init strategy '" + std::string(tag) + "' (expected random, moment or provided)");
}

void FitConfig::validate() const {
    if (!(learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");
    if (max_iters < 0) throw DomainError("max_iters must be >= 0");
    if (max_backtracks < 0) throw DomainError("max_backtracks must be >= 0");
    if (init == InitStrategy::Provided && !initial) {
        throw DomainError("init = provided requires initial parameters");
    }
}

namespace {

// (mu, Lambda, v) without the invariant checks of VmfEllipticalParams.
struct State {
    Eigen::VectorXd mu;
    Eigen::MatrixXd lambda;
    Eigen::VectorXd v;
};

State to_state(const VmfEllipticalParams& p) { return {p.mu(), p.lambda(), p.vmf().natural()}; }

VmfEllipticalParams to_params(const State& s, GeneratorKind kind) {
    return VmfEllipticalParams(s.mu, s.lambda, VmfParams::from_natural(s.v), kind);
}

// Whitened residuals y_i = Lambda^{-1}(x_i - mu), stored as columns, and t_i = ||y_i||^2.
struct Whitened {
    Eigen::MatrixXd y;
    Eigen::VectorXd t;
};

Whitened whiten_all(const SampleMatrix& data, const Eigen::VectorXd& mu, const Eigen::MatrixXd& lambda) {
    Whitened w;
    w.y = data.matrix().transpose();
    w.y.colwise() -= mu;
    lambda.triangularView<Eigen::Lower>().solveInPlace(w.y);
    w.t = w.y.colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < w.t.size(); ++i) {
        if (!(w.t[i] >= kMinMahalanobis)) {
            throw DegeneratePointError("data row " + std::to_string(i) + " coincides with the location parameter",
                                       static_cast<std::size_t>(i));
        }
    }
    return w;
}

void require_shape(const SampleMatrix& data, int m) {
    if (data.dim() != m) {
        throw ShapeError("data has dimension " + std::to_string(data.dim()) + ", parameters have " +
                         std::to_string(m));
    }
}

double loglik_from(const Whitened& w, const Eigen::MatrixXd& lambda, const Eigen::VectorXd& v,
                   const RadialGenerator& gen) {
    const Eigen::Index n = w.t.size();
    const int m = gen.dim();
    const double tau = v.norm();
    const double log_det = 2.0 * lambda.diagonal().array().log().sum();
    double total = n * (-0.5 * log_det + vmf_log_normalizer(m, tau));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sqrt_t = std::sqrt(w.t[i]);
        total += v.dot(w.y.col(i)) / sqrt_t + gen.log_g(w.t[i]);
    }
    return total;
}

double loglik_state(const SampleMatrix& data, const State& s, const RadialGenerator& gen) {
    return loglik_from(whiten_all(data, s.mu, s.lambda), s.lambda, s.v, gen);
}

Eigen::VectorXd resultant(const Whitened& w) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(w.y.rows());
    for (Eigen::Index i = 0; i < w.t.size(); ++i) s += w.y.col(i) / std::sqrt(w.t[i]);
    return s;
}

// Closed-form maximizer over v: rho^{-1}(||s/n||) s/||s||. With clamp set the
// resultant length is capped below one instead of raising DegenerateDataError.
Eigen::VectorXd optimal_v(const Whitened& w, int m, bool clamp) {
    const Eigen::VectorXd s = resultant(w);
    const double n = static_cast<double>(w.t.size());
    const double s_norm = s.norm();
    double r = s_norm / n;
    if (s_norm == 0.0) return Eigen::VectorXd::Zero(s.size());
    if (r >= special::kMaxResultantLength) {
        if (!clamp) {
            throw DegenerateDataError("mean resultant length " + std::to_string(r) +
                                      " of the whitened directions is numerically one");
        }
        r = 1.0 - 1e-9;
    }
    return (special::inverse_bessel_ratio(m, r) / s_norm) * s;
}

Gradients gradients_from(const Whitened& w, const State& s, const RadialGenerator& gen) {
    const Eigen::Index m = s.mu.size();
    const Eigen::Index n = w.t.size();
    // g_i = dL_i/dy_i = v/sqrt(t) + c_i y_i with c_i = 2 psi(t_i) - v.z_i / t_i.
    Eigen::VectorXd h = Eigen::VectorXd::Zero(m);  // sum_i g_i
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);  // sum_i g_i y_i^T
    Eigen::VectorXd z_sum = Eigen::VectorXd::Zero(m);
    double inv_sqrt_t_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto y = w.y.col(i);
        const double t = w.t[i];
        const double sqrt_t = std::sqrt(t);
        const double c = 2.0 * gen.psi(t) - s.v.dot(y) / (sqrt_t * t);
        z_sum += y / sqrt_t;
        inv_sqrt_t_sum += 1.0 / sqrt_t;
        h += c * y;
        G.noalias() += c * y * y.transpose();
    }
    h += inv_sqrt_t_sum * s.v;
    G.noalias() += s.v * z_sum.transpose();

    Gradients out;
    const double tau = s.v.norm();
    out.v = z_sum;
    if (tau > 0.0) out.v -= (n * special::bessel_ratio(static_cast<int>(m), tau) / tau) * s.v;

    // dL/dmu = -Lambda^{-T} h ; dL/dLambda = -Lambda^{-T} (n I + G).
    const auto lambda_t = s.lambda.transpose().triangularView<Eigen::Upper>();
    out.mu = -lambda_t.solve(h);
    G.diagonal().array() += static_cast<double>(n);
    out.lambda = -lambda_t.solve(G);
    return out;
}

Eigen::MatrixXd nearest_pd(const Eigen::MatrixXd& s, double floor) {
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    Eigen::VectorXd values = eig.eigenvalues().cwiseMax(floor);
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw DomainError("scatter matrix is not positive definite");
    Eigen::MatrixXd l = llt.matrixL();
    return l;
}

bool lambda_valid(const Eigen::MatrixXd& lambda) {
    return lambda.allFinite() && (lambda.diagonal().array() > 0.0).all();
}

State fixed_point_state(const SampleMatrix& data, const State& s0, const RadialGenerator& gen) {
    const int m = gen.dim();
    const double n = static_cast<double>(data.size());
    State s = s0;

    Whitened w = whiten_all(data, s.mu, s.lambda);
    s.v = optimal_v(w, m, false);

    // Location: sum_i w_i (x_i - mu) = Lambda v sum_i t_i^{-1/2}, w_i = v.z_i/t_i - 2 psi(t_i).
    {
        Eigen::VectorXd weighted = Eigen::VectorXd::Zero(m);
        double denom = 0.0;
        double inv_sqrt_t_sum = 0.0;
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            const double t = w.t[i];
            const double sqrt_t = std::sqrt(t);
            const double weight = s.v.dot(w.y.col(i)) / (sqrt_t * t) - 2.0 * gen.psi(t);
            weighted += weight * data.row(i).transpose();
            denom += weight;
            inv_sqrt_t_sum += 1.0 / sqrt_t;
        }
        if (std::abs(denom) < 1e-12) throw StalledStepError("location update denominator vanished");
        s.mu = (weighted - inv_sqrt_t_sum * (s.lambda * s.v)) / denom;
        if (!s.mu.allFinite()) throw StalledStepError("location update is not finite");
    }

    // Scatter: n Sigma = sum_i w_i d_i d_i^T - Lambda v s^T Lambda^T.
    w = whiten_all(data, s.mu, s.lambda);
    {
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd z_sum = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            const double t = w.t[i];
            const double sqrt_t = std::sqrt(t);
            const double weight = s.v.dot(w.y.col(i)) / (sqrt_t * t) - 2.0 * gen.psi(t);
            const Eigen::VectorXd d = data.row(i).transpose() - s.mu;
            scatter.noalias() += weight * d * d.transpose();
            z_sum += w.y.col(i) / sqrt_t;
        }
        const Eigen::VectorXd lv = s.lambda * s.v;
        const Eigen::VectorXd ls = s.lambda * z_sum;
        scatter.noalias() -= lv * ls.transpose();
        scatter /= n;
        s.lambda = cholesky_lower(nearest_pd(scatter, 1e-10));
    }
    return s;
}

double median_inplace(std::vector<double>& values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

std::vector<double> column(const SampleMatrix& data, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) out[static_cast<std::size_t>(i)] = data.matrix()(i, j);
    return out;
}

// Median absolute deviation of each coordinate, floored away from zero.
Eigen::VectorXd coordinate_mad(const SampleMatrix& data, const Eigen::VectorXd& center) {
    Eigen::VectorXd mad(data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        std::vector<double> dev = column(data, j);
        for (double& d : dev) d = std::abs(d - center[j]);
        mad[j] = std::max(median_inplace(dev), 1e-8);
    }
    return mad;
}

Eigen::VectorXd coordinate_median(const SampleMatrix& data) {
    Eigen::VectorXd med(data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        std::vector<double> col = column(data, j);
        med[j] = median_inplace(col);
    }
    return med;
}

// Mean and covariance of rows; covariance gets a small ridge if it is not PD.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> mean_and_cov(const RowMatrix& rows, const Eigen::VectorXd& fallback_scale) {
    const Eigen::VectorXd mu = rows.colwise().mean().transpose();
    const RowMatrix centered = rows.rowwise() - mu.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / std::max<double>(1.0, static_cast<double>(rows.rows()));
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().array() > 1e-8).all()) {
        cov += fallback_scale.array().square().matrix().asDiagonal();
    }
    return {mu, cov};
}

Eigen::VectorXd v_from_directions(const SampleMatrix& data, const Eigen::VectorXd& mu, const Eigen::MatrixXd& lambda) {
    const int m = static_cast<int>(data.dim());
    try {
        const Whitened w = whiten_all(data, mu, lambda);
        const Eigen::VectorXd s = resultant(w);
        const double r = std::min(s.norm() / static_cast<double>(data.size()), 0.99);
        if (r == 0.0) return Eigen::VectorXd::Zero(m);
        return special::inverse_bessel_ratio(m, r) * s.normalized();
    } catch (const DegeneratePointError&) {
        return Eigen::VectorXd::Zero(m);
    }
}

}  // namespace

double log_likelihood(const SampleMatrix& data, const VmfEllipticalParams& params) {
    require_shape(data, params.dim());
    if (data.size() == 0) return 0.0;
    const Whitened w = whiten_all(data, params.mu(), params.lambda());
    return loglik_from(w, params.lambda(), params.vmf().natural(), params.generator());
}

Gradients gradients(const SampleMatrix& data, const VmfEllipticalParams& params) {
    require_shape(data, params.dim());
    const State s = to_state(params);
    return gradients_from(whiten_all(data, s.mu, s.lambda), s, params.generator());
}

Eigen::VectorXd grad_v(const SampleMatrix& data, const VmfEllipticalParams& params) {
    return gradients(data, params).v;
}

Eigen::VectorXd grad_mu(const SampleMatrix& data, const VmfEllipticalParams& params) {
    return gradients(data, params).mu;
}

Eigen::MatrixXd grad_lambda(const SampleMatrix& data, const VmfEllipticalParams& params) {
    return gradients(data, params).lambda;
}

Eigen::MatrixXd project_lower(const Eigen::MatrixXd& g) { return g.triangularView<Eigen::Lower>(); }

VmfEllipticalParams fixed_point_step(const SampleMatrix& data, const VmfEllipticalParams& params) {
    require_shape(data, params.dim());
    if (data.size() == 0) throw DomainError("fixed_point_step requires at least one observation");
    return to_params(fixed_point_state(data, to_state(params), params.generator()), params.generator_kind());
}

VmfEllipticalParams moment_init(const SampleMatrix& data, GeneratorKind generator) {
    const Eigen::Index m = data.dim();
    if (data.size() == 0) throw DomainError("cannot initialize from an empty sample");
    const Eigen::VectorXd median = coordinate_median(data);
    const Eigen::VectorXd mad = coordinate_mad(data, median);

    Eigen::VectorXd mu;
    Eigen::MatrixXd cov;
    if (generator == GeneratorKind::Gaussian) {
        std::tie(mu, cov) = mean_and_cov(data.matrix(), mad);
    } else {
        // Sample covariance diverges for Cauchy data: keep the 80% of rows
        // closest to the coordinate median in MAD-scaled distance.
        std::vector<std::pair<double, Eigen::Index>> ranked;
        ranked.reserve(static_cast<std::size_t>(data.size()));
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            const Eigen::VectorXd d = (data.row(i).transpose() - median).cwiseQuotient(mad);
            ranked.emplace_back(d.squaredNorm(), i);
        }
        std::sort(ranked.begin(), ranked.end());
        const auto keep = std::max<Eigen::Index>(m + 1, static_cast<Eigen::Index>(0.8 * data.size()));
        const Eigen::Index kept = std::min(keep, data.size());
        RowMatrix rows(kept, m);
        for (Eigen::Index k = 0; k < kept; ++k) rows.row(k) = data.row(ranked[static_cast<std::size_t>(k)].second);
        std::tie(std::ignore, cov) = mean_and_cov(rows, mad);
        mu = median;
    }
    const Eigen::MatrixXd lambda = cholesky_lower(nearest_pd(cov, 1e-10));
    const Eigen::VectorXd v = v_from_directions(data, mu, lambda);
    return VmfEllipticalParams(mu, lambda, VmfParams::from_natural(v), generator);
}

VmfEllipticalParams random_init(const SampleMatrix& data, GeneratorKind generator, RandomSource& rng) {
    const Eigen::Index m = data.dim();
    if (data.size() == 0) throw DomainError("cannot initialize from an empty sample");
    // Location uniform in the bounding box of the data.
    const Eigen::VectorXd lo = data.matrix().colwise().minCoeff();
    const Eigen::VectorXd hi = data.matrix().colwise().maxCoeff();
    Eigen::VectorXd mu(m);
    for (Eigen::Index j = 0; j < m; ++j) mu[j] = lo[j] + rng.uniform() * (hi[j] - lo[j]);
    const Eigen::VectorXd mad = coordinate_mad(data, coordinate_median(data));
    std::vector<double> mads(mad.data(), mad.data() + m);
    const double scale = median_inplace(mads);
    const Eigen::MatrixXd lambda = scale * Eigen::MatrixXd::Identity(m, m);
    const UnitVector direction = uniform_sphere_sample(m, rng);
    return VmfEllipticalParams(mu, lambda, VmfParams(direction, 1.0), generator);
}

VmfEllipticalParams skew_init(const SampleMatrix& data, GeneratorKind generator) {
    const VmfEllipticalParams base = moment_init(data, generator);
    const Eigen::Index m = data.dim();
    std::vector<Eigen::VectorXd> whitened;
    std::vector<double> norms;
    whitened.reserve(static_cast<std::size_t>(data.size()));
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        whitened.push_back(base.lambda().triangularView<Eigen::Lower>().solve(data.row(i).transpose() - base.mu()));
        norms.push_back(whitened.back().norm());
    }
    // Heavy tails swamp third moments; use the central 80% for Cauchy.
    double cutoff = std::numeric_limits<double>::infinity();
    if (generator == GeneratorKind::Cauchy) cutoff = quantile(norms, 0.8);
    Eigen::VectorXd skew = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < whitened.size(); ++i) {
        if (norms[i] <= cutoff) skew += norms[i] * norms[i] * whitened[i];
    }
    if (!(skew.norm() > 0.0) || !skew.allFinite()) return base;
    // The location sits on the short side of the skewed cloud; two whitened
    // units lands inside the right basin across the concentrations we fit.
    const Eigen::VectorXd mu = base.mu() - 2.0 * (base.lambda() * skew.normalized());
    const Eigen::VectorXd v = v_from_directions(data, mu, base.lambda());
    return VmfEllipticalParams(mu, base.lambda(), VmfParams::from_natural(v), generator);
}

double error_ratio(double l_est, double l_true) {
    if (!(std::abs(l_true) >= 1e-12)) {
        throw DomainError("error ratio is undefined for a reference log-likelihood of (nearly) zero");
    }
    return std::abs(l_est - l_true) / std::abs(l_true);
}

namespace {

class Optimizer {
public:
    Optimizer(const SampleMatrix& data, const RadialGenerator& gen, const FitConfig& config)
        : data_(data), gen_(gen), config_(config), n_(static_cast<double>(data.size())) {}

    double evaluate(const State& s) const {
        if (!lambda_valid(s.lambda) || !s.mu.allFinite() || !s.v.allFinite()) {
            return -std::numeric_limits<double>::infinity();
        }
        try {
            return loglik_state(data_, s, gen_);
        } catch (const DomainError&) {
            return -std::numeric_limits<double>::infinity();
        }
    }

    // Exact v update followed by a backtracked gradient step on (mu, Lambda).
    double gradient_iteration(State& s, double current) const {
        {
            State candidate = s;
            candidate.v = optimal_v(whiten_all(data_, s.mu, s.lambda), gen_.dim(), true);
            const double value = evaluate(candidate);
            if (value >= current) {
                s = std::move(candidate);
                current = value;
            }
        }
        const Gradients g = gradients_from(whiten_all(data_, s.mu, s.lambda), s, gen_);
        const Eigen::VectorXd step_mu = g.mu / n_;
        const Eigen::MatrixXd step_lambda = project_lower(g.lambda) / n_;
        double step = config_.learning_rate;
        for (int k = 0; k <= config_.max_backtracks; ++k, step *= 0.5) {
            State candidate{s.mu + step * step_mu, s.lambda + step * step_lambda, s.v};
            const double value = evaluate(candidate);
            if (value >= current) {
                s = std::move(candidate);
                return value;
            }
        }
        return current;
    }

    // Two fixed-point sweeps extrapolated with SQUAREM (the plain map crawls
    // when location and skew are strongly coupled). Falls back to a damped
    // single sweep, then to a gradient iteration, whenever the likelihood would drop.
    double fixed_point_iteration(State& s, double current) const {
        try {
            const State f1 = fixed_point_state(data_, s, gen_);
            const State f2 = fixed_point_state(data_, f1, gen_);
            const double l2 = evaluate(f2);
            const State r = combine(1.0, f1, -1.0, s);
            const State curvature = combine(1.0, combine(1.0, f2, -2.0, f1), 1.0, s);
            double alpha = -norm(r) / norm(curvature);
            if (!std::isfinite(alpha) || alpha > -1.0) alpha = -1.0;
            for (int k = 0; k <= config_.max_backtracks && alpha < -1.0; ++k, alpha = 0.5 * (alpha - 1.0)) {
                try {
                    const State jump = combine(1.0, combine(1.0, s, -2.0 * alpha, r), alpha * alpha, curvature);
                    if (!lambda_valid(jump.lambda)) continue;
                    State candidate = fixed_point_state(data_, jump, gen_);
                    const double value = evaluate(candidate);
                    if (value >= current && value >= l2) {
                        s = std::move(candidate);
                        return value;
                    }
                } catch (const Error&) {
                }
            }
            if (l2 >= current) {
                s = f2;
                return l2;
            }
        } catch (const StalledStepError&) {
        } catch (const DomainError&) {
        }
        return damped_iteration(s, current);
    }

private:
    static State combine(double a, const State& x, double b, const State& y) {
        return {a * x.mu + b * y.mu, a * x.lambda + b * y.lambda, a * x.v + b * y.v};
    }

    static double norm(const State& x) {
        return std::sqrt(x.mu.squaredNorm() + x.lambda.squaredNorm() + x.v.squaredNorm());
    }

    double damped_iteration(State& s, double current) const {
        try {
            const State target = fixed_point_state(data_, s, gen_);
            double alpha = 1.0;
            for (int k = 0; k <= config_.max_backtracks; ++k, alpha *= 0.5) {
                State candidate = combine(1.0 - alpha, s, alpha, target);
                const double value = evaluate(candidate);
                if (value >= current) {
                    s = std::move(candidate);
                    return value;
                }
            }
        } catch (const StalledStepError&) {
        } catch (const DomainError&) {
        }
        return gradient_iteration(s, current);
    }

    const SampleMatrix& data_;
    const RadialGenerator& gen_;
    const FitConfig& config_;
    double n_;
};

FitReport run_from(const Optimizer& optimizer, const VmfEllipticalParams& start, const FitConfig& config,
                   RandomSource& rng) {
    const int m = start.dim();
    State state = to_state(start);
    double current = optimizer.evaluate(state);
    for (int attempt = 0; attempt < 5 && !std::isfinite(current); ++attempt) {
        // Starting location sits on a data point: nudge it.
        state.mu += 1e-6 * state.lambda.diagonal().cwiseProduct(rng.normal_vector(m));
        current = optimizer.evaluate(state);
    }
    if (!std::isfinite(current)) throw ConvergenceError("log-likelihood is not finite at the initial point");

    std::vector<double> trace{current};
    bool converged = false;
    int iters = 0;
    while (iters < config.max_iters) {
        ++iters;
        const double next = config.method == FitMethod::GradientDescent
                                ? optimizer.gradient_iteration(state, current)
                                : optimizer.fixed_point_iteration(state, current);
        trace.push_back(next);
        if (!std::isfinite(next)) throw ConvergenceError("log-likelihood became non-finite");
        const double change = std::abs(next - current);
        current = next;
        if (change <= config.tol * std::abs(trace[trace.size() - 2])) {
            converged = true;
            break;
        }
    }

    return FitReport{to_params(state, start.generator_kind()), std::move(trace), converged, iters, {}};
}

}  // namespace

FitReport fit(const SampleMatrix& data, GeneratorKind generator, const FitConfig& config, RandomSource& rng) {
    config.validate();
    if (data.size() == 0) throw DomainError("fit requires at least one observation");
    const int m = static_cast<int>(data.dim());
    const RadialGenerator gen(generator, m);

    std::vector<std::string> warnings;
    if (data.size() <= m) {
        warnings.push_back("only " + std::to_string(data.size()) + " observations for dimension " +
                           std::to_string(m) + "; the scatter estimate is poorly determined");
    }

    VmfEllipticalParams start = [&] {
        switch (config.init) {
            case InitStrategy::Random: return random_init(data, generator, rng);
            case InitStrategy::Provided: {
                const VmfEllipticalParams& p = *config.initial;
                require_shape(data, p.dim());
                return VmfEllipticalParams(p.mu(), p.lambda(), p.vmf(), generator);
            }
            case InitStrategy::Moment: break;
        }
        return moment_init(data, generator);
    }();

    const Optimizer optimizer(data, gen, config);
    FitReport best = run_from(optimizer, start, config, rng);
    if (config.skew_restart && config.init != InitStrategy::Provided) {
        try {
            FitReport other = run_from(optimizer, skew_init(data, generator), config, rng);
            if (other.final_loglik() > best.final_loglik()) best = std::move(other);
        } catch (const Error&) {
        }
    }
    best.warnings.insert(best.warnings.begin(), warnings.begin(), warnings.end());
    return best;
}

}  // namespace vmfe
