#include "alpha/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "alpha/error.hpp"
#include "alpha/eso.hpp"
#include "alpha/kernels.hpp"

namespace alpha {

double theta_next(double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::domain_error("theta must lie in (0, 1]");
    const double t2 = theta * theta;
    return (std::sqrt(t2 * t2 + 4.0 * t2) - t2) / 2.0;
}

std::vector<double> ThetaSchedule::rollout(std::size_t count) const {
    std::vector<double> out;
    out.reserve(count);
    double t = theta0;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(t);
        if (kind == Kind::accelerated) t = theta_next(t);
    }
    return out;
}

Variant parse_variant(std::string_view name) {
    if (name == "generic") return Variant::generic;
    if (name == "smooth") return Variant::smooth;
    if (name == "efficient") return Variant::efficient;
    throw ConfigError("unknown variant '" + std::string(name) + "' (generic, smooth, efficient)");
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::generic: return "generic";
        case Variant::smooth: return "smooth";
        case Variant::efficient: return "efficient";
    }
    return "?";
}

std::size_t SolverConfig::effective_stride() const {
    if (log_stride > 0) return log_stride;
    constexpr std::size_t kMaxRows = 10000;
    return iterations <= kMaxRows ? 1 : (iterations + kMaxRows - 1) / kMaxRows;
}

void validate(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config, const Vector& x0) {
    const std::size_t n = obj.num_blocks();
    if (config.sampling.num_blocks() != n)
        throw ConfigError("sampling has " + std::to_string(config.sampling.num_blocks()) + " blocks, problem has " +
                          std::to_string(n));
    if (config.v.size() != n) throw ConfigError("v has " + std::to_string(config.v.size()) + " entries, need " + std::to_string(n));
    if (!(reg.partition() == obj.partition())) throw ConfigError("regularizer partition differs from the problem's");
    reg.check_metric(obj.metric());
    if (static_cast<std::size_t>(x0.size()) != obj.dim()) throw ConfigError("x0 has the wrong dimension");
    const double theta0 = config.schedule.theta0;
    if (!(theta0 > 0.0 && theta0 <= 1.0)) throw ConfigError("theta0 must lie in (0, 1]");
    const double pmin = config.sampling.probability_vector().min();
    if (!reg.is_zero() && theta0 > pmin) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "theta0 = " << theta0 << " exceeds min_i p_i = " << pmin
            << "; a nonzero regularizer requires theta0 <= min_i p_i";
        throw ConfigError(msg.str());
    }
    if (!reg.in_domain(x0)) throw ConfigError("x0 is outside the domain of the regularizer");
}

namespace {

using Clock = std::chrono::steady_clock;

Eigen::Index off(const BlockPartition& part, std::size_t i) { return static_cast<Eigen::Index>(part.offset(i)); }
Eigen::Index len(const BlockPartition& part, std::size_t i) { return static_cast<Eigen::Index>(part.size(i)); }

/// Trace bookkeeping shared by the three realizations.
class Recorder {
public:
    Recorder(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config)
        : obj_(obj), reg_(reg), config_(config), stride_(config.effective_stride()), start_(Clock::now()) {
        if (config.track_average && config.schedule.kind == ThetaSchedule::Kind::constant)
            sum_ = Vector::Zero(static_cast<Eigen::Index>(obj.dim()));
    }

    bool wants_row(std::size_t k) const { return k % stride_ == 0 || k == config_.iterations; }
    bool wants_x(std::size_t k) const { return sum_.has_value() || (config_.evaluate && wants_row(k)); }

    /// Called after iteration k - 1 with x_k (null when not materialized) and theta_k.
    void record(std::size_t k, const Vector* x, double theta, const CostCounter& cost) {
        if (sum_ && x && k < config_.iterations) *sum_ += *x;
        if (!wants_row(k)) return;
        TraceRow row;
        row.k = k;
        row.theta = theta;
        row.touched_nnz = cost.touched;
        if (config_.evaluate && x) {
            row.f = obj_.value(*x);
            row.psi = reg_.value(*x);
            row.F = row.f + row.psi;
        } else {
            row.f = row.psi = row.F = std::nan("");
        }
        row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
        trace_.push_back(row);
    }

    RunResult finish(Vector x, const CostCounter& cost) {
        RunResult res;
        res.trace = std::move(trace_);
        res.cost = cost;
        const std::size_t K = config_.iterations;
        if (sum_ && K >= 1) {
            // x-hat_K = (x_K + theta0 sum_{l=1}^{K-1} x_l) / (1 + (K-1) theta0)
            const double t0 = config_.schedule.theta0;
            res.x_hat = (x + t0 * *sum_) / (1.0 + static_cast<double>(K - 1) * t0);
        }
        res.x = std::move(x);
        return res;
    }

private:
    const SmoothObjective& obj_;
    const Regularizer& reg_;
    const SolverConfig& config_;
    std::size_t stride_;
    Clock::time_point start_;
    std::optional<Vector> sum_;
    Trace trace_;
};

/// Theta sequence consumed one value per iteration.
class ThetaStream {
public:
    explicit ThetaStream(const ThetaSchedule& s) : kind_(s.kind), theta_(s.theta0) {}
    double current() const { return theta_; }
    double peek_next() const { return kind_ == ThetaSchedule::Kind::accelerated ? theta_next(theta_) : theta_; }
    void advance() { theta_ = peek_next(); }

private:
    ThetaSchedule::Kind kind_;
    double theta_;
};

/*
 * The basic iteration with a pluggable block update (prox for the generic variant,
 * the explicit line-8 step for the smooth one). Residuals of x and z are
 * maintained incrementally so that, outside the theta == 1 full-sampling
 * case, no iteration performs a full pass over A.
 */
template <class BlockUpdate>
RunResult alpha_loop(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config,
                     const Vector& x0, const Observer& observer, const BlockUpdate& update) {
    const auto& part = obj.partition();
    const auto& A = obj.matrix();
    const auto& p = config.sampling.probability_vector();
    const std::size_t K = config.iterations;
    const auto m = static_cast<Eigen::Index>(obj.rows());

    CostCounter cost;
    Recorder rec(obj, reg, config);
    SamplingDrawer drawer(config.sampling, config.seed);
    ThetaStream theta(config.schedule);
    BlockSet S;
    Vector grad, znew;

    // Full sampling with theta == 1: x = y = z, one sequence (x_{k+1} = z_{k+1}).
    if (config.schedule.is_identically_one() && config.sampling.kind() == Sampling::Kind::full) {
        Vector z = x0;
        Vector r(m);
        for (std::size_t k = 0; k < K; ++k) {
            A.multiply(z, r);
            cost.full_pass += A.nnz();
            drawer.draw(S);
            if (observer) observer({k, 1.0, z, z, z, S});
            Vector next = z;
            for (std::size_t i : S) {
                grad.resize(len(part, i));
                obj.block_gradient(i, r, grad, &cost);
                update(i, grad, z.segment(off(part, i), len(part, i)), ProxScale{1.0, config.v[i], p[i]},
                       next.segment(off(part, i), len(part, i)));
            }
            z.swap(next);
            rec.record(k + 1, &z, 1.0, cost);
        }
        return rec.finish(std::move(z), cost);
    }

    Vector x = x0, z = x0, y(x0.size());
    Vector rx = A.multiply(x0);
    cost.init += A.nnz();
    Vector rz = rx, ry(m);
    std::vector<Vector> steps;
    for (std::size_t k = 0; k < K; ++k) {
        const double th = theta.current();
        kernels::lincomb(1.0 - th, x.data(), th, z.data(), y.data(), static_cast<std::size_t>(y.size()));
        kernels::lincomb(1.0 - th, rx.data(), th, rz.data(), ry.data(), static_cast<std::size_t>(m));
        drawer.draw(S);
        if (observer) observer({k, th, x, y, z, S});

        // Every gradient is taken at y_k before any block moves.
        steps.resize(S.size());
        for (std::size_t s = 0; s < S.size(); ++s) {
            const std::size_t i = S[s];
            grad.resize(len(part, i));
            znew.resize(len(part, i));
            obj.block_gradient(i, ry, grad, &cost);
            update(i, grad, z.segment(off(part, i), len(part, i)), ProxScale{th, config.v[i], p[i]}, znew);
            steps[s] = znew - z.segment(off(part, i), len(part, i));
            z.segment(off(part, i), len(part, i)) = znew;
        }
        // x_{k+1} = y_k + theta p^{-1} (z_{k+1} - z_k)
        x = y;
        rx = ry;
        for (std::size_t s = 0; s < S.size(); ++s) {
            const std::size_t i = S[s];
            const double c = th / p[i];
            x.segment(off(part, i), len(part, i)) += c * steps[s];
            A.add_block_product(i, 1.0, steps[s], rz);
            A.add_block_product(i, c, steps[s], rx);
            cost.residual_updates += 2 * A.support_size(i);
        }
        theta.advance();
        rec.record(k + 1, &x, theta.current(), cost);
    }
    return rec.finish(std::move(x), cost);
}

void check_efficient_schedule(const ThetaSchedule& s) {
    if (s.is_identically_one()) return;
    // theta_k for k >= 1 must stay below 1 so that alpha_k != 0.
    const double t1 = s.kind == ThetaSchedule::Kind::accelerated ? theta_next(s.theta0) : s.theta0;
    if (!(t1 < 1.0)) throw ConfigError("efficient variant needs theta_k < 1 for all k >= 1, or theta == 1 throughout");
}

}  // namespace

RunResult run_generic(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config,
                      const Vector& x0, const Observer& observer) {
    validate(obj, reg, config, x0);
    const auto& metric = obj.metric();
    return alpha_loop(obj, reg, config, x0, observer,
                      [&](std::size_t i, const Vector& g, const Eigen::Ref<const Vector>& zi, const ProxScale& sc,
                          Eigen::Ref<Vector> out) { reg.prox_step(i, g, zi, sc, metric, out); });
}

RunResult run_smooth(const SmoothObjective& obj, const SolverConfig& config, const Vector& x0,
                     const Observer& observer) {
    const Regularizer none = Regularizer::zero(obj.partition_ptr());
    validate(obj, none, config, x0);
    const auto& metric = obj.metric();
    Vector d;
    return alpha_loop(obj, none, config, x0, observer,
                      [&](std::size_t i, const Vector& g, const Eigen::Ref<const Vector>& zi, const ProxScale& sc,
                          Eigen::Ref<Vector> out) {
                          // z^i - p_i / (v_i theta) B_i^{-1} grad_i f(y)
                          const double step = sc.p / (sc.v * sc.theta);
                          if (metric.kind(i) == BlockMetric::Kind::identity) {
                              out = zi - step * g;
                          } else {
                              d.resize(g.size());
                              metric.solve_block(i, g, d);
                              out = zi - step * d;
                          }
                      });
}

RunResult run_efficient(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config,
                        const Vector& x0, const Observer& observer) {
    validate(obj, reg, config, x0);
    check_efficient_schedule(config.schedule);
    const auto& part = obj.partition();
    const auto& A = obj.matrix();
    const auto& metric = obj.metric();
    const auto& p = config.sampling.probability_vector();
    const std::size_t K = config.iterations;
    const auto m = static_cast<Eigen::Index>(obj.rows());
    const auto N = static_cast<Eigen::Index>(obj.dim());

    CostCounter cost;
    Recorder rec(obj, reg, config);
    SamplingDrawer drawer(config.sampling, config.seed);
    ThetaStream theta(config.schedule);
    BlockSet S;
    Vector grad, znew;
    std::vector<Vector> steps;

    Vector z = x0;
    Vector w = A.multiply(x0);
    cost.init += A.nnz();

    if (config.schedule.is_identically_one()) {
        // y_k = z_k and x_{k+1} = z_k + p^{-1} (z_{k+1} - z_k).
        Vector x = x0;
        for (std::size_t k = 0; k < K; ++k) {
            drawer.draw(S);
            if (observer) observer({k, 1.0, x, z, z, S});
            steps.resize(S.size());
            const bool need_x = rec.wants_x(k + 1) || observer || k + 1 == K;
            if (need_x) x = z;
            for (std::size_t s = 0; s < S.size(); ++s) {
                const std::size_t i = S[s];
                grad.resize(len(part, i));
                znew.resize(len(part, i));
                obj.block_gradient(i, w, grad, &cost);
                reg.prox_step(i, grad, z.segment(off(part, i), len(part, i)), ProxScale{1.0, config.v[i], p[i]},
                              metric, znew);
                steps[s] = znew - z.segment(off(part, i), len(part, i));
                if (need_x) {
                    if (p[i] == 1.0)
                        x.segment(off(part, i), len(part, i)) = znew;
                    else
                        x.segment(off(part, i), len(part, i)) += steps[s] / p[i];
                }
            }
            for (std::size_t s = 0; s < S.size(); ++s) {
                const std::size_t i = S[s];
                z.segment(off(part, i), len(part, i)) += steps[s];
                A.add_block_product(i, 1.0, steps[s], w);
                cost.residual_updates += A.support_size(i);
            }
            rec.record(k + 1, need_x ? &x : nullptr, 1.0, cost);
        }
        return rec.finish(std::move(x), cost);
    }

    // alpha_0 = 1, alpha_k = (1 - theta_k) alpha_{k-1}; y_k = z_k + alpha_k g_k, x_{k+1} = z_{k+1} + alpha_k g_{k+1}.
    Vector g = Vector::Zero(N);
    Vector u = Vector::Zero(m);
    double alpha = 1.0;
    double alpha_prev = 1.0;  // alpha_{k-1}; x_0 = z_0 because g_0 = 0
    Vector x, y;
    Vector x_final;
    for (std::size_t k = 0; k < K; ++k) {
        const double th = theta.current();
        drawer.draw(S);
        if (observer || k + 1 == K) {
            y = z + alpha * g;
            if (observer) {
                x = z + alpha_prev * g;
                observer({k, th, x, y, z, S});
            }
        }
        steps.resize(S.size());
        auto residual_y = [&](std::size_t j) {
            const auto jj = static_cast<Eigen::Index>(j);
            return alpha * u[jj] + w[jj];
        };
        for (std::size_t s = 0; s < S.size(); ++s) {
            const std::size_t i = S[s];
            grad.resize(len(part, i));
            znew.resize(len(part, i));
            obj.block_gradient_at(i, residual_y, grad, &cost);
            reg.prox_step(i, grad, z.segment(off(part, i), len(part, i)), ProxScale{th, config.v[i], p[i]}, metric,
                          znew);
            steps[s] = znew - z.segment(off(part, i), len(part, i));
        }
        if (k + 1 == K) {
            // OUTPUT: x_{k+1} = z_k + alpha_k g_k + theta_k p^{-1} (z_{k+1} - z_k)
            x_final = y;
            for (std::size_t s = 0; s < S.size(); ++s)
                x_final.segment(off(part, S[s]), len(part, S[s])) += (th / p[S[s]]) * steps[s];
        }
        for (std::size_t s = 0; s < S.size(); ++s) {
            const std::size_t i = S[s];
            const double c = (1.0 - th / p[i]) / alpha;
            z.segment(off(part, i), len(part, i)) += steps[s];
            g.segment(off(part, i), len(part, i)) -= c * steps[s];
            A.add_block_product(i, 1.0, steps[s], w);
            // u = A g, so u moves with g (the minus sign follows from the definition of u).
            A.add_block_product(i, -c, steps[s], u);
            cost.residual_updates += 2 * A.support_size(i);
        }
        theta.advance();
        alpha_prev = alpha;
        alpha *= 1.0 - theta.current();
        if (alpha < 1e-100) {
            // Rescale the representation before alpha underflows; y = z + alpha g is unchanged.
            g *= alpha;
            u *= alpha;
            alpha_prev /= alpha;
            alpha = 1.0;
        }
        if (k + 1 == K) {
            rec.record(k + 1, &x_final, theta.current(), cost);
        } else if (rec.wants_x(k + 1)) {
            x = z + alpha_prev * g;
            rec.record(k + 1, &x, theta.current(), cost);
        } else {
            rec.record(k + 1, nullptr, theta.current(), cost);
        }
    }
    if (K == 0) x_final = x0;
    return rec.finish(std::move(x_final), cost);
}

RunResult run(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config, const Vector& x0,
              const Observer& observer) {
    switch (config.variant) {
        case Variant::generic:
            return run_generic(obj, reg, config, x0, observer);
        case Variant::smooth:
            if (!reg.is_zero()) throw ConfigError("the smooth variant requires psi = 0");
            return run_smooth(obj, config, x0, observer);
        case Variant::efficient:
            return run_efficient(obj, reg, config, x0, observer);
    }
    throw ConfigError("unknown variant");
}

Preset parse_preset(std::string_view name) {
    static const std::pair<std::string_view, Preset> table[] = {
        {"gd", Preset::gd},           {"agd", Preset::agd},         {"pcd", Preset::pcd},
        {"apcd", Preset::apcd},       {"prox_gd", Preset::prox_gd}, {"acc_prox_gd", Preset::acc_prox_gd},
        {"pcdm", Preset::pcdm},       {"approxis", Preset::approxis},
    };
    for (const auto& [n, p] : table)
        if (n == name) return p;
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::gd: return "gd";
        case Preset::agd: return "agd";
        case Preset::pcd: return "pcd";
        case Preset::apcd: return "apcd";
        case Preset::prox_gd: return "prox_gd";
        case Preset::acc_prox_gd: return "acc_prox_gd";
        case Preset::pcdm: return "pcdm";
        case Preset::approxis: return "approxis";
    }
    return "?";
}

Sampling preset_default_sampling(Preset preset, std::size_t n) {
    const bool full_family = preset == Preset::gd || preset == Preset::agd || preset == Preset::prox_gd ||
                             preset == Preset::acc_prox_gd;
    return full_family ? Sampling::full(n) : Sampling::serial_uniform(n);
}

SolverConfig make_preset(Preset preset, const SmoothObjective& obj, const Regularizer& reg,
                         std::optional<Sampling> sampling, std::optional<Weights> v) {
    const std::size_t n = obj.num_blocks();
    const bool smooth_only = preset == Preset::gd || preset == Preset::agd || preset == Preset::pcd || preset == Preset::apcd;
    if (smooth_only && !reg.is_zero())
        throw ConfigError("preset " + std::string(preset_name(preset)) + " requires psi = 0; use its proximal counterpart");
    const bool full_family = preset == Preset::gd || preset == Preset::agd || preset == Preset::prox_gd ||
                             preset == Preset::acc_prox_gd;
    if (!sampling) sampling = preset_default_sampling(preset, n);
    if (full_family && sampling->kind() != Sampling::Kind::full)
        throw ConfigError("preset " + std::string(preset_name(preset)) + " uses the full sampling");

    const double pmin = sampling->probability_vector().min();
    ThetaSchedule schedule;
    switch (preset) {
        case Preset::gd:
        case Preset::prox_gd:
            schedule = ThetaSchedule::constant(1.0);
            break;
        case Preset::agd:
        case Preset::acc_prox_gd:
        case Preset::apcd:
            schedule = ThetaSchedule::accelerated(1.0);
            break;
        case Preset::pcd:
            schedule = ThetaSchedule::constant(pmin);
            break;
        case Preset::pcdm:
            if (!sampling->is_uniform()) throw ConfigError("pcdm requires a uniform sampling");
            // Uniform: every p_i equals E|S| / n.
            schedule = ThetaSchedule::constant(pmin);
            break;
        case Preset::approxis:
            schedule = ThetaSchedule::accelerated(pmin);
            break;
    }
    Weights vv = v ? *v : default_eso(obj, *sampling);
    return SolverConfig{std::move(*sampling), std::move(vv), schedule};
}

}  // namespace alpha
