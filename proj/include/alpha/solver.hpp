#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alpha/objective.hpp"
#include "alpha/regularizer.hpp"
#include "alpha/sampling.hpp"

namespace alpha {

/// theta_{k+1} = (sqrt(theta^4 + 4 theta^2) - theta^2) / 2, for theta in (0, 1].
double theta_next(double theta);

struct ThetaSchedule {
    enum class Kind { constant, accelerated };
    Kind kind = Kind::constant;
    double theta0 = 1.0;

    static ThetaSchedule constant(double theta0) { return {Kind::constant, theta0}; }
    static ThetaSchedule accelerated(double theta0) { return {Kind::accelerated, theta0}; }
    /// theta_0, ..., theta_{count-1}.
    std::vector<double> rollout(std::size_t count) const;
    bool is_identically_one() const { return kind == Kind::constant && theta0 == 1.0; }
};

enum class Variant { generic, smooth, efficient };

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

struct SolverConfig {
    Sampling sampling;
    Weights v;
    ThetaSchedule schedule;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    Variant variant = Variant::generic;
    std::size_t log_stride = 0;   // 0: every iteration up to 10^4, else ceil(K / 10^4)
    bool evaluate = true;         // per-row F(x_k); off for cost benchmarks
    bool track_average = false;   // x-hat of the constant-theta theorems

    std::size_t effective_stride() const;
};

struct TraceRow {
    std::size_t k = 0;
    double F = 0.0;
    double f = 0.0;
    double psi = 0.0;
    double theta = 0.0;
    std::uint64_t touched_nnz = 0;
    std::int64_t wall_ns = 0;
};

using Trace = std::vector<TraceRow>;

struct RunResult {
    Trace trace;
    Vector x;
    std::optional<Vector> x_hat;
    CostCounter cost;
};

/// State at the start of iteration k, before S_k is applied.
struct IterationView {
    std::size_t k;
    double theta;
    const Vector& x;
    const Vector& y;
    const Vector& z;
    const BlockSet& S;
};

using Observer = std::function<void(const IterationView&)>;

/// Rejects theta0 outside (0, 1], theta0 > min p with a nonzero psi, x0 outside dom psi, size mismatches.
void validate(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config, const Vector& x0);

/// Generic: y_k = (1 - theta) x_k + theta z_k, sampled prox steps, x_{k+1} = y_k + theta p^{-1} (z_{k+1} - z_k).
RunResult run_generic(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config,
                      const Vector& x0, const Observer& observer = {});
/// Smooth: the psi = 0 specialization with the explicit step z^i -= p_i / (v_i theta) B_i^{-1} grad_i f(y).
RunResult run_smooth(const SmoothObjective& obj, const SolverConfig& config, const Vector& x0,
                     const Observer& observer = {});
/*
 * Efficient: iterates (z_k, g_k, alpha_k) with residuals w = A z and u = A g,
 * so one iteration reads only the column supports of the sampled blocks.
 */
RunResult run_efficient(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config,
                        const Vector& x0, const Observer& observer = {});

/// Dispatches on config.variant.
RunResult run(const SmoothObjective& obj, const Regularizer& reg, const SolverConfig& config, const Vector& x0,
              const Observer& observer = {});

enum class Preset { gd, agd, pcd, apcd, prox_gd, acc_prox_gd, pcdm, approxis };

Preset parse_preset(std::string_view name);
std::string_view preset_name(Preset p);

/// Full sampling for the gradient methods, serial uniform for the coordinate methods.
Sampling preset_default_sampling(Preset preset, std::size_t n);

/*
 * Sampling, schedule and v of the named method. `sampling` defaults to full
 * (gd family) or serial uniform (coordinate methods); `v` defaults to the
 * exact ESO of that sampling. iterations and seed are left for the caller.
 */
SolverConfig make_preset(Preset preset, const SmoothObjective& obj, const Regularizer& reg,
                         std::optional<Sampling> sampling = std::nullopt, std::optional<Weights> v = std::nullopt);

}  // namespace alpha
