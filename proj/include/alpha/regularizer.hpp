#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "alpha/blockspace.hpp"

namespace alpha {

/// Relative tolerance on box membership when evaluating psi.
inline constexpr double kBoxSlack = 1e-12;

/// Coefficient of the prox subproblem: tau = theta v_i / p_i, step = 1 / tau.
struct ProxScale {
    double theta = 1.0;
    double v = 1.0;
    double p = 1.0;

    double tau() const { return theta * v / p; }
    // Written as p / (v theta) so the zero-psi prox and the smooth solver share one rounding path.
    double step() const { return p / (v * theta); }
};

/*
 * Block-separable psi(x) = sum_i psi^i(x^i):
 *   zero    psi^i = 0
 *   l1      lambda_i ||x^i||_1          (scalar blocks, identity metric)
 *   sq_l2   lambda_i / 2 ||x^i||_2^2    (identity metric)
 *   box     indicator of [lo_i, hi_i]   (identity or diagonal metric)
 */
class Regularizer {
public:
    enum class Kind { zero, l1, sq_l2, box };

    static Regularizer zero(PartitionPtr partition);
    static Regularizer l1(PartitionPtr partition, Vector lambda);
    static Regularizer l1(PartitionPtr partition, double lambda);
    static Regularizer sq_l2(PartitionPtr partition, Vector lambda);
    static Regularizer sq_l2(PartitionPtr partition, double lambda);
    static Regularizer box(PartitionPtr partition, double lo, double hi);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    const BlockPartition& partition() const { return *partition_; }
    double lambda(std::size_t i) const { return lambda_[static_cast<Eigen::Index>(i)]; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    /// Throws ConfigError when the kind has no closed-form prox under `metric`.
    void check_metric(const BlockMetric& metric) const;

    double block_value(std::size_t i, const Eigen::Ref<const Vector>& xi) const;
    /// Extended-real: +inf outside the box widened by kBoxSlack (relative).
    double value(const Vector& x) const;
    double value(const BlockVector& x) const { return value(x.values()); }
    bool in_domain(const Vector& x) const;

    /// out = argmin_u <g, u> + tau/2 ||u - z||_i^2 + psi^i(u). `out` may alias `z`.
    void prox_step(std::size_t i, const Eigen::Ref<const Vector>& g, const Eigen::Ref<const Vector>& z,
                   const ProxScale& scale, const BlockMetric& metric, Eigen::Ref<Vector> out) const;
    Vector prox_step(std::size_t i, const Vector& g, const Vector& z, double tau, const BlockMetric& metric) const;

private:
    Regularizer(Kind kind, PartitionPtr partition, Vector lambda);

    Kind kind_;
    PartitionPtr partition_;
    Vector lambda_;
    double lo_ = -std::numeric_limits<double>::infinity();
    double hi_ = std::numeric_limits<double>::infinity();
};

/// The origin projected onto dom psi (zero unless a box excludes it).
Vector initial_point(const Regularizer& reg);

}  // namespace alpha
