#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "alpha/blockspace.hpp"
#include "alpha/sparse_matrix.hpp"

namespace alpha {

/// Work counters. `touched` counts the (row, block) entries read by block
/// gradient evaluations, sum over evaluated blocks of |I_i|.
struct CostCounter {
    std::uint64_t touched = 0;
    std::uint64_t residual_updates = 0;  // entries visited while maintaining residuals
    std::uint64_t full_pass = 0;         // entries visited by full A*x products inside the iteration
    std::uint64_t init = 0;              // entries visited once, at initialization
};

enum class LossKind { square, logistic };

/// phi_j: square 1/2 (t - b)^2 (smoothness 1) or logistic log(1 + exp(-b t)) (smoothness 1/4).
class ScalarLoss {
public:
    ScalarLoss(LossKind kind, double target);

    LossKind kind() const { return kind_; }
    double target() const { return target_; }
    double smoothness() const { return kind_ == LossKind::square ? 1.0 : 0.25; }

    double value(double t) const {
        if (kind_ == LossKind::square) return 0.5 * (t - target_) * (t - target_);
        const double z = -target_ * t;
        return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    double derivative(double t) const {
        if (kind_ == LossKind::square) return t - target_;
        return -target_ / (1.0 + std::exp(target_ * t));
    }

private:
    LossKind kind_;
    double target_;
};

enum class LipschitzBound { safe, power };

/*
 * f(x) = sum_j phi_j((A x)_j). Stateless: callers own the residual A x and
 * pass it to the gradient routines.
 */
class SmoothObjective {
public:
    SmoothObjective(std::shared_ptr<const BlockSparseMatrix> A, std::vector<ScalarLoss> losses, BlockMetric metric);

    static SmoothObjective least_squares(std::shared_ptr<const BlockSparseMatrix> A, const Vector& b);
    static SmoothObjective logistic(std::shared_ptr<const BlockSparseMatrix> A, const Vector& labels);

    const BlockSparseMatrix& matrix() const { return *A_; }
    const BlockPartition& partition() const { return A_->partition(); }
    const PartitionPtr& partition_ptr() const { return A_->partition_ptr(); }
    const BlockMetric& metric() const { return metric_; }
    const std::vector<ScalarLoss>& losses() const { return losses_; }
    std::size_t rows() const { return A_->rows(); }
    std::size_t num_blocks() const { return partition().num_blocks(); }
    std::size_t dim() const { return partition().dim(); }
    bool is_quadratic() const;

    Vector residual(const Vector& x) const { return A_->multiply(x); }
    double value(const Vector& x) const { return value_from_residual(residual(x)); }
    double value(const BlockVector& x) const { return value(x.values()); }
    double value_from_residual(const Vector& r) const;

    /// out = grad_i f at the point whose residual entries are `residual_at(j)`.
    template <class ResidualAt>
    void block_gradient_at(std::size_t i, const ResidualAt& residual_at, Eigen::Ref<Vector> out,
                           CostCounter* counter = nullptr) const {
        const auto rows_i = A_->support(i);
        const std::size_t ni = partition().size(i);
        if (counter) counter->touched += rows_i.size();
        if (ni == 1) {
            const double* a = A_->block_row(i, 0);
            double s = 0.0;
            for (std::size_t k = 0; k < rows_i.size(); ++k) {
                const std::size_t j = rows_i[k];
                s += a[k] * losses_[j].derivative(residual_at(j));
            }
            out[0] = s;
            return;
        }
        out.setZero();
        for (std::size_t k = 0; k < rows_i.size(); ++k) {
            const std::size_t j = rows_i[k];
            const double d = losses_[j].derivative(residual_at(j));
            out += d * Eigen::Map<const Vector>(A_->block_row(i, k), static_cast<Eigen::Index>(ni));
        }
    }

    /// Block gradient from a maintained residual r = A y. A stale r is a caller bug.
    void block_gradient(std::size_t i, const Vector& r, Eigen::Ref<Vector> out, CostCounter* counter = nullptr) const {
        block_gradient_at(i, [&r](std::size_t j) { return r[static_cast<Eigen::Index>(j)]; }, out, counter);
    }

    /// Full gradient at x (one full pass).
    Vector gradient(const Vector& x) const;

    /// L_i = lambda_max(B_i^{-1/2} (sum_j gamma_j A_ji^T A_ji) B_i^{-1/2}).
    Weights block_lipschitz_constants() const;
    /// sum_j gamma_j ||a_j||^2_{B^{-1}}, an upper bound on the curvature relative to B.
    double lambda_max_safe() const;
    /// Power-iteration estimate of lambda_max(B^{-1} A^T Gamma A), not inflated.
    double lambda_max_power(int max_iters = 200, double rel_tol = 1e-10) const;
    /// v with f(x+h) <= f(x) + <grad f(x), h> + 1/2 ||h||_v^2. The power bound is inflated by 1.01.
    Weights global_lipschitz_weights(LipschitzBound bound = LipschitzBound::power) const;

    /// A^T Gamma A as a dense matrix (Hessian of a quadratic objective).
    Matrix curvature_matrix() const;

private:
    std::shared_ptr<const BlockSparseMatrix> A_;
    std::vector<ScalarLoss> losses_;
    BlockMetric metric_;
};

}  // namespace alpha
