#include "alpha/objective.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "alpha/error.hpp"
#include "alpha/kernels.hpp"
#include "alpha/rng.hpp"

namespace alpha {

ScalarLoss::ScalarLoss(LossKind kind, double target) : kind_(kind), target_(target) {
    if (kind == LossKind::logistic && target != 1.0 && target != -1.0)
        throw DataError("logistic labels must be -1 or +1, got " + std::to_string(target));
}

SmoothObjective::SmoothObjective(std::shared_ptr<const BlockSparseMatrix> A, std::vector<ScalarLoss> losses,
                                 BlockMetric metric)
    : A_(std::move(A)), losses_(std::move(losses)), metric_(std::move(metric)) {
    if (losses_.size() != A_->rows())
        throw DataError("got " + std::to_string(losses_.size()) + " targets for " + std::to_string(A_->rows()) +
                        " rows");
    if (!(metric_.partition() == A_->partition())) throw std::invalid_argument("metric partition mismatch");
    for (std::size_t i = 0; i < num_blocks(); ++i)
        if (A_->support_size(i) == 0)
            throw DataError("block " + std::to_string(i) + " has an all-zero column block (L_i = 0)");
}

SmoothObjective SmoothObjective::least_squares(std::shared_ptr<const BlockSparseMatrix> A, const Vector& b) {
    std::vector<ScalarLoss> losses;
    losses.reserve(static_cast<std::size_t>(b.size()));
    for (Eigen::Index j = 0; j < b.size(); ++j) losses.emplace_back(LossKind::square, b[j]);
    auto metric = BlockMetric::identity(A->partition_ptr());
    return SmoothObjective(std::move(A), std::move(losses), std::move(metric));
}

SmoothObjective SmoothObjective::logistic(std::shared_ptr<const BlockSparseMatrix> A, const Vector& labels) {
    std::vector<ScalarLoss> losses;
    losses.reserve(static_cast<std::size_t>(labels.size()));
    for (Eigen::Index j = 0; j < labels.size(); ++j) losses.emplace_back(LossKind::logistic, labels[j]);
    auto metric = BlockMetric::identity(A->partition_ptr());
    return SmoothObjective(std::move(A), std::move(losses), std::move(metric));
}

bool SmoothObjective::is_quadratic() const {
    for (const auto& l : losses_)
        if (l.kind() != LossKind::square) return false;
    return true;
}

double SmoothObjective::value_from_residual(const Vector& r) const {
    if (static_cast<std::size_t>(r.size()) != rows()) throw std::invalid_argument("residual length mismatch");
    return kernels::sum(rows(), [&](std::size_t j) { return losses_[j].value(r[static_cast<Eigen::Index>(j)]); });
}

Vector SmoothObjective::gradient(const Vector& x) const {
    const Vector r = residual(x);
    Vector g(x.size());
    const auto n = static_cast<std::ptrdiff_t>(num_blocks());
    // Blocks are independent, so the result is the same for any thread count.
#pragma omp parallel for schedule(static) if (dim() >= kernels::kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto bi = static_cast<std::size_t>(i);
        block_gradient(bi, r,
                       g.segment(static_cast<Eigen::Index>(partition().offset(bi)),
                                 static_cast<Eigen::Index>(partition().size(bi))));
    }
    return g;
}

Weights SmoothObjective::block_lipschitz_constants() const {
    const std::size_t n = num_blocks();
    Vector L(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto rows_i = A_->support(i);
        const auto ni = static_cast<Eigen::Index>(partition().size(i));
        Matrix H = Matrix::Zero(ni, ni);
        for (std::size_t k = 0; k < rows_i.size(); ++k) {
            const Eigen::Map<const Vector> a(A_->block_row(i, k), ni);
            H.noalias() += losses_[rows_i[k]].smoothness() * a * a.transpose();
        }
        double li = 0.0;
        if (ni == 1) {
            li = H(0, 0) / metric_.block_matrix(i)(0, 0);
        } else {
            Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(H, metric_.block_matrix(i), Eigen::EigenvaluesOnly);
            li = eig.eigenvalues().maxCoeff();
        }
        L[static_cast<Eigen::Index>(i)] = li;
    }
    return Weights(std::move(L));
}

double SmoothObjective::lambda_max_safe() const {
    double total = 0.0;
    Vector tmp;
    for (std::size_t i = 0; i < num_blocks(); ++i) {
        const auto rows_i = A_->support(i);
        const auto ni = static_cast<Eigen::Index>(partition().size(i));
        tmp.resize(ni);
        for (std::size_t k = 0; k < rows_i.size(); ++k) {
            const Eigen::Map<const Vector> a(A_->block_row(i, k), ni);
            metric_.solve_block(i, a, tmp);
            total += losses_[rows_i[k]].smoothness() * a.dot(tmp);
        }
    }
    return total;
}

double SmoothObjective::lambda_max_power(int max_iters, double rel_tol) const {
    // Iterate v <- B^{-1} A^T Gamma A v; the generalized Rayleigh quotient
    // v^T H v / v^T B v converges to lambda_max from below.
    const auto N = static_cast<Eigen::Index>(dim());
    Rng rng(0x5eed);
    Vector v(N);
    for (Eigen::Index c = 0; c < N; ++c) v[c] = rng.normal();
    Vector r, w(N), Bv(N);
    double estimate = 0.0;
    auto apply_H = [&](const Vector& in, Vector& out) {
        r = A_->multiply(in);
        for (Eigen::Index j = 0; j < r.size(); ++j) r[j] *= losses_[static_cast<std::size_t>(j)].smoothness();
        out.setZero();
        for (std::size_t j = 0; j < rows(); ++j) {
            const auto cols = A_->row_columns(j);
            const auto vals = A_->row_values(j);
            for (std::size_t k = 0; k < cols.size(); ++k) out[static_cast<Eigen::Index>(cols[k])] += vals[k] * r[static_cast<Eigen::Index>(j)];
        }
    };
    for (int it = 0; it < max_iters; ++it) {
        apply_H(v, w);
        for (std::size_t i = 0; i < num_blocks(); ++i) {
            const auto off = static_cast<Eigen::Index>(partition().offset(i));
            const auto ni = static_cast<Eigen::Index>(partition().size(i));
            metric_.apply_block(i, v.segment(off, ni), Bv.segment(off, ni));
        }
        const double next = v.dot(w) / v.dot(Bv);
        // w <- B^{-1} H v
        for (std::size_t i = 0; i < num_blocks(); ++i) {
            const auto off = static_cast<Eigen::Index>(partition().offset(i));
            const auto ni = static_cast<Eigen::Index>(partition().size(i));
            Vector seg = w.segment(off, ni);
            metric_.solve_block(i, seg, w.segment(off, ni));
        }
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        const bool converged = it > 0 && std::abs(next - estimate) <= rel_tol * std::abs(next);
        estimate = next;
        if (converged) break;
    }
    return estimate;
}

Weights SmoothObjective::global_lipschitz_weights(LipschitzBound bound) const {
    const double L = bound == LipschitzBound::safe ? lambda_max_safe() : 1.01 * lambda_max_power();
    return Weights::constant(num_blocks(), L);
}

Matrix SmoothObjective::curvature_matrix() const {
    const Matrix D = A_->to_dense();
    Vector gamma(static_cast<Eigen::Index>(rows()));
    for (std::size_t j = 0; j < rows(); ++j) gamma[static_cast<Eigen::Index>(j)] = losses_[j].smoothness();
    return D.transpose() * gamma.asDiagonal() * D;
}

}  // namespace alpha
