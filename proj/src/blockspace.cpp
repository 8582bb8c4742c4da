#include "alpha/blockspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace alpha {

namespace {

std::atomic<double> g_rel_tol{1e-10};

void check_block(const BlockPartition& p, std::size_t i) {
    if (i >= p.num_blocks())
        throw std::out_of_range("block index " + std::to_string(i) + " out of range [0, " +
                                std::to_string(p.num_blocks()) + ")");
}

void check_weights(const Weights& w, const BlockPartition& p) {
    if (w.size() != p.num_blocks())
        throw std::invalid_argument("weight vector has length " + std::to_string(w.size()) +
                                    ", expected " + std::to_string(p.num_blocks()));
}

}  // namespace

double comparison_tolerance() { return g_rel_tol.load(); }

void set_comparison_tolerance(double rel) {
    if (!(rel > 0.0)) throw std::invalid_argument("tolerance must be positive");
    g_rel_tol.store(rel);
}

bool approx_equal(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------------------
// BlockPartition

BlockPartition::BlockPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("partition needs at least one block");
    offsets_.resize(sizes_.size() + 1, 0);
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (sizes_[i] == 0) throw std::invalid_argument("block " + std::to_string(i) + " has size 0");
        offsets_[i + 1] = offsets_[i] + sizes_[i];
    }
}

std::shared_ptr<const BlockPartition> BlockPartition::scalar(std::size_t n) {
    return std::make_shared<const BlockPartition>(std::vector<std::size_t>(n, 1));
}

std::shared_ptr<const BlockPartition> BlockPartition::uniform(std::size_t n, std::size_t block_size) {
    return std::make_shared<const BlockPartition>(std::vector<std::size_t>(n, block_size));
}

std::size_t BlockPartition::block_of(std::size_t coord) const {
    if (coord >= dim()) throw std::out_of_range("coordinate out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), coord);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

// ---------------------------------------------------------------------------
// BlockVector

BlockVector::BlockVector(PartitionPtr partition)
    : partition_(std::move(partition)),
      values_(Vector::Zero(static_cast<Eigen::Index>(partition_->dim()))) {}

BlockVector::BlockVector(PartitionPtr partition, Vector values)
    : partition_(std::move(partition)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != partition_->dim())
        throw std::invalid_argument("vector length " + std::to_string(values_.size()) +
                                    " does not match partition dimension " +
                                    std::to_string(partition_->dim()));
}

bool BlockVector::same_partition(const BlockVector& other) const {
    return partition_ == other.partition_ || *partition_ == *other.partition_;
}

std::size_t BlockVector::offset(std::size_t i) const {
    check_block(*partition_, i);
    return partition_->offset(i);
}

// ---------------------------------------------------------------------------
// Weights

Weights::Weights(Vector w) : w_(std::move(w)) {
    for (Eigen::Index i = 0; i < w_.size(); ++i)
        if (!(w_[i] > 0.0) || !std::isfinite(w_[i]))
            throw std::invalid_argument("weight " + std::to_string(i) + " is not a positive finite number");
}

Weights Weights::hadamard(const Weights& other) const {
    if (other.size() != size()) throw std::invalid_argument("weight length mismatch");
    return Weights(w_.cwiseProduct(other.w_));
}

Weights Weights::pow(double exponent) const { return Weights(w_.array().pow(exponent).matrix()); }

Weights Weights::scaled(double c) const { return Weights(w_ * c); }

// ---------------------------------------------------------------------------
// BlockMetric

BlockMetric::BlockMetric(PartitionPtr partition, std::vector<Entry> blocks)
    : partition_(std::move(partition)), blocks_(std::move(blocks)) {}

BlockMetric BlockMetric::identity(PartitionPtr partition) {
    std::vector<Entry> blocks(partition->num_blocks());
    return BlockMetric(std::move(partition), std::move(blocks));
}

BlockMetric BlockMetric::diagonal(PartitionPtr partition, const Vector& diag) {
    if (static_cast<std::size_t>(diag.size()) != partition->dim())
        throw std::invalid_argument("diagonal metric needs one entry per coordinate");
    std::vector<Entry> blocks(partition->num_blocks());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto d = diag.segment(partition->offset(i), partition->size(i));
        if ((d.array() <= 0.0).any())
            throw std::invalid_argument("diagonal metric block " + std::to_string(i) + " is not positive");
        blocks[i].kind = Kind::diagonal;
        blocks[i].diag = d;
    }
    return BlockMetric(std::move(partition), std::move(blocks));
}

BlockMetric BlockMetric::dense(PartitionPtr partition, std::vector<Matrix> mats) {
    if (mats.size() != partition->num_blocks())
        throw std::invalid_argument("dense metric needs one matrix per block");
    std::vector<Entry> blocks(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const auto ni = static_cast<Eigen::Index>(partition->size(i));
        if (mats[i].rows() != ni || mats[i].cols() != ni)
            throw std::invalid_argument("metric block " + std::to_string(i) + " has wrong shape");
        if (!mats[i].isApprox(mats[i].transpose(), 1e-12))
            throw std::invalid_argument("metric block " + std::to_string(i) + " is not symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(mats[i], Eigen::EigenvaluesOnly);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            throw std::invalid_argument("metric block " + std::to_string(i) + " is not positive definite");
        blocks[i].kind = Kind::dense;
        blocks[i].dense = mats[i];
        blocks[i].llt.compute(mats[i]);
    }
    return BlockMetric(std::move(partition), std::move(blocks));
}

bool BlockMetric::is_identity() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Entry& e) { return e.kind == Kind::identity; });
}

bool BlockMetric::is_diagonal() const {
    return std::none_of(blocks_.begin(), blocks_.end(), [](const Entry& e) { return e.kind == Kind::dense; });
}

double BlockMetric::quad_form(std::size_t i, const Eigen::Ref<const Vector>& xi) const {
    const Entry& e = blocks_[i];
    switch (e.kind) {
    case Kind::identity: return xi.squaredNorm();
    case Kind::diagonal: return (xi.array().square() * e.diag.array()).sum();
    case Kind::dense: return xi.dot(e.dense * xi);
    }
    return 0.0;
}

void BlockMetric::apply_block(std::size_t i, const Eigen::Ref<const Vector>& xi, Eigen::Ref<Vector> out) const {
    const Entry& e = blocks_[i];
    switch (e.kind) {
    case Kind::identity: out = xi; break;
    case Kind::diagonal: out = xi.cwiseProduct(e.diag); break;
    case Kind::dense: out.noalias() = e.dense * xi; break;
    }
}

void BlockMetric::solve_block(std::size_t i, const Eigen::Ref<const Vector>& xi, Eigen::Ref<Vector> out) const {
    const Entry& e = blocks_[i];
    switch (e.kind) {
    case Kind::identity: out = xi; break;
    case Kind::diagonal: out = xi.cwiseQuotient(e.diag); break;
    case Kind::dense: out = e.llt.solve(xi); break;
    }
}

Vector BlockMetric::block_diagonal(std::size_t i) const {
    const Entry& e = blocks_[i];
    const auto ni = static_cast<Eigen::Index>(partition_->size(i));
    switch (e.kind) {
    case Kind::identity: return Vector::Ones(ni);
    case Kind::diagonal: return e.diag;
    case Kind::dense: break;
    }
    throw std::logic_error("block_diagonal called on a dense metric block");
}

Matrix BlockMetric::block_matrix(std::size_t i) const {
    const Entry& e = blocks_[i];
    const auto ni = static_cast<Eigen::Index>(partition_->size(i));
    switch (e.kind) {
    case Kind::identity: return Matrix::Identity(ni, ni);
    case Kind::diagonal: return e.diag.asDiagonal();
    case Kind::dense: return e.dense;
    }
    return {};
}

// ---------------------------------------------------------------------------
// Operations

double block_norm_sq(const BlockVector& x, std::size_t i, const BlockMetric& m) {
    check_block(x.partition(), i);
    return m.quad_form(i, x.block(i));
}

double weighted_norm_sq(const BlockVector& x, const Weights& w, const BlockMetric& m) {
    check_weights(w, x.partition());
    double s = 0.0;
    for (std::size_t i = 0; i < x.num_blocks(); ++i) s += w[i] * m.quad_form(i, x.block(i));
    return s;
}

double weighted_inner(const BlockVector& x, const BlockVector& y, const Weights& w) {
    if (!x.same_partition(y)) throw std::invalid_argument("partition mismatch");
    check_weights(w, x.partition());
    double s = 0.0;
    for (std::size_t i = 0; i < x.num_blocks(); ++i) s += w[i] * x.block(i).dot(y.block(i));
    return s;
}

BlockVector restrict_to(const BlockVector& h, const BlockSet& S) {
    BlockVector out(h.partition_ptr());
    for (std::size_t i : S) {
        check_block(h.partition(), i);
        out.block(i) = h.block(i);
    }
    return out;
}

BlockVector scale_blocks(const Weights& v, const BlockVector& x) {
    check_weights(v, x.partition());
    BlockVector out(x.partition_ptr());
    for (std::size_t i = 0; i < x.num_blocks(); ++i) out.block(i) = v[i] * x.block(i);
    return out;
}

BlockVector metric_apply(const BlockMetric& m, const BlockVector& x) {
    BlockVector out(x.partition_ptr());
    for (std::size_t i = 0; i < x.num_blocks(); ++i) m.apply_block(i, x.block(i), out.block(i));
    return out;
}

BlockVector metric_solve(const BlockMetric& m, const BlockVector& x) {
    BlockVector out(x.partition_ptr());
    for (std::size_t i = 0; i < x.num_blocks(); ++i) m.solve_block(i, x.block(i), out.block(i));
    return out;
}

}  // namespace alpha
