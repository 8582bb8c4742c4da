#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

namespace alpha {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted list of block indices (a realization of a sampling, or any S ⊆ [n]).
using BlockSet = std::vector<std::size_t>;

// Relative tolerance shared by the floating-point comparisons in the library.
double comparison_tolerance();
void set_comparison_tolerance(double rel);
bool approx_equal(double a, double b, double rel = comparison_tolerance());

/*
 * Decomposition R^N = R^{N_1} x ... x R^{N_n}. Blocks are contiguous
 * slices of one dense buffer; the column selectors U_i are never formed.
 */
class BlockPartition {
public:
    explicit BlockPartition(std::vector<std::size_t> sizes);

    static std::shared_ptr<const BlockPartition> scalar(std::size_t n);
    static std::shared_ptr<const BlockPartition> uniform(std::size_t n, std::size_t block_size);

    std::size_t num_blocks() const { return sizes_.size(); }
    std::size_t dim() const { return offsets_.back(); }
    std::size_t size(std::size_t i) const { return sizes_[i]; }
    std::size_t offset(std::size_t i) const { return offsets_[i]; }
    bool all_scalar() const { return dim() == num_blocks(); }

    /// Block that owns coordinate `coord`.
    std::size_t block_of(std::size_t coord) const;

    bool operator==(const BlockPartition& other) const { return sizes_ == other.sizes_; }

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

using PartitionPtr = std::shared_ptr<const BlockPartition>;

/// A point of R^N together with its block partition.
class BlockVector {
public:
    explicit BlockVector(PartitionPtr partition);
    BlockVector(PartitionPtr partition, Vector values);

    const BlockPartition& partition() const { return *partition_; }
    const PartitionPtr& partition_ptr() const { return partition_; }
    std::size_t num_blocks() const { return partition_->num_blocks(); }

    const Vector& values() const { return values_; }
    Vector& values() { return values_; }

    auto block(std::size_t i) { return values_.segment(offset(i), partition_->size(i)); }
    auto block(std::size_t i) const { return values_.segment(offset(i), partition_->size(i)); }

    bool same_partition(const BlockVector& other) const;

private:
    std::size_t offset(std::size_t i) const;

    PartitionPtr partition_;
    Vector values_;
};

/// Strictly positive per-block weights (w, v, p, and their Hadamard combinations).
class Weights {
public:
    explicit Weights(Vector w);
    static Weights ones(std::size_t n) { return Weights(Vector::Ones(static_cast<Eigen::Index>(n))); }
    static Weights constant(std::size_t n, double c) {
        return Weights(Vector::Constant(static_cast<Eigen::Index>(n), c));
    }

    std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
    double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }
    const Vector& values() const { return w_; }

    Weights hadamard(const Weights& other) const;
    Weights pow(double exponent) const;
    Weights scaled(double c) const;

private:
    Vector w_;
};

/*
 * Per-block positive definite matrices B_i defining ||x^i||_i^2 = <B_i x^i, x^i>.
 * Dense blocks are Cholesky-factorized once, at construction.
 */
class BlockMetric {
public:
    enum class Kind { identity, diagonal, dense };

    static BlockMetric identity(PartitionPtr partition);
    /// `diag` holds the N diagonal entries, block after block.
    static BlockMetric diagonal(PartitionPtr partition, const Vector& diag);
    static BlockMetric dense(PartitionPtr partition, std::vector<Matrix> blocks);

    const BlockPartition& partition() const { return *partition_; }
    Kind kind(std::size_t i) const { return blocks_[i].kind; }
    bool is_identity() const;
    /// True when every block is identity or diagonal.
    bool is_diagonal() const;

    double quad_form(std::size_t i, const Eigen::Ref<const Vector>& xi) const;
    void apply_block(std::size_t i, const Eigen::Ref<const Vector>& xi, Eigen::Ref<Vector> out) const;
    void solve_block(std::size_t i, const Eigen::Ref<const Vector>& xi, Eigen::Ref<Vector> out) const;

    /// Diagonal entries of B_i (identity and diagonal blocks only).
    Vector block_diagonal(std::size_t i) const;
    /// B_i as a dense matrix.
    Matrix block_matrix(std::size_t i) const;

private:
    struct Entry {
        Kind kind = Kind::identity;
        Vector diag;
        Matrix dense;
        Eigen::LLT<Matrix> llt;
    };

    BlockMetric(PartitionPtr partition, std::vector<Entry> blocks);

    PartitionPtr partition_;
    std::vector<Entry> blocks_;
};

double block_norm_sq(const BlockVector& x, std::size_t i, const BlockMetric& m);
double weighted_norm_sq(const BlockVector& x, const Weights& w, const BlockMetric& m);
double weighted_inner(const BlockVector& x, const BlockVector& y, const Weights& w);
BlockVector restrict_to(const BlockVector& h, const BlockSet& S);
BlockVector scale_blocks(const Weights& v, const BlockVector& x);
BlockVector metric_apply(const BlockMetric& m, const BlockVector& x);
BlockVector metric_solve(const BlockMetric& m, const BlockVector& x);

}  // namespace alpha
