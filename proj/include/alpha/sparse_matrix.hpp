#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "alpha/blockspace.hpp"
#include "alpha/kernels.hpp"

namespace alpha {

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/*
 * m x N matrix stored column-block-major: for each block i the rows I_i
 * whose i-th block A_ji is nonzero, each with its N_i entries. A row-major
 * copy serves full matrix-vector products.
 */
class BlockSparseMatrix {
public:
    /// Duplicate (row, col) entries are summed; resulting zeros are dropped.
    BlockSparseMatrix(std::size_t rows, PartitionPtr partition, std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return partition_->dim(); }
    const BlockPartition& partition() const { return *partition_; }
    const PartitionPtr& partition_ptr() const { return partition_; }

    /// Rows I_i touching block i, ascending.
    std::span<const std::size_t> support(std::size_t i) const {
        return {support_rows_.data() + block_ptr_[i], block_ptr_[i + 1] - block_ptr_[i]};
    }
    std::size_t support_size(std::size_t i) const { return block_ptr_[i + 1] - block_ptr_[i]; }
    /// A_ji for the t-th row of I_i (N_i contiguous values).
    const double* block_row(std::size_t i, std::size_t t) const {
        return block_values_.data() + value_ptr_[i] + t * partition_->size(i);
    }

    /// Number of nonzero blocks, sum_i |I_i|.
    std::size_t nnz_blocks() const { return support_rows_.size(); }
    /// Number of stored scalar entries.
    std::size_t nnz() const { return csr_values_.size(); }

    /// out = A x (full pass).
    void multiply(const Vector& x, Vector& out) const;
    Vector multiply(const Vector& x) const;
    /// r += coef * A U_i t; touches only the rows in I_i.
    void add_block_product(std::size_t i, double coef, const Eigen::Ref<const Vector>& t, Vector& r) const;

    kernels::CsrView csr() const;
    /// Row j as (column, value) pairs.
    std::span<const std::size_t> row_columns(std::size_t j) const {
        return {csr_cols_.data() + csr_ptr_[j], csr_ptr_[j + 1] - csr_ptr_[j]};
    }
    std::span<const double> row_values(std::size_t j) const {
        return {csr_values_.data() + csr_ptr_[j], csr_ptr_[j + 1] - csr_ptr_[j]};
    }

    Matrix to_dense() const;

private:
    std::size_t rows_;
    PartitionPtr partition_;

    std::vector<std::size_t> block_ptr_;     // n + 1
    std::vector<std::size_t> support_rows_;  // nnz_blocks
    std::vector<std::size_t> value_ptr_;     // n
    std::vector<double> block_values_;       // sum_i |I_i| N_i

    std::vector<std::size_t> csr_ptr_;
    std::vector<std::size_t> csr_cols_;
    std::vector<double> csr_values_;
};

}  // namespace alpha
