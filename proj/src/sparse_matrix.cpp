#include "alpha/sparse_matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace alpha {

BlockSparseMatrix::BlockSparseMatrix(std::size_t rows, PartitionPtr partition, std::vector<Triplet> triplets)
    : rows_(rows), partition_(std::move(partition)) {
    const std::size_t cols = partition_->dim();
    for (const auto& t : triplets)
        if (t.row >= rows_ || t.col >= cols)
            throw std::out_of_range("matrix entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                                    ") outside " + std::to_string(rows_) + " x " + std::to_string(cols));

    // Row-major, duplicates merged, zeros dropped.
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::vector<Triplet> merged;
    merged.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
            merged.back().value += t.value;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Triplet& t) { return t.value == 0.0; });

    csr_ptr_.assign(rows_ + 1, 0);
    for (const auto& t : merged) ++csr_ptr_[t.row + 1];
    for (std::size_t r = 0; r < rows_; ++r) csr_ptr_[r + 1] += csr_ptr_[r];
    csr_cols_.reserve(merged.size());
    csr_values_.reserve(merged.size());
    for (const auto& t : merged) {
        csr_cols_.push_back(t.col);
        csr_values_.push_back(t.value);
    }

    // Column-block-major: for each block, the distinct rows and dense N_i rows.
    const std::size_t n = partition_->num_blocks();
    std::vector<std::vector<std::size_t>> block_rows(n);
    for (const auto& t : merged) {
        auto& br = block_rows[partition_->block_of(t.col)];
        if (br.empty() || br.back() != t.row) br.push_back(t.row);  // merged is row-sorted
    }
    block_ptr_.assign(n + 1, 0);
    value_ptr_.assign(n, 0);
    std::size_t values = 0;
    for (std::size_t i = 0; i < n; ++i) {
        block_ptr_[i + 1] = block_ptr_[i] + block_rows[i].size();
        value_ptr_[i] = values;
        values += block_rows[i].size() * partition_->size(i);
    }
    support_rows_.reserve(block_ptr_[n]);
    for (const auto& br : block_rows) support_rows_.insert(support_rows_.end(), br.begin(), br.end());
    block_values_.assign(values, 0.0);
    for (const auto& t : merged) {
        const std::size_t i = partition_->block_of(t.col);
        const auto rows_i = support(i);
        const auto pos = static_cast<std::size_t>(std::lower_bound(rows_i.begin(), rows_i.end(), t.row) - rows_i.begin());
        block_values_[value_ptr_[i] + pos * partition_->size(i) + (t.col - partition_->offset(i))] = t.value;
    }
}

void BlockSparseMatrix::multiply(const Vector& x, Vector& out) const {
    if (static_cast<std::size_t>(x.size()) != cols()) throw std::invalid_argument("multiply: dimension mismatch");
    out.resize(static_cast<Eigen::Index>(rows_));
    kernels::spmv(csr(), x.data(), out.data());
}

Vector BlockSparseMatrix::multiply(const Vector& x) const {
    Vector out;
    multiply(x, out);
    return out;
}

void BlockSparseMatrix::add_block_product(std::size_t i, double coef, const Eigen::Ref<const Vector>& t,
                                          Vector& r) const {
    const auto rows_i = support(i);
    const std::size_t ni = partition_->size(i);
    if (ni == 1) {
        const double c = coef * t[0];
        const double* a = block_values_.data() + value_ptr_[i];
        for (std::size_t k = 0; k < rows_i.size(); ++k) r[static_cast<Eigen::Index>(rows_i[k])] += c * a[k];
        return;
    }
    for (std::size_t k = 0; k < rows_i.size(); ++k) {
        const Eigen::Map<const Vector> a(block_row(i, k), static_cast<Eigen::Index>(ni));
        r[static_cast<Eigen::Index>(rows_i[k])] += coef * a.dot(t);
    }
}

kernels::CsrView BlockSparseMatrix::csr() const {
    return {rows_, csr_ptr_.data(), csr_cols_.data(), csr_values_.data()};
}

Matrix BlockSparseMatrix::to_dense() const {
    Matrix D = Matrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols()));
    for (std::size_t j = 0; j < rows_; ++j)
        for (std::size_t k = csr_ptr_[j]; k < csr_ptr_[j + 1]; ++k)
            D(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(csr_cols_[k])) = csr_values_[k];
    return D;
}

}  // namespace alpha
