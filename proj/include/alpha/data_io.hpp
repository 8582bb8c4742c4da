#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "alpha/blockspace.hpp"
#include "alpha/sparse_matrix.hpp"

namespace alpha {

/// A loaded m x N matrix (0-based triplets) and its targets or labels.
struct Dataset {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Triplet> entries;
    Vector targets;

    /// Scales every column to unit Euclidean norm.
    void normalize_columns();
    /// Throws DataError naming the first all-zero column.
    void check_no_zero_columns() const;
    std::shared_ptr<const BlockSparseMatrix> matrix(PartitionPtr partition) const;
};

/// Coordinate list: header `m N nnz`, then `row col value` lines, 1-indexed.
Dataset read_coo(std::istream& in);
/// One real per line; blank lines and `#` comments skipped.
Vector read_targets(std::istream& in);
/// `label idx:val ...` lines, 1-indexed features. N is the largest index seen.
Dataset read_libsvm(std::istream& in);

/*
 * Loads `data_path`. A file whose first data line contains ':' is read as
 * LIBSVM-style (labels inline, `targets_path` must be empty); otherwise as a
 * coordinate list with targets from `targets_path`.
 */
Dataset load_dataset(const std::string& data_path, const std::string& targets_path);

void write_coo(std::ostream& out, const Dataset& d);
void write_vector(std::ostream& out, const Vector& v);

/// Blocks of `block_size` consecutive columns, the last one possibly shorter.
PartitionPtr make_partition(std::size_t cols, std::size_t block_size);

}  // namespace alpha
