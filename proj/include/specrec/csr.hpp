#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace specrec {

using index_t = std::int64_t;
using col_t = std::int32_t;

// One (row, col, value) entry used to assemble a matrix.
struct Triplet {
    index_t row;
    col_t col;
    double value;
};

// Compressed sparse row user x item interaction matrix. Immutable after
// construction; safe for concurrent reads.
struct InteractionMatrix {
    index_t n_rows = 0;
    index_t n_cols = 0;
    std::vector<index_t> row_offsets;  // length n_rows + 1, non-decreasing
    std::vector<col_t> col_indices;    // length nnz, strictly increasing per row
    std::vector<double> values;        // length nnz, finite and > 0

    index_t nnz() const { return static_cast<index_t>(col_indices.size()); }

    double density() const {
        const double cells = static_cast<double>(n_rows) * static_cast<double>(n_cols);
        return cells > 0.0 ? static_cast<double>(nnz()) / cells : 0.0;
    }

    std::span<const col_t> row_cols(index_t i) const {
        return {col_indices.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }

    std::span<const double> row_values(index_t i) const {
        return {values.data() + row_offsets[i],
                static_cast<std::size_t>(row_offsets[i + 1] - row_offsets[i])};
    }

    bool has(index_t row, col_t col) const;

    // Throws std::invalid_argument if the structural invariants are violated.
    void check() const;
};

// Assemble from triplets. Entries are sorted; duplicate (row, col) pairs
// collapse to a single entry keeping the largest value.
InteractionMatrix matrix_from_triplets(index_t n_rows, index_t n_cols,
                                       std::vector<Triplet> entries);

// out = X v. Parallel over rows; bit-identical to matvec_serial.
void matvec(const InteractionMatrix& X, std::span<const double> v, std::span<double> out);
void matvec_serial(const InteractionMatrix& X, std::span<const double> v, std::span<double> out);
std::vector<double> matvec(const InteractionMatrix& X, std::span<const double> v);

// out = X^T u. The parallel kernel accumulates per-thread buffers and reduces
// them in thread order, so results are reproducible for a fixed thread count.
void rmatvec(const InteractionMatrix& X, std::span<const double> u, std::span<double> out);
void rmatvec_serial(const InteractionMatrix& X, std::span<const double> u, std::span<double> out);
std::vector<double> rmatvec(const InteractionMatrix& X, std::span<const double> u);

// Number of nonzeros per column (item popularity for binary data).
std::vector<index_t> column_counts(const InteractionMatrix& X);

InteractionMatrix transpose(const InteractionMatrix& X);

}  // namespace specrec
