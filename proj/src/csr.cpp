#include "specrec/csr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace specrec {

bool InteractionMatrix::has(index_t row, col_t col) const {
    const auto cols = row_cols(row);
    return std::binary_search(cols.begin(), cols.end(), col);
}

void InteractionMatrix::check() const {
    if (n_rows < 0 || n_cols < 0) {
        throw std::invalid_argument("matrix dimensions must be non-negative");
    }
    if (row_offsets.size() != static_cast<std::size_t>(n_rows) + 1) {
        throw std::invalid_argument("row_offsets must have length n_rows + 1");
    }
    if (row_offsets.front() != 0 || row_offsets.back() != nnz()) {
        throw std::invalid_argument("row_offsets must start at 0 and end at nnz");
    }
    if (values.size() != col_indices.size()) {
        throw std::invalid_argument("values and col_indices must have equal length");
    }
    for (index_t i = 0; i < n_rows; ++i) {
        if (row_offsets[i] > row_offsets[i + 1]) {
            throw std::invalid_argument("row_offsets must be non-decreasing");
        }
        for (index_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
            if (col_indices[p] < 0 || col_indices[p] >= n_cols) {
                throw std::invalid_argument("column index out of range");
            }
            if (p > row_offsets[i] && col_indices[p] <= col_indices[p - 1]) {
                throw std::invalid_argument("column indices must be strictly increasing per row");
            }
            if (!std::isfinite(values[p]) || values[p] <= 0.0) {
                throw std::invalid_argument("values must be finite and positive");
            }
        }
    }
}

InteractionMatrix matrix_from_triplets(index_t n_rows, index_t n_cols,
                                       std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    InteractionMatrix X;
    X.n_rows = n_rows;
    X.n_cols = n_cols;
    X.row_offsets.assign(static_cast<std::size_t>(n_rows) + 1, 0);
    X.col_indices.reserve(entries.size());
    X.values.reserve(entries.size());

    for (std::size_t p = 0; p < entries.size(); ++p) {
        const Triplet& t = entries[p];
        if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols) {
            throw std::invalid_argument("triplet index out of range");
        }
        if (!X.col_indices.empty() && p > 0 && entries[p - 1].row == t.row &&
            entries[p - 1].col == t.col) {
            // duplicate interaction: collapse, keep the largest value
            X.values.back() = std::max(X.values.back(), t.value);
            continue;
        }
        X.col_indices.push_back(t.col);
        X.values.push_back(t.value);
        ++X.row_offsets[t.row + 1];
    }
    for (index_t i = 0; i < n_rows; ++i) {
        X.row_offsets[i + 1] += X.row_offsets[i];
    }
    X.check();
    return X;
}

namespace {

void require_dims(std::size_t got, index_t want, const char* what) {
    if (got != static_cast<std::size_t>(want)) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(want) + ", got " + std::to_string(got));
    }
}

}  // namespace

void matvec_serial(const InteractionMatrix& X, std::span<const double> v,
                   std::span<double> out) {
    require_dims(v.size(), X.n_cols, "matvec input");
    require_dims(out.size(), X.n_rows, "matvec output");
    for (index_t i = 0; i < X.n_rows; ++i) {
        double sum = 0.0;
        for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
            sum += X.values[p] * v[X.col_indices[p]];
        }
        out[i] = sum;
    }
}

void matvec(const InteractionMatrix& X, std::span<const double> v, std::span<double> out) {
    require_dims(v.size(), X.n_cols, "matvec input");
    require_dims(out.size(), X.n_rows, "matvec output");
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < X.n_rows; ++i) {
        double sum = 0.0;
        for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
            sum += X.values[p] * v[X.col_indices[p]];
        }
        out[i] = sum;
    }
}

std::vector<double> matvec(const InteractionMatrix& X, std::span<const double> v) {
    std::vector<double> out(static_cast<std::size_t>(X.n_rows));
    matvec(X, v, out);
    return out;
}

void rmatvec_serial(const InteractionMatrix& X, std::span<const double> u,
                    std::span<double> out) {
    require_dims(u.size(), X.n_rows, "rmatvec input");
    require_dims(out.size(), X.n_cols, "rmatvec output");
    std::fill(out.begin(), out.end(), 0.0);
    for (index_t i = 0; i < X.n_rows; ++i) {
        const double ui = u[i];
        for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
            out[X.col_indices[p]] += X.values[p] * ui;
        }
    }
}

void rmatvec(const InteractionMatrix& X, std::span<const double> u, std::span<double> out) {
#ifdef _OPENMP
    require_dims(u.size(), X.n_rows, "rmatvec input");
    require_dims(out.size(), X.n_cols, "rmatvec output");
    const int n_threads = omp_get_max_threads();
    if (n_threads <= 1 || X.nnz() < 1 << 14) {
        rmatvec_serial(X, u, out);
        return;
    }
    const std::size_t m = static_cast<std::size_t>(X.n_cols);
    std::vector<double> scratch(static_cast<std::size_t>(n_threads) * m, 0.0);
#pragma omp parallel num_threads(n_threads)
    {
        double* acc = scratch.data() + static_cast<std::size_t>(omp_get_thread_num()) * m;
#pragma omp for schedule(static)
        for (index_t i = 0; i < X.n_rows; ++i) {
            const double ui = u[i];
            for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
                acc[X.col_indices[p]] += X.values[p] * ui;
            }
        }
#pragma omp barrier
#pragma omp for schedule(static)
        for (index_t j = 0; j < X.n_cols; ++j) {
            double sum = 0.0;
            for (int t = 0; t < n_threads; ++t) {
                sum += scratch[static_cast<std::size_t>(t) * m + j];
            }
            out[j] = sum;
        }
    }
#else
    rmatvec_serial(X, u, out);
#endif
}

std::vector<double> rmatvec(const InteractionMatrix& X, std::span<const double> u) {
    std::vector<double> out(static_cast<std::size_t>(X.n_cols));
    rmatvec(X, u, out);
    return out;
}

std::vector<index_t> column_counts(const InteractionMatrix& X) {
    std::vector<index_t> counts(static_cast<std::size_t>(X.n_cols), 0);
    for (const col_t c : X.col_indices) {
        ++counts[c];
    }
    return counts;
}

InteractionMatrix transpose(const InteractionMatrix& X) {
    InteractionMatrix T;
    T.n_rows = X.n_cols;
    T.n_cols = static_cast<index_t>(X.n_rows);
    T.row_offsets.assign(static_cast<std::size_t>(T.n_rows) + 1, 0);
    T.col_indices.resize(static_cast<std::size_t>(X.nnz()));
    T.values.resize(static_cast<std::size_t>(X.nnz()));

    for (const col_t c : X.col_indices) {
        ++T.row_offsets[c + 1];
    }
    for (index_t j = 0; j < T.n_rows; ++j) {
        T.row_offsets[j + 1] += T.row_offsets[j];
    }
    std::vector<index_t> cursor(T.row_offsets.begin(), T.row_offsets.end() - 1);
    for (index_t i = 0; i < X.n_rows; ++i) {
        for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
            const index_t q = cursor[X.col_indices[p]]++;
            T.col_indices[q] = static_cast<col_t>(i);
            T.values[q] = X.values[p];
        }
    }
    return T;
}

}  // namespace specrec
