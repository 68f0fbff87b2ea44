#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "specrec/csr.hpp"

namespace specrec {

struct SolverOptions {
    double tolerance = 1e-8;  // converged when residual <= tolerance * sigma_max
    int max_restarts = 1000;
    int subspace_dim = 0;     // 0 -> max(2k + 1, k + 20), capped at min(n, m)
    std::uint64_t seed = 1;   // start vector; full reorthogonalization always on
};

// Rank-k factorization X ~= U * diag(sigma) * V^T.
struct TruncatedSVD {
    Eigen::MatrixXd U;      // n x k, orthonormal columns
    Eigen::VectorXd sigma;  // k, strictly positive, non-increasing
    Eigen::MatrixXd V;      // m x k, orthonormal columns
    int k = 0;
    bool sign_convention = false;  // true once fix_signs has oriented the columns
    bool rank_truncated = false;   // requested rank exceeded the numerical rank

    index_t n_rows() const { return U.rows(); }
    index_t n_cols() const { return V.rows(); }
};

// Truncated SVD by restarted Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization of both Krylov bases and Ritz-augmented thick restarts.
// Only matvec/rmatvec access to X is used. Throws ConvergenceError (with the
// best residuals) if max_restarts is exhausted; returns a reduced-rank result
// with rank_truncated set when X has fewer than k nonzero singular values.
TruncatedSVD truncated_svd(const InteractionMatrix& X, int k,
                           const SolverOptions& opts = {});

// Reference implementation: classical dense decomposition, truncated to k.
// Intended as an independent oracle for tests; refuses min(n, m) > cap.
TruncatedSVD dense_svd_oracle(const Eigen::MatrixXd& X, int k, index_t cap = 2000);
TruncatedSVD dense_svd_oracle(const InteractionMatrix& X, int k, index_t cap = 2000);

Eigen::MatrixXd to_dense(const InteractionMatrix& X);

// Per-component residuals of the eigenvector identities
//   (X^T X) v_i = sigma_i^2 v_i  and  (X X^T) u_i = sigma_i^2 u_i,
// with the Gram products applied operator-form. Residuals are relative to
// sigma_1^2; eigenvalue columns hold the Rayleigh quotients of each factor.
struct EigencheckReport {
    std::vector<double> item_residual;
    std::vector<double> user_residual;
    std::vector<double> item_eigenvalue;
    std::vector<double> user_eigenvalue;
    double max_residual() const;
};

EigencheckReport eigencheck(const InteractionMatrix& X, const TruncatedSVD& f);

// Return a factorization with the listed components removed. Component
// indices are 1-based (1 = largest singular value). Dropping every component
// throws EmptyModelError.
TruncatedSVD remove_components(const TruncatedSVD& f, const std::vector<int>& drop);

// Orient each column pair so sum(V[:, i]) >= 0. Leaves U * diag(sigma) * V^T
// unchanged.
TruncatedSVD fix_signs(TruncatedSVD f);

enum class FactorSide { user, item };

// Plot-ready (entity index, component value) pairs for U[:, i] or V[:, i];
// i is 1-based.
std::vector<std::pair<index_t, double>> dump_component(const TruncatedSVD& f,
                                                       int component, FactorSide side);

// Factor container: little-endian float64 matrices in <dir>/factors.bin plus
// a JSON sidecar <dir>/factors.json recording n, m, k, tolerance, seed and
// the sign convention.
void save_factors(const TruncatedSVD& f, const std::string& dir, double tolerance,
                  std::uint64_t seed);
TruncatedSVD load_factors(const std::string& dir);

}  // namespace specrec
