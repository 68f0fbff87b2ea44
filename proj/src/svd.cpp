#include "specrec/svd.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

#include "specrec/errors.hpp"
#include "specrec/rng.hpp"

namespace specrec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::span<double> col_span(Eigen::MatrixXd& M, index_t col) {
    return {M.col(col).data(), static_cast<std::size_t>(M.rows())};
}

void random_unit(Eigen::Ref<Eigen::VectorXd> v, std::mt19937_64& gen) {
    for (index_t i = 0; i < v.size(); ++i) v[i] = gaussian(gen);
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
}

// Classical Gram-Schmidt with one re-pass. Returns the norm of the remainder;
// accumulates the removed coefficients into `coeffs` when given.
double orthogonalize(Eigen::Ref<Eigen::VectorXd> w, const Eigen::MatrixXd& basis,
                     index_t n_basis, double* coeffs) {
    for (int pass = 0; pass < 2; ++pass) {
        if (n_basis == 0) break;
        Eigen::VectorXd c = basis.leftCols(n_basis).transpose() * w;
        w.noalias() -= basis.leftCols(n_basis) * c;
        if (coeffs != nullptr) {
            for (index_t i = 0; i < n_basis; ++i) coeffs[i] += c[i];
        }
    }
    return w.norm();
}

// Replace w with a random unit vector orthogonal to the leading basis columns.
void reinject_random(Eigen::Ref<Eigen::VectorXd> w, const Eigen::MatrixXd& basis,
                     index_t n_basis, std::mt19937_64& gen) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        random_unit(w, gen);
        const double norm = orthogonalize(w, basis, n_basis, nullptr);
        if (norm > 0.5) {
            w /= norm;
            return;
        }
    }
    w.setZero();  // basis spans the whole space; caller stops expanding
}

TruncatedSVD empty_result(index_t n, index_t m) {
    TruncatedSVD f;
    f.U.resize(n, 0);
    f.V.resize(m, 0);
    f.sigma.resize(0);
    f.k = 0;
    f.rank_truncated = true;
    return f;
}

// Keep components with sigma above the numerical-rank threshold.
TruncatedSVD assemble(const Eigen::MatrixXd& U, const Eigen::VectorXd& sigma,
                      const Eigen::MatrixXd& V, int requested_k) {
    const double cutoff = static_cast<double>(std::max(U.rows(), V.rows())) * kEps *
                          (sigma.size() > 0 ? sigma[0] : 0.0);
    int rank = 0;
    while (rank < sigma.size() && sigma[rank] > cutoff && sigma[rank] > 0.0) ++rank;
    const int kept = std::min(rank, requested_k);

    TruncatedSVD f;
    f.U = U.leftCols(kept);
    f.sigma = sigma.head(kept);
    f.V = V.leftCols(kept);
    f.k = kept;
    f.rank_truncated = kept < requested_k;
    return f;
}

}  // namespace

TruncatedSVD truncated_svd(const InteractionMatrix& X, int k, const SolverOptions& opts) {
    const index_t n = X.n_rows;
    const index_t m = X.n_cols;
    const index_t min_dim = std::min(n, m);
    if (k < 1 || k > min_dim) {
        throw std::invalid_argument("truncated_svd: k must be in [1, min(n, m)]");
    }
    if (opts.tolerance <= 0.0) {
        throw std::invalid_argument("truncated_svd: tolerance must be positive");
    }
    if (opts.subspace_dim != 0 && opts.subspace_dim <= k) {
        throw std::invalid_argument("truncated_svd: subspace_dim must exceed k");
    }

    const index_t requested = opts.subspace_dim > 0
                                  ? static_cast<index_t>(opts.subspace_dim)
                                  : std::max<index_t>(2 * k + 1, k + 20);
    const index_t s_max = std::min(requested, min_dim);

    const InteractionMatrix XT = transpose(X);

    Eigen::MatrixXd U(n, s_max);
    Eigen::MatrixXd V(m, s_max + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(s_max, s_max);
    Eigen::VectorXd w(n), z(m);

    std::mt19937_64 gen(opts.seed);
    random_unit(V.col(0), gen);

    index_t built = 0;          // columns of U/B completed
    double beta_last = 0.0;     // norm of the unprojected rmatvec remainder
    std::vector<double> best_residuals(static_cast<std::size_t>(k),
                                       std::numeric_limits<double>::infinity());

    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        // Expand the bidiagonalization to the full subspace.
        for (index_t col = built; col < s_max; ++col) {
            matvec(X, {V.col(col).data(), static_cast<std::size_t>(m)}, col_span(U, col));
            const double alpha = orthogonalize(U.col(col), U, col, B.col(col).data());
            const double scale = std::max(B.cwiseAbs().maxCoeff(), alpha);
            if (alpha > 1e-13 * std::max(scale, 1e-300)) {
                B(col, col) = alpha;
                U.col(col) /= alpha;
            } else {
                B(col, col) = 0.0;
                reinject_random(U.col(col), U, col, gen);
            }

            matvec(XT, {U.col(col).data(), static_cast<std::size_t>(n)}, col_span(V, col + 1));
            const double beta = orthogonalize(V.col(col + 1), V, col + 1, nullptr);
            if (beta > 1e-13 * std::max(B.cwiseAbs().maxCoeff(), 1e-300)) {
                V.col(col + 1) /= beta;
                beta_last = beta;
            } else {
                beta_last = 0.0;
                reinject_random(V.col(col + 1), V, col + 1, gen);
            }
        }
        built = s_max;

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& S = svd.singularValues();
        const double sigma_max = S[0];
        if (sigma_max <= 0.0) {
            return empty_result(n, m);  // zero matrix
        }

        // Residual of triplet i is beta_last * |last row of P_i|.
        bool converged = true;
        const int k_eff = static_cast<int>(std::min<index_t>(k, s_max));
        for (int i = 0; i < k_eff; ++i) {
            const double res = beta_last * std::abs(svd.matrixU()(s_max - 1, i));
            best_residuals[i] = std::min(best_residuals[i], res / sigma_max);
            if (res > opts.tolerance * sigma_max) converged = false;
        }

        if (converged) {
            Eigen::MatrixXd Uout = U * svd.matrixU().leftCols(k_eff);
            Eigen::MatrixXd Vout = V.leftCols(s_max) * svd.matrixV().leftCols(k_eff);
            return assemble(Uout, S.head(k_eff), Vout, k);
        }
        if (restart == opts.max_restarts) break;

        // Thick restart: keep h Ritz pairs plus the last Lanczos vector.
        const index_t h = std::clamp<index_t>(k + (s_max - k) / 2, 1, s_max - 1);
        Eigen::MatrixXd Uh = U.leftCols(s_max) * svd.matrixU().leftCols(h);
        Eigen::MatrixXd Vh = V.leftCols(s_max) * svd.matrixV().leftCols(h);
        Eigen::VectorXd v_next = V.col(s_max);
        U.leftCols(h) = Uh;
        V.leftCols(h) = Vh;
        V.col(h) = v_next;
        const double vnorm = orthogonalize(V.col(h), V, h, nullptr);
        if (vnorm > 1e-8) {
            V.col(h) /= vnorm;
        } else {
            reinject_random(V.col(h), V, h, gen);
        }
        B.setZero();
        B.diagonal().head(h) = S.head(h);
        built = h;
    }

    throw ConvergenceError("truncated_svd: no convergence after " +
                               std::to_string(opts.max_restarts) + " restarts",
                           best_residuals);
}

Eigen::MatrixXd to_dense(const InteractionMatrix& X) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(X.n_rows, X.n_cols);
    for (index_t i = 0; i < X.n_rows; ++i) {
        for (index_t p = X.row_offsets[i]; p < X.row_offsets[i + 1]; ++p) {
            D(i, X.col_indices[p]) = X.values[p];
        }
    }
    return D;
}

TruncatedSVD dense_svd_oracle(const Eigen::MatrixXd& X, int k, index_t cap) {
    const index_t min_dim = std::min(X.rows(), X.cols());
    if (min_dim > cap) {
        throw std::invalid_argument(
            "dense_svd_oracle: min(n, m) exceeds the dense cap; use truncated_svd");
    }
    if (k < 1 || k > min_dim) {
        throw std::invalid_argument("dense_svd_oracle: k must be in [1, min(n, m)]");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return assemble(svd.matrixU(), svd.singularValues(), svd.matrixV(), k);
}

TruncatedSVD dense_svd_oracle(const InteractionMatrix& X, int k, index_t cap) {
    return dense_svd_oracle(to_dense(X), k, cap);
}

double EigencheckReport::max_residual() const {
    double worst = 0.0;
    for (const double r : item_residual) worst = std::max(worst, r);
    for (const double r : user_residual) worst = std::max(worst, r);
    return worst;
}

EigencheckReport eigencheck(const InteractionMatrix& X, const TruncatedSVD& f) {
    if (f.n_rows() != X.n_rows || f.n_cols() != X.n_cols) {
        throw std::invalid_argument("eigencheck: factor dimensions do not match matrix");
    }
    EigencheckReport report;
    if (f.k == 0) return report;
    const double sigma1_sq = f.sigma[0] * f.sigma[0];

    std::vector<double> tmp_n(static_cast<std::size_t>(X.n_rows));
    std::vector<double> tmp_m(static_cast<std::size_t>(X.n_cols));
    Eigen::VectorXd gram_v(X.n_cols), gram_u(X.n_rows);

    for (int i = 0; i < f.k; ++i) {
        const double lam = f.sigma[i] * f.sigma[i];

        // (X^T X) v_i, operator-form
        matvec(X, {f.V.col(i).data(), static_cast<std::size_t>(X.n_cols)}, tmp_n);
        rmatvec(X, tmp_n, {gram_v.data(), static_cast<std::size_t>(X.n_cols)});
        report.item_residual.push_back((gram_v - lam * f.V.col(i)).norm() / sigma1_sq);
        report.item_eigenvalue.push_back(f.V.col(i).dot(gram_v));

        // (X X^T) u_i
        rmatvec(X, {f.U.col(i).data(), static_cast<std::size_t>(X.n_rows)}, tmp_m);
        matvec(X, tmp_m, {gram_u.data(), static_cast<std::size_t>(X.n_rows)});
        report.user_residual.push_back((gram_u - lam * f.U.col(i)).norm() / sigma1_sq);
        report.user_eigenvalue.push_back(f.U.col(i).dot(gram_u));
    }
    return report;
}

TruncatedSVD remove_components(const TruncatedSVD& f, const std::vector<int>& drop) {
    std::vector<bool> dropped(static_cast<std::size_t>(f.k) + 1, false);
    for (const int d : drop) {
        if (d < 1 || d > f.k) {
            throw std::invalid_argument("remove_components: component index out of range");
        }
        dropped[d] = true;
    }
    std::vector<int> keep;
    for (int i = 1; i <= f.k; ++i) {
        if (!dropped[i]) keep.push_back(i);
    }
    if (keep.empty()) {
        throw EmptyModelError("remove_components: all components dropped");
    }

    TruncatedSVD out;
    out.k = static_cast<int>(keep.size());
    out.U.resize(f.U.rows(), out.k);
    out.V.resize(f.V.rows(), out.k);
    out.sigma.resize(out.k);
    for (int i = 0; i < out.k; ++i) {
        out.U.col(i) = f.U.col(keep[i] - 1);
        out.V.col(i) = f.V.col(keep[i] - 1);
        out.sigma[i] = f.sigma[keep[i] - 1];
    }
    out.sign_convention = f.sign_convention;
    out.rank_truncated = f.rank_truncated;
    return out;
}

TruncatedSVD fix_signs(TruncatedSVD f) {
    for (int i = 0; i < f.k; ++i) {
        if (f.V.col(i).sum() < 0.0) {
            f.V.col(i) = -f.V.col(i);
            f.U.col(i) = -f.U.col(i);
        }
    }
    f.sign_convention = true;
    return f;
}

std::vector<std::pair<index_t, double>> dump_component(const TruncatedSVD& f, int component,
                                                       FactorSide side) {
    if (component < 1 || component > f.k) {
        throw std::invalid_argument("dump_component: component index out of range");
    }
    const auto& M = side == FactorSide::user ? f.U : f.V;
    std::vector<std::pair<index_t, double>> out;
    out.reserve(static_cast<std::size_t>(M.rows()));
    for (index_t i = 0; i < M.rows(); ++i) {
        out.emplace_back(i, M(i, component - 1));
    }
    return out;
}

}  // namespace specrec
