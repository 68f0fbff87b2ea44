#include "specrec/rmt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "specrec/errors.hpp"

namespace specrec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Integrand of the MP density under lambda = lo + (hi - lo) sin^2(theta);
// the substitution removes both inverse-square-root edge singularities.
double mp_theta_integrand(double theta, const MPModel& model) {
    const double width = model.lambda_plus - model.lambda_minus;
    const double s2 = std::sin(theta) * std::sin(theta);
    const double c2 = std::cos(theta) * std::cos(theta);
    const double lambda = model.lambda_minus + width * s2;
    if (lambda <= 0.0) {
        // q = 1, theta = 0 limit
        return width * c2 / (kPi * model.q * model.sigma2);
    }
    return width * width * s2 * c2 / (kPi * model.q * model.sigma2 * lambda);
}

// Composite Simpson over [0, theta_star].
double mp_theta_integral(double theta_star, const MPModel& model) {
    if (theta_star <= 0.0) return 0.0;
    const int segments = 2048;
    const double h = theta_star / segments;
    double sum = mp_theta_integrand(0.0, model) + mp_theta_integrand(theta_star, model);
    for (int i = 1; i < segments; ++i) {
        sum += mp_theta_integrand(i * h, model) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace

std::pair<double, double> bulk_edges(double q, double sigma2) {
    if (!(q > 0.0) || q > 1.0) {
        throw std::invalid_argument(
            "bulk_edges: q must be in (0, 1]; swap dimensions for q > 1");
    }
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("bulk_edges: sigma2 must be positive");
    }
    const double root = std::sqrt(q);
    return {sigma2 * (1.0 - root) * (1.0 - root), sigma2 * (1.0 + root) * (1.0 + root)};
}

MPModel make_mp_model(double q, double sigma2) {
    const auto [lo, hi] = bulk_edges(q, sigma2);
    return {q, sigma2, lo, hi};
}

double mp_density(double lambda, const MPModel& model) {
    if (std::isnan(lambda)) {
        throw std::invalid_argument("mp_density: lambda is NaN");
    }
    if (lambda <= model.lambda_minus || lambda >= model.lambda_plus) {
        return 0.0;
    }
    return std::sqrt((model.lambda_plus - lambda) * (lambda - model.lambda_minus)) /
           (2.0 * kPi * model.q * model.sigma2 * lambda);
}

double mp_bulk_cdf(double lambda, const MPModel& model) {
    if (lambda <= model.lambda_minus) return 0.0;
    if (lambda >= model.lambda_plus) return 1.0;
    const double width = model.lambda_plus - model.lambda_minus;
    const double theta = std::asin(std::sqrt((lambda - model.lambda_minus) / width));
    return mp_theta_integral(theta, model);
}

double mp_median(const MPModel& model) {
    double lo = model.lambda_minus;
    double hi = model.lambda_plus;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mp_bulk_cdf(mid, model) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

SpectrumSample spectrum_from_eigenvalues(Eigen::VectorXd ev, index_t n_samples,
                                         index_t n_variables, index_t implicit_zeros) {
    SpectrumSample s;
    s.n_samples = n_samples;
    s.n_variables = n_variables;
    s.implicit_zeros = implicit_zeros;
    s.complete = true;
    s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (double& v : s.eigenvalues) {
        if (v < 0.0 && v > -1e-10) v = 0.0;  // clamp eigensolver noise
    }
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<>());
    return s;
}

}  // namespace

SpectrumSample covariance_spectrum(const Eigen::MatrixXd& X, index_t dense_cap) {
    const bool swap = X.cols() > X.rows();
    const index_t n = swap ? X.cols() : X.rows();
    const index_t m = swap ? X.rows() : X.cols();
    if (m > dense_cap) {
        throw std::invalid_argument(
            "covariance_spectrum: min dimension exceeds the dense cap; use "
            "covariance_spectrum_top_k");
    }
    Eigen::MatrixXd gram(m, m);
    if (swap) {
        gram.noalias() = X * X.transpose();
    } else {
        gram.noalias() = X.transpose() * X;
    }
    gram /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    return spectrum_from_eigenvalues(eig.eigenvalues(), n, m,
                                     swap ? X.cols() - X.rows() : 0);
}

SpectrumSample covariance_spectrum(const InteractionMatrix& X, index_t dense_cap) {
    const bool swap = X.n_cols > X.n_rows;
    const InteractionMatrix& A = swap ? transpose(X) : X;  // binds to temp only when swapped
    const InteractionMatrix AT = transpose(A);
    const index_t n = A.n_rows;
    const index_t m = A.n_cols;
    if (m > dense_cap) {
        throw std::invalid_argument(
            "covariance_spectrum: min dimension exceeds the dense cap; use "
            "covariance_spectrum_top_k");
    }

    // Dense Gram assembled row-by-row from the transposed matrix: row j of
    // A^T A is the sum of the rows of A that contain item j. Parallel over j,
    // each thread owns one output row.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
#pragma omp parallel for schedule(dynamic, 16)
    for (index_t j = 0; j < m; ++j) {
        double* out = gram.col(j).data();  // symmetric, fill as columns
        for (index_t p = AT.row_offsets[j]; p < AT.row_offsets[j + 1]; ++p) {
            const index_t i = AT.col_indices[p];
            const double w = AT.values[p];
            for (index_t r = A.row_offsets[i]; r < A.row_offsets[i + 1]; ++r) {
                out[A.col_indices[r]] += w * A.values[r];
            }
        }
    }
    gram /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    return spectrum_from_eigenvalues(eig.eigenvalues(), n, m, swap ? X.n_cols - X.n_rows : 0);
}

SpectrumSample covariance_spectrum_top_k(const InteractionMatrix& X, int k,
                                         const SolverOptions& opts) {
    const bool swap = X.n_cols > X.n_rows;
    const index_t n = swap ? X.n_cols : X.n_rows;
    const index_t m = swap ? X.n_rows : X.n_cols;

    const TruncatedSVD f = truncated_svd(X, k, opts);  // singular values are orientation-free
    SpectrumSample s;
    s.n_samples = n;
    s.n_variables = m;
    s.implicit_zeros = swap ? X.n_cols - X.n_rows : 0;
    s.complete = false;
    s.eigenvalues.reserve(static_cast<std::size_t>(f.k));
    for (int i = 0; i < f.k; ++i) {
        s.eigenvalues.push_back(f.sigma[i] * f.sigma[i] / static_cast<double>(n));
    }
    return s;
}

MPModel fit_sigma2(const SpectrumSample& s) {
    if (!s.complete) {
        throw std::invalid_argument("fit_sigma2: requires a complete spectrum");
    }
    if (s.eigenvalues.size() < 2 || s.n_samples <= 0 || s.n_variables <= 0) {
        throw FitError("fit_sigma2: spectrum too small to fit");
    }
    const double q =
        static_cast<double>(s.n_variables) / static_cast<double>(s.n_samples);
    if (q > 1.0) {
        throw std::invalid_argument("fit_sigma2: q > 1; spectrum should be dimension-swapped");
    }
    if (s.eigenvalues.front() - s.eigenvalues.back() <
        1e-12 * std::max(1.0, s.eigenvalues.front())) {
        throw FitError("fit_sigma2: degenerate spectrum (all eigenvalues equal)");
    }

    const double unit_median = mp_median(make_mp_model(q, 1.0));
    // eigenvalues are descending; the median over a suffix is cheap to index
    const auto median_below = [&](double edge) -> double {
        // first index with value <= edge
        std::size_t lo = 0, hi = s.eigenvalues.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            (s.eigenvalues[mid] > edge ? lo : hi) = mid + (s.eigenvalues[mid] > edge ? 1 : 0);
        }
        const std::size_t count = s.eigenvalues.size() - lo;
        if (count == 0) return -1.0;
        const std::size_t mid = lo + count / 2;
        return count % 2 == 1 ? s.eigenvalues[mid]
                              : 0.5 * (s.eigenvalues[mid - 1] + s.eigenvalues[mid]);
    };

    double sigma2 = median_below(std::numeric_limits<double>::infinity()) / unit_median;
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw FitError("fit_sigma2: could not initialize the scale");
    }
    for (int iter = 0; iter < 50; ++iter) {
        const auto [lo, hi] = bulk_edges(q, sigma2);
        const double med = median_below(hi);
        if (med <= 0.0) {
            throw FitError("fit_sigma2: empirical bulk collapsed during iteration");
        }
        const double next = med / unit_median;
        const bool done = std::abs(next - sigma2) <= 1e-12 * sigma2;
        sigma2 = next;
        if (done) break;
    }
    return make_mp_model(q, sigma2);
}

int noise_rank(const SpectrumSample& s, const MPModel& model, double relative_buffer) {
    const double edge = model.lambda_plus * (1.0 + relative_buffer);
    int count = 0;
    for (const double v : s.eigenvalues) {
        if (v > edge) {
            ++count;
        } else {
            break;  // descending order
        }
    }
    return count;
}

SpectrumHistogram spectrum_histogram(const SpectrumSample& s, int bins, const MPModel& model,
                                     double overflow_factor, bool include_implicit_zeros) {
    if (bins < 2) {
        throw std::invalid_argument("spectrum_histogram: bins must be >= 2");
    }
    std::vector<double> lambdas = s.eigenvalues;
    if (include_implicit_zeros) {
        lambdas.insert(lambdas.end(), static_cast<std::size_t>(s.implicit_zeros), 0.0);
    }
    if (lambdas.empty()) {
        throw std::invalid_argument("spectrum_histogram: empty spectrum");
    }

    SpectrumHistogram h;
    const double spike_cut = overflow_factor * model.lambda_plus;
    double binned_max = 0.0;
    std::size_t binned_count = 0;
    for (const double v : lambdas) {
        if (v > spike_cut) {
            h.overflow.push_back(v);
        } else {
            binned_max = std::max(binned_max, v);
            ++binned_count;
        }
    }
    if (binned_count == 0) {
        throw std::invalid_argument("spectrum_histogram: no eigenvalues below overflow cut");
    }

    const double hi = std::max(model.lambda_plus, binned_max);
    h.bin_width = hi / bins;
    h.centers.resize(bins);
    h.empirical.assign(bins, 0.0);
    h.mp.resize(bins);
    for (int b = 0; b < bins; ++b) {
        h.centers[b] = (b + 0.5) * h.bin_width;
        h.mp[b] = mp_density(h.centers[b], model);
    }
    for (const double v : lambdas) {
        if (v > spike_cut) continue;
        int b = static_cast<int>(v / h.bin_width);
        b = std::clamp(b, 0, bins - 1);
        h.empirical[b] += 1.0;
    }
    const double mass = static_cast<double>(binned_count) * h.bin_width;
    for (double& e : h.empirical) e /= mass;
    return h;
}

void write_histogram_csv(std::ostream& out, const SpectrumHistogram& h) {
    out << "lambda,empirical,mp\n";
    char buf[96];
    for (std::size_t i = 0; i < h.centers.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", h.centers[i], h.empirical[i],
                      h.mp[i]);
        out << buf;
    }
    for (const double v : h.overflow) {
        std::snprintf(buf, sizeof(buf), "# overflow,%.12g\n", v);
        out << buf;
    }
}

}  // namespace specrec
