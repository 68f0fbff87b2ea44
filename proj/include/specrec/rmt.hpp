#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "specrec/csr.hpp"
#include "specrec/svd.hpp"

namespace specrec {

// Fitted Marchenko-Pastur parameters. With sigma2 = 1 the support edges are
// the classical (1 +/- sqrt(q))^2.
struct MPModel {
    double q = 0.0;       // aspect ratio in (0, 1]
    double sigma2 = 1.0;  // variance scale
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
};

// (lambda_minus, lambda_plus) = sigma2 * (1 -/+ sqrt(q))^2. Throws
// std::invalid_argument for q outside (0, 1]; callers with m > n swap
// dimensions first.
std::pair<double, double> bulk_edges(double q, double sigma2);

MPModel make_mp_model(double q, double sigma2);

// Marchenko-Pastur density at lambda; zero outside the open support interval.
double mp_density(double lambda, const MPModel& model);

// Integral of the density over [lambda_minus, lambda], computed with an
// edge-singularity-removing substitution.
double mp_bulk_cdf(double lambda, const MPModel& model);

// Median of the MP distribution.
double mp_median(const MPModel& model);

// Empirical eigenvalues of the scaled Gram matrix C = (1/n) X^T X,
// descending. For m > n the matrix is transposed and the dimensions swapped;
// the (m - n) implicit zero eigenvalues of the larger Gram are recorded in
// implicit_zeros rather than stored.
struct SpectrumSample {
    std::vector<double> eigenvalues;  // descending, >= 0
    index_t n_samples = 0;            // normalizing dimension n
    index_t n_variables = 0;          // m (after any swap: n_variables <= n_samples)
    index_t implicit_zeros = 0;
    bool complete = false;            // full spectrum vs top-only
};

// Full dense spectrum; refuses min(n, m) > dense_cap.
SpectrumSample covariance_spectrum(const InteractionMatrix& X, index_t dense_cap = 5000);
SpectrumSample covariance_spectrum(const Eigen::MatrixXd& X, index_t dense_cap = 5000);

// Top-k eigenvalues via the sparse SVD path (sigma_i^2 / n).
SpectrumSample covariance_spectrum_top_k(const InteractionMatrix& X, int k,
                                         const SolverOptions& opts = {});

// Fit the variance scale by iterated bulk-median matching: sigma2 is chosen
// so the median of the empirical bulk (eigenvalues at or below the current
// upper edge) matches the MP median. Robust to signal eigenvalues above the
// bulk. Requires a complete spectrum. Throws FitError when degenerate.
MPModel fit_sigma2(const SpectrumSample& s);

// Number of eigenvalues strictly above lambda_plus * (1 + relative_buffer).
// The default buffer is 0 (strict edge); finite-size edge fluctuations can be
// absorbed with a small positive buffer.
int noise_rank(const SpectrumSample& s, const MPModel& model, double relative_buffer = 0.0);

struct SpectrumHistogram {
    std::vector<double> centers;
    std::vector<double> empirical;  // integrates to 1 over the binned range
    std::vector<double> mp;         // mp_density at bin centers
    double bin_width = 0.0;
    std::vector<double> overflow;   // eigenvalues beyond overflow_factor * lambda_plus
};

// Uniform bins over [0, max(lambda_plus, largest binned eigenvalue)]. Spikes
// above overflow_factor * lambda_plus are listed separately, as a zoomed-out
// histogram would render them invisibly. Implicit zeros are excluded unless
// include_implicit_zeros is set.
SpectrumHistogram spectrum_histogram(const SpectrumSample& s, int bins, const MPModel& model,
                                     double overflow_factor = 1.5,
                                     bool include_implicit_zeros = false);

// CSV with header "lambda,empirical,mp"; overflow eigenvalues are appended as
// comment lines.
void write_histogram_csv(std::ostream& out, const SpectrumHistogram& h);

}  // namespace specrec
