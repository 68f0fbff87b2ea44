#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "specrec/csr.hpp"

namespace specrec {

// Dense matrix with i.i.d. standard normal entries.
Eigen::MatrixXd gaussian_matrix(index_t n_rows, index_t n_cols, std::uint64_t seed);

// Sparse binary matrix with i.i.d. Bernoulli(density) entries, stored as 1.0.
InteractionMatrix bernoulli_matrix(index_t n_rows, index_t n_cols, double density,
                                   std::uint64_t seed);

// Clustered implicit-feedback generator. Items get a Zipf-like global
// popularity and a latent cluster; each user belongs to one cluster and draws
// a log-normal number of distinct items, mixing global popularity with the
// cluster-specific pool. The result has the popularity skew and taste
// structure typical of consumption datasets.
struct ImplicitConfig {
    index_t n_users = 3000;
    index_t n_items = 6000;
    double avg_degree = 60.0;     // mean interactions per user
    int clusters = 25;            // latent taste clusters
    double popularity_mix = 0.35; // share of draws from global popularity
    double zipf_exponent = 1.0;   // item popularity decay
    index_t min_degree = 8;
};

InteractionMatrix implicit_dataset(const ImplicitConfig& cfg, std::uint64_t seed);

// Parsed form of a CLI synthetic-matrix spec such as
//   "gaussian:2000x1000", "bernoulli:500x300:0.05", "implicit:3000x6000:60"
struct SyntheticSpec {
    enum class Kind { gaussian, bernoulli, implicit };
    Kind kind;
    index_t n_rows = 0;
    index_t n_cols = 0;
    double density = 0.05;     // bernoulli
    ImplicitConfig implicit;   // implicit
};

SyntheticSpec parse_synthetic_spec(const std::string& spec);

}  // namespace specrec
