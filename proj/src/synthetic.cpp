#include "specrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "specrec/rng.hpp"

namespace specrec {

Eigen::MatrixXd gaussian_matrix(index_t n_rows, index_t n_cols, std::uint64_t seed) {
    if (n_rows <= 0 || n_cols <= 0) {
        throw std::invalid_argument("gaussian_matrix: dimensions must be positive");
    }
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd X(n_rows, n_cols);
    for (index_t i = 0; i < n_rows; ++i) {
        for (index_t j = 0; j < n_cols; ++j) {
            X(i, j) = gaussian(gen);
        }
    }
    return X;
}

InteractionMatrix bernoulli_matrix(index_t n_rows, index_t n_cols, double density,
                                   std::uint64_t seed) {
    if (density <= 0.0 || density > 1.0) {
        throw std::invalid_argument("bernoulli_matrix: density must be in (0, 1]");
    }
    std::mt19937_64 gen(seed);
    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(density * static_cast<double>(n_rows) *
                                             static_cast<double>(n_cols) * 1.1));
    for (index_t i = 0; i < n_rows; ++i) {
        for (index_t j = 0; j < n_cols; ++j) {
            if (uniform_double(gen) < density) {
                entries.push_back({i, static_cast<col_t>(j), 1.0});
            }
        }
    }
    return matrix_from_triplets(n_rows, n_cols, std::move(entries));
}

namespace {

// Draw an index from a discrete distribution given its cumulative weights.
index_t sample_cdf(const std::vector<double>& cdf, std::mt19937_64& gen) {
    const double r = uniform_double(gen) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    return std::min<index_t>(static_cast<index_t>(it - cdf.begin()),
                             static_cast<index_t>(cdf.size()) - 1);
}

}  // namespace

InteractionMatrix implicit_dataset(const ImplicitConfig& cfg, std::uint64_t seed) {
    if (cfg.n_users <= 0 || cfg.n_items <= 0 || cfg.clusters <= 0) {
        throw std::invalid_argument("implicit_dataset: sizes must be positive");
    }
    if (cfg.popularity_mix < 0.0 || cfg.popularity_mix > 1.0) {
        throw std::invalid_argument("implicit_dataset: popularity_mix must be in [0, 1]");
    }
    std::mt19937_64 gen(seed);
    const index_t n = cfg.n_users;
    const index_t m = cfg.n_items;

    // Zipf-like weights over a random item permutation, so popularity is not
    // correlated with item index.
    std::vector<index_t> rank(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j) rank[j] = j;
    shuffle(rank, gen);
    std::vector<double> weight(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j) {
        weight[j] = std::pow(static_cast<double>(rank[j]) + 10.0, -cfg.zipf_exponent);
    }

    std::vector<int> item_cluster(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j) {
        item_cluster[j] = static_cast<int>(uniform_below(gen, cfg.clusters));
    }

    std::vector<double> global_cdf(static_cast<std::size_t>(m));
    double acc = 0.0;
    for (index_t j = 0; j < m; ++j) {
        acc += weight[j];
        global_cdf[j] = acc;
    }

    // Per-cluster item lists and their popularity CDFs.
    std::vector<std::vector<index_t>> cluster_items(cfg.clusters);
    std::vector<std::vector<double>> cluster_cdf(cfg.clusters);
    for (index_t j = 0; j < m; ++j) {
        cluster_items[item_cluster[j]].push_back(j);
    }
    for (int g = 0; g < cfg.clusters; ++g) {
        double s = 0.0;
        cluster_cdf[g].reserve(cluster_items[g].size());
        for (const index_t j : cluster_items[g]) {
            s += weight[j];
            cluster_cdf[g].push_back(s);
        }
    }

    const double mu = std::log(cfg.avg_degree) - 0.25;
    const index_t max_degree = std::max<index_t>(cfg.min_degree, m / 4);

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(static_cast<double>(n) * cfg.avg_degree));
    std::unordered_set<index_t> chosen;
    for (index_t u = 0; u < n; ++u) {
        const int g = static_cast<int>(uniform_below(gen, cfg.clusters));
        double draw = std::exp(mu + 0.7 * gaussian(gen));
        const index_t degree = std::clamp<index_t>(static_cast<index_t>(std::lround(draw)),
                                                   cfg.min_degree, max_degree);
        index_t n_global = 0;
        for (index_t d = 0; d < degree; ++d) {
            n_global += uniform_double(gen) < cfg.popularity_mix ? 1 : 0;
        }
        chosen.clear();
        index_t attempts = 0;
        while (static_cast<index_t>(chosen.size()) < n_global && attempts < 20 * degree) {
            chosen.insert(sample_cdf(global_cdf, gen));
            ++attempts;
        }
        attempts = 0;
        const auto& items = cluster_items[g];
        while (static_cast<index_t>(chosen.size()) < degree && attempts < 40 * degree &&
               !items.empty()) {
            chosen.insert(items[sample_cdf(cluster_cdf[g], gen)]);
            ++attempts;
        }
        for (const index_t j : chosen) {
            entries.push_back({u, static_cast<col_t>(j), 1.0});
        }
    }
    return matrix_from_triplets(n, m, std::move(entries));
}

SyntheticSpec parse_synthetic_spec(const std::string& spec) {
    SyntheticSpec out;
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t pos = spec.find(':', start);
        if (pos == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, pos - start));
        start = pos + 1;
    }
    if (parts.size() < 2) {
        throw std::invalid_argument("synthetic spec must look like kind:ROWSxCOLS[:...]");
    }
    const std::string& kind = parts[0];
    const std::size_t x = parts[1].find('x');
    if (x == std::string::npos) {
        throw std::invalid_argument("synthetic spec dimensions must look like ROWSxCOLS");
    }
    out.n_rows = std::stoll(parts[1].substr(0, x));
    out.n_cols = std::stoll(parts[1].substr(x + 1));
    if (out.n_rows <= 0 || out.n_cols <= 0) {
        throw std::invalid_argument("synthetic spec dimensions must be positive");
    }
    if (kind == "gaussian") {
        out.kind = SyntheticSpec::Kind::gaussian;
    } else if (kind == "bernoulli") {
        out.kind = SyntheticSpec::Kind::bernoulli;
        if (parts.size() > 2) out.density = std::stod(parts[2]);
    } else if (kind == "implicit") {
        out.kind = SyntheticSpec::Kind::implicit;
        out.implicit.n_users = out.n_rows;
        out.implicit.n_items = out.n_cols;
        if (parts.size() > 2) out.implicit.avg_degree = std::stod(parts[2]);
        if (parts.size() > 3) out.implicit.clusters = std::stoi(parts[3]);
        if (parts.size() > 4) out.implicit.popularity_mix = std::stod(parts[4]);
        if (parts.size() > 5) out.implicit.zipf_exponent = std::stod(parts[5]);
    } else {
        throw std::invalid_argument("unknown synthetic kind: " + kind);
    }
    return out;
}

}  // namespace specrec
