#include "specrec/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "specrec/errors.hpp"
#include "specrec/rng.hpp"

namespace specrec {

namespace {

// Parse one field, advancing `pos` past the trailing separator.
template <typename T>
T parse_field(const std::string& line, std::size_t& pos, char sep, std::int64_t line_no) {
    const std::size_t end = line.find(sep, pos);
    const std::size_t stop = end == std::string::npos ? line.size() : end;
    T value{};
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + stop, value);
    if (ec != std::errc() || ptr != line.data() + stop) {
        throw ParseError("malformed field '" + line.substr(pos, stop - pos) + "'", line_no);
    }
    pos = end == std::string::npos ? line.size() : end + 1;
    return value;
}

RatingRecord parse_line(const std::string& line, char sep, std::int64_t line_no) {
    RatingRecord rec{};
    std::size_t pos = 0;
    rec.user = parse_field<std::int64_t>(line, pos, sep, line_no);
    if (pos >= line.size()) throw ParseError("expected 4 fields", line_no);
    rec.item = parse_field<std::int64_t>(line, pos, sep, line_no);
    if (pos >= line.size()) throw ParseError("expected 4 fields", line_no);
    rec.rating = parse_field<double>(line, pos, sep, line_no);
    if (pos >= line.size()) throw ParseError("expected 4 fields", line_no);
    rec.timestamp = parse_field<std::int64_t>(line, pos, sep, line_no);
    if (pos != line.size()) throw ParseError("trailing characters after 4 fields", line_no);
    if (!std::isfinite(rec.rating)) throw ParseError("rating is not finite", line_no);
    return rec;
}

}  // namespace

RatingSet load_ratings(const std::string& path, RatingFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open ratings file: " + path);
    }
    const char sep = format == RatingFormat::csv_with_header ? ',' : '\t';

    RatingSet out;
    std::string line;
    std::int64_t line_no = 0;
    bool skipped_header = format != RatingFormat::csv_with_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        out.records.push_back(parse_line(line, sep, line_no));
    }
    if (out.records.empty()) {
        throw EmptyDatasetError("no rating records in " + path);
    }
    return out;
}

std::pair<InteractionMatrix, IdMaps> binarize(const RatingSet& ratings, double threshold) {
    if (!std::isfinite(threshold)) {
        throw std::invalid_argument("binarize: threshold must be finite");
    }
    std::vector<std::int64_t> users;
    std::vector<std::int64_t> items;
    for (const RatingRecord& r : ratings.records) {
        if (r.rating >= threshold) {
            users.push_back(r.user);
            items.push_back(r.item);
        }
    }
    if (users.empty()) {
        throw EmptyDatasetError("binarize: no interaction meets the rating threshold");
    }

    auto build_map = [](std::vector<std::int64_t> ids, std::unordered_map<std::int64_t, col_t>& map,
                        std::vector<std::int64_t>& inverse) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        inverse = std::move(ids);
        map.reserve(inverse.size());
        for (std::size_t i = 0; i < inverse.size(); ++i) {
            map.emplace(inverse[i], static_cast<col_t>(i));
        }
    };

    IdMaps maps;
    build_map(users, maps.user_to_index, maps.user_ids);
    build_map(items, maps.item_to_index, maps.item_ids);

    std::vector<Triplet> entries;
    entries.reserve(users.size());
    for (std::size_t p = 0; p < users.size(); ++p) {
        entries.push_back({maps.user_to_index.at(users[p]),
                           maps.item_to_index.at(items[p]), 1.0});
    }
    InteractionMatrix X = matrix_from_triplets(static_cast<index_t>(maps.user_ids.size()),
                                               static_cast<index_t>(maps.item_ids.size()),
                                               std::move(entries));
    return {std::move(X), std::move(maps)};
}

FoldSet kfold_split(const InteractionMatrix& X, int folds, std::uint64_t seed) {
    if (folds < 2) {
        throw std::invalid_argument("kfold_split: folds must be >= 2");
    }
    FoldSet out;
    out.folds = folds;
    out.seed = seed;
    out.assignment.assign(static_cast<std::size_t>(X.nnz()), 0);
    out.user_exempt.assign(static_cast<std::size_t>(X.n_rows), 0);

    std::mt19937_64 gen(seed);
    std::vector<index_t> positions;
    for (index_t u = 0; u < X.n_rows; ++u) {
        const index_t count = X.row_offsets[u + 1] - X.row_offsets[u];
        if (count < folds) {
            out.user_exempt[u] = 1;
        }
        positions.resize(static_cast<std::size_t>(count));
        for (index_t p = 0; p < count; ++p) positions[p] = X.row_offsets[u] + p;
        shuffle(positions, gen);
        for (index_t p = 0; p < count; ++p) {
            out.assignment[positions[p]] = static_cast<int>(p % folds);
        }
    }
    return out;
}

FoldView fold_views(const InteractionMatrix& X, const FoldSet& folds, int test_fold) {
    if (test_fold < 0 || test_fold >= folds.folds) {
        throw std::invalid_argument("fold_views: test_fold out of range");
    }
    if (folds.assignment.size() != static_cast<std::size_t>(X.nnz()) ||
        folds.user_exempt.size() != static_cast<std::size_t>(X.n_rows)) {
        throw std::invalid_argument("fold_views: fold set does not match matrix");
    }

    FoldView out;
    out.train.n_rows = X.n_rows;
    out.train.n_cols = X.n_cols;
    out.train.row_offsets.assign(static_cast<std::size_t>(X.n_rows) + 1, 0);
    out.test_items.resize(static_cast<std::size_t>(X.n_rows));

    for (index_t u = 0; u < X.n_rows; ++u) {
        for (index_t p = X.row_offsets[u]; p < X.row_offsets[u + 1]; ++p) {
            const bool held_out = !folds.user_exempt[u] && folds.assignment[p] == test_fold;
            if (held_out) {
                out.test_items[u].push_back(X.col_indices[p]);
                ++out.test_nnz;
            } else {
                out.train.col_indices.push_back(X.col_indices[p]);
                out.train.values.push_back(X.values[p]);
            }
        }
        out.train.row_offsets[u + 1] = static_cast<index_t>(out.train.col_indices.size());
    }
    return out;
}

}  // namespace specrec
