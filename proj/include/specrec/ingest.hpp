#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "specrec/csr.hpp"

namespace specrec {

struct RatingRecord {
    std::int64_t user;       // external id
    std::int64_t item;       // external id
    double rating;
    std::int64_t timestamp;  // seconds; parsed but unused
};

struct RatingSet {
    std::vector<RatingRecord> records;
};

enum class RatingFormat {
    csv_with_header,  // MovieLens ratings.csv: userId,movieId,rating,timestamp
    tab_separated,    // MovieLens u.data: user \t item \t rating \t timestamp
};

// Throws ParseError (with line number) on malformed input, EmptyDatasetError
// on files with no data rows.
RatingSet load_ratings(const std::string& path, RatingFormat format);

// Bidirectional external-id <-> dense-index maps. Indices are assigned in
// ascending external-id order, so they do not depend on record order.
struct IdMaps {
    std::unordered_map<std::int64_t, col_t> user_to_index;
    std::unordered_map<std::int64_t, col_t> item_to_index;
    std::vector<std::int64_t> user_ids;  // index -> external id
    std::vector<std::int64_t> item_ids;
};

// Keep interactions with rating >= threshold, store them as 1.0, and drop
// users/items with no surviving interaction from the maps.
std::pair<InteractionMatrix, IdMaps> binarize(const RatingSet& ratings, double threshold);

// Per-user random partition of interactions into `folds` near-equal groups.
// Users with fewer than `folds` interactions are exempt: their interactions
// stay in training for every fold. `assignment` is indexed by CSR position.
struct FoldSet {
    int folds = 0;
    std::vector<int> assignment;
    std::vector<std::uint8_t> user_exempt;
    std::uint64_t seed = 0;
};

FoldSet kfold_split(const InteractionMatrix& X, int folds, std::uint64_t seed);

struct FoldView {
    InteractionMatrix train;
    std::vector<std::vector<col_t>> test_items;  // per user, ascending
    index_t test_nnz = 0;
};

FoldView fold_views(const InteractionMatrix& X, const FoldSet& folds, int test_fold);

}  // namespace specrec
