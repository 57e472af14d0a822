#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"

namespace instrank::simconf {

enum class Method { cosine, column_sum };

Method method_from_string(const std::string& name);
std::string to_string(Method method);

// Binary author x venue co-occurrence matrix. Rows are exactly the authors
// who published at the target venue since the cutoff year (any paper flag);
// columns cover every venue those authors touched since the cutoff, target
// included. Rows and columns are sorted by id.
struct AuthorVenueMatrix {
    std::string target_venue;
    int cutoff_year = 0;
    std::vector<std::string> row_authors;
    std::vector<std::string> col_venues;
    std::vector<std::uint8_t> entries;  // row-major, values in {0,1}
    std::size_t target_col = 0;

    std::uint8_t at(std::size_t row, std::size_t col) const {
        return entries[row * col_venues.size() + col];
    }
};

struct SimilarityRanking {
    std::string target_venue;
    Method method = Method::cosine;
    // Descending score, ties by ascending venue_id; target excluded.
    std::vector<std::pair<std::string, double>> ranked;
};

struct TopSimilar {
    std::vector<std::string> venues;
    bool shortfall = false;  // fewer than k venues were available
};

AuthorVenueMatrix build_author_venue_matrix(const corpus::CorpusIndex& index,
                                            const std::string& target_venue,
                                            int cutoff_year);

// L1-normalizes each column, then scores every venue by the cosine of its
// normalized column against the normalized target column. All-zero columns
// are dropped.
SimilarityRanking cosine_similarity_ranking(const AuthorVenueMatrix& matrix);

// Scores every venue by its column sum: the number of target-venue authors
// who also published there.
SimilarityRanking column_sum_ranking(const AuthorVenueMatrix& matrix);

TopSimilar top_similar(const SimilarityRanking& ranking, std::size_t k);

}  // namespace instrank::simconf
