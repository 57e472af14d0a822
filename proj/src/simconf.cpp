#include "instrank/simconf.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>
#include <unordered_map>

#include "instrank/errors.hpp"

namespace instrank::simconf {

namespace {

void sort_ranked(std::vector<std::pair<std::string, double>>& ranked) {
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
}

std::vector<double> column_sums(const AuthorVenueMatrix& m) {
    const std::size_t n_cols = m.col_venues.size();
    std::vector<double> sums(n_cols, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < n_cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.row_authors.size(); ++i) s += m.at(i, j);
        sums[j] = s;
    }
    return sums;
}

}  // namespace

Method method_from_string(const std::string& name) {
    if (name == "cosine") return Method::cosine;
    if (name == "colsum") return Method::column_sum;
    throw ArgumentError("unknown similarity method '" + name +
                        "' (expected cosine or colsum)");
}

std::string to_string(Method method) {
    return method == Method::cosine ? "cosine" : "colsum";
}

AuthorVenueMatrix build_author_venue_matrix(const corpus::CorpusIndex& index,
                                            const std::string& target_venue,
                                            int cutoff_year) {
    AuthorVenueMatrix m;
    m.target_venue = target_venue;
    m.cutoff_year = cutoff_year;
    m.row_authors = index.authors_at_venue_since(target_venue, cutoff_year);
    if (m.row_authors.empty())
        throw ValidationError("venue '" + target_venue + "' has no papers since " +
                              std::to_string(cutoff_year) +
                              ": author-venue matrix would be empty");

    std::vector<std::vector<std::string>> venues_per_author(m.row_authors.size());
    std::set<std::string> venue_set;
    for (std::size_t i = 0; i < m.row_authors.size(); ++i) {
        venues_per_author[i] = index.venues_of_author_since(m.row_authors[i], cutoff_year);
        venue_set.insert(venues_per_author[i].begin(), venues_per_author[i].end());
    }
    m.col_venues.assign(venue_set.begin(), venue_set.end());

    std::unordered_map<std::string_view, std::size_t> col_of;
    col_of.reserve(m.col_venues.size());
    for (std::size_t j = 0; j < m.col_venues.size(); ++j)
        col_of.emplace(m.col_venues[j], j);
    m.target_col = col_of.at(target_venue);

    m.entries.assign(m.row_authors.size() * m.col_venues.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < m.row_authors.size(); ++i)
        for (const std::string& v : venues_per_author[i])
            m.entries[i * m.col_venues.size() + col_of.at(v)] = 1;

    return m;
}

SimilarityRanking cosine_similarity_ranking(const AuthorVenueMatrix& m) {
    if (m.row_authors.empty() || m.col_venues.empty())
        throw ArgumentError("cosine ranking requires a non-empty matrix");

    const std::size_t n_rows = m.row_authors.size();
    const std::size_t n_cols = m.col_venues.size();
    const std::vector<double> sums = column_sums(m);
    if (sums[m.target_col] <= 0.0)
        throw ValidationError("target column of the author-venue matrix is all zero");

    // L1-normalized target column.
    std::vector<double> target(n_rows);
    double target_norm2 = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
        target[i] = m.at(i, m.target_col) / sums[m.target_col];
        target_norm2 += target[i] * target[i];
    }
    const double target_norm = std::sqrt(target_norm2);

    std::vector<double> scores(n_cols, -1.0);  // -1 marks dropped columns
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (j == m.target_col) continue;
        if (sums[j] <= 0.0) continue;  // all-zero column: undefined direction
        double dot = 0.0, norm2 = 0.0;
        for (std::size_t i = 0; i < n_rows; ++i) {
            double v = m.at(i, j) / sums[j];
            dot += v * target[i];
            norm2 += v * v;
        }
        scores[j] = dot / (std::sqrt(norm2) * target_norm);
    }

    SimilarityRanking r;
    r.target_venue = m.target_venue;
    r.method = Method::cosine;
    for (std::size_t j = 0; j < n_cols; ++j)
        if (j != m.target_col && scores[j] >= 0.0)
            r.ranked.emplace_back(m.col_venues[j], scores[j]);
    sort_ranked(r.ranked);
    return r;
}

SimilarityRanking column_sum_ranking(const AuthorVenueMatrix& m) {
    if (m.row_authors.empty() || m.col_venues.empty())
        throw ArgumentError("column-sum ranking requires a non-empty matrix");

    const std::vector<double> sums = column_sums(m);
    SimilarityRanking r;
    r.target_venue = m.target_venue;
    r.method = Method::column_sum;
    for (std::size_t j = 0; j < m.col_venues.size(); ++j)
        if (j != m.target_col) r.ranked.emplace_back(m.col_venues[j], sums[j]);
    sort_ranked(r.ranked);
    return r;
}

TopSimilar top_similar(const SimilarityRanking& ranking, std::size_t k) {
    if (k < 1) throw ArgumentError("top_similar requires k >= 1");
    TopSimilar result;
    result.shortfall = ranking.ranked.size() < k;
    const std::size_t take = std::min(k, ranking.ranked.size());
    result.venues.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        result.venues.push_back(ranking.ranked[i].first);
    return result;
}

}  // namespace instrank::simconf
