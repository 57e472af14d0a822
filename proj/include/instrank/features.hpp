#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"

namespace instrank::features {

inline constexpr std::size_t kNumFeatures = 6;
inline constexpr std::size_t kNumSettings = 6;
inline constexpr std::size_t kNumWindows = 4;
inline constexpr std::size_t kNumColumns = kNumSettings * kNumWindows * kNumFeatures;

inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "n_paper", "n_author", "n_author_paper", "n_first_author", "n_second_author",
    "score"};

// The six per-scope statistics, in canonical order.
struct BasicFeatures {
    std::int64_t n_paper = 0;
    std::int64_t n_author = 0;
    std::int64_t n_author_paper = 0;
    std::int64_t n_first_author = 0;
    std::int64_t n_second_author = 0;
    double score = 0.0;

    std::array<double, kNumFeatures> as_array() const {
        return {static_cast<double>(n_paper),        static_cast<double>(n_author),
                static_cast<double>(n_author_paper), static_cast<double>(n_first_author),
                static_cast<double>(n_second_author), score};
    }
    bool operator==(const BasicFeatures&) const = default;
};

// Column layout contract for one target conference and target year:
//   settings: (1) target full-only, (2) target all, (3..5) each similar venue
//             all, (6) union of all four venues all;
//   windows:  [t-1,t-1], [t-2,t-2], [t-3,t-3], [t-3,t-1].
// Column (s, w, f), all 0-based, lives at index (s*4 + w)*6 + f and is named
// "<s+1>.<w+1>.<feature>".
struct FeatureSpec {
    std::string target_venue;
    std::array<std::string, 3> similar_venues;
    int target_year = 0;

    struct Scope {
        std::vector<std::string> venues;
        corpus::YearRange years;
        bool full_only = false;
    };
    Scope scope(std::size_t setting, std::size_t window) const;

    static std::vector<std::string> column_names();
    static std::size_t column_index(std::size_t setting, std::size_t window,
                                    std::size_t feature);
};

struct FeatureMatrix {
    FeatureSpec spec;
    std::vector<std::string> institutions;  // ascending institution_id
    std::vector<double> values;             // row-major, kNumColumns per row
    std::vector<std::string> warnings;

    double at(std::size_t row, std::size_t col) const {
        return values[row * kNumColumns + col];
    }
    std::span<const double> row(std::size_t r) const {
        return {values.data() + r * kNumColumns, kNumColumns};
    }
};

struct LabelVector {
    std::string target_venue;
    int target_year = 0;
    std::map<std::string, double> labels;  // ground-truth scores, full papers
};

// One institution, one scope. Counts follow Table-1 semantics; score is the
// scoring module's value for this institution in the same scope.
BasicFeatures basic_features(const corpus::CorpusIndex& index,
                             const std::string& institution,
                             const std::vector<std::string>& venue_set,
                             corpus::YearRange years, bool full_only);

// Rows: every institution with a nonzero entry in at least one column, plus
// extra_institutions (label-only rows at training time, the prediction
// universe later). The 24 scope passes run in parallel.
FeatureMatrix assemble_matrix(const corpus::CorpusIndex& index, const FeatureSpec& spec,
                              const std::vector<std::string>& extra_institutions = {});

// Ground-truth labels: full-paper institution scores of the target year.
LabelVector target_scores(const corpus::CorpusIndex& index, const std::string& venue,
                          int year);

// TSV: institution_id + the 144 canonical column names, 6-decimal values.
void write_feature_tsv(const FeatureMatrix& matrix, std::ostream& out);

}  // namespace instrank::features
