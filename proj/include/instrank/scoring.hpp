#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"

namespace instrank::scoring {

// Institution Ranking Score table for one scope. Institutions that earned
// nothing are omitted, so every stored score is > 0.
struct ScoreTable {
    std::vector<std::string> venue_set;
    corpus::YearRange years;
    bool full_only = false;
    std::map<std::string, double> scores;
};

// Fractional counting: a paper with n distinct authors gives each author a
// 1/n share, split equally across that author's k distinct known
// affiliations on the paper. Authors with no known affiliation drop their
// share. Summation order per institution is fixed (paper_id, position,
// institution_id ascending) so results are bit-reproducible; the per-paper
// enumeration runs in parallel.
ScoreTable institution_scores(const corpus::CorpusIndex& index,
                              const std::vector<std::string>& venue_set,
                              corpus::YearRange years, bool full_only);

// Rows sorted by descending score, ties by ascending institution_id.
std::vector<std::pair<std::string, double>> sorted_rows(const ScoreTable& table);

// TSV with header, scores at 6 decimal places.
void write_score_tsv(const ScoreTable& table, std::ostream& out);

}  // namespace instrank::scoring
