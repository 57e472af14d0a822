#include "instrank/scoring.hpp"

#include <algorithm>
#include <ostream>

#include "instrank/errors.hpp"
#include "instrank/tsv.hpp"

namespace instrank::scoring {

namespace {

struct Contribution {
    std::string_view institution;
    double weight;
};

// Contributions of one paper in (position, institution) order. The
// authorship span is already sorted by (position, author_id, institution_id),
// with one row per (author, affiliation).
void paper_contributions(std::span<const corpus::AuthorshipRecord> auths,
                         std::vector<Contribution>& out) {
    out.clear();
    if (auths.empty()) return;

    std::size_t n_authors = 0;
    for (std::size_t i = 0; i < auths.size();) {
        std::size_t j = i;
        while (j < auths.size() && auths[j].author_id == auths[i].author_id &&
               auths[j].position == auths[i].position)
            ++j;
        ++n_authors;
        i = j;
    }

    for (std::size_t i = 0; i < auths.size();) {
        std::size_t j = i;
        std::size_t known = 0;
        while (j < auths.size() && auths[j].author_id == auths[i].author_id &&
               auths[j].position == auths[i].position) {
            if (!auths[j].institution_id.empty()) ++known;
            ++j;
        }
        if (known > 0) {
            double w = 1.0 / (static_cast<double>(n_authors) * static_cast<double>(known));
            for (std::size_t k = i; k < j; ++k)
                if (!auths[k].institution_id.empty())
                    out.push_back({auths[k].institution_id, w});
        }
        i = j;
    }
}

}  // namespace

ScoreTable institution_scores(const corpus::CorpusIndex& index,
                              const std::vector<std::string>& venue_set,
                              corpus::YearRange years, bool full_only) {
    if (years.empty())
        throw ArgumentError("empty year range [" + std::to_string(years.lo) + ", " +
                            std::to_string(years.hi) + "]");

    ScoreTable table;
    table.venue_set = venue_set;
    std::sort(table.venue_set.begin(), table.venue_set.end());
    table.venue_set.erase(std::unique(table.venue_set.begin(), table.venue_set.end()),
                          table.venue_set.end());
    table.years = years;
    table.full_only = full_only;

    const std::vector<std::string> papers = index.papers_of(venue_set, years, full_only);
    std::vector<std::vector<Contribution>> per_paper(papers.size());

#pragma omp parallel for schedule(dynamic, 64)
    for (std::size_t i = 0; i < papers.size(); ++i)
        paper_contributions(index.authorships_of(papers[i]), per_paper[i]);

    // Serial fold in (paper, position, institution) order; per institution the
    // addition order is therefore independent of the parallel schedule.
    for (const auto& contribs : per_paper)
        for (const Contribution& c : contribs)
            table.scores[std::string(c.institution)] += c.weight;

    return table;
}

std::vector<std::pair<std::string, double>> sorted_rows(const ScoreTable& table) {
    std::vector<std::pair<std::string, double>> rows(table.scores.begin(),
                                                     table.scores.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return rows;
}

void write_score_tsv(const ScoreTable& table, std::ostream& out) {
    out << "institution_id\tscore\n";
    for (const auto& [institution, score] : sorted_rows(table))
        out << institution << '\t' << tsv::format_fixed(score, 6) << '\n';
}

}  // namespace instrank::scoring
