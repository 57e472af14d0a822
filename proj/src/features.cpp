#include "instrank/features.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "instrank/errors.hpp"
#include "instrank/scoring.hpp"
#include "instrank/tsv.hpp"

namespace instrank::features {

namespace {

corpus::YearRange window_range(int target_year, std::size_t window) {
    switch (window) {
        case 0: return {target_year - 1, target_year - 1};
        case 1: return {target_year - 2, target_year - 2};
        case 2: return {target_year - 3, target_year - 3};
        default: return {target_year - 3, target_year - 1};
    }
}

// Scope-major accumulator: one pass over the scope's papers fills every
// institution's six statistics at once.
struct Accum {
    std::int64_t n_paper = 0;
    std::set<std::string> authors;
    std::int64_t n_author_paper = 0;
    std::int64_t n_first_author = 0;
    std::int64_t n_second_author = 0;
    double score = 0.0;
};

std::map<std::string, Accum> scope_pass(const corpus::CorpusIndex& index,
                                        const FeatureSpec::Scope& scope) {
    std::map<std::string, Accum> acc;
    const auto papers = index.papers_of(scope.venues, scope.years, scope.full_only);

    // Per-paper scratch, keyed by institution.
    struct PaperStats {
        bool first = false;
        bool second = false;
        std::int64_t author_pairs = 0;
        std::vector<std::string_view> authors;
    };
    std::map<std::string_view, PaperStats> paper_stats;

    for (const std::string& paper : papers) {
        const auto auths = index.authorships_of(paper);
        if (auths.empty()) continue;
        paper_stats.clear();

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
            const double w =
                known > 0 ? 1.0 / (static_cast<double>(n_authors) *
                                   static_cast<double>(known))
                          : 0.0;
            for (std::size_t k = i; k < j; ++k) {
                const corpus::AuthorshipRecord& a = auths[k];
                if (a.institution_id.empty()) continue;
                PaperStats& ps = paper_stats[a.institution_id];
                ps.authors.push_back(a.author_id);
                ++ps.author_pairs;  // one distinct (author, paper) pair at this institution
                if (a.position == 1) ps.first = true;
                if (a.position == 2) ps.second = true;
                // Same (paper, position, institution) addition order as the
                // scoring module, so score columns are bit-identical to it.
                acc[a.institution_id].score += w;
            }
            i = j;
        }

        for (auto& [inst, ps] : paper_stats) {
            Accum& a = acc[std::string(inst)];
            a.n_paper += 1;
            for (std::string_view author : ps.authors) a.authors.insert(std::string(author));
            a.n_author_paper += ps.author_pairs;
            if (ps.first) a.n_first_author += 1;
            if (ps.second) a.n_second_author += 1;
        }
    }
    return acc;
}

}  // namespace

FeatureSpec::Scope FeatureSpec::scope(std::size_t setting, std::size_t window) const {
    Scope s;
    s.years = window_range(target_year, window);
    switch (setting) {
        case 0:
            s.venues = {target_venue};
            s.full_only = true;
            break;
        case 1:
            s.venues = {target_venue};
            break;
        case 2:
        case 3:
        case 4:
            s.venues = {similar_venues[setting - 2]};
            break;
        default: {
            std::set<std::string> u{target_venue, similar_venues[0], similar_venues[1],
                                    similar_venues[2]};
            s.venues.assign(u.begin(), u.end());
            break;
        }
    }
    return s;
}

std::vector<std::string> FeatureSpec::column_names() {
    std::vector<std::string> names;
    names.reserve(kNumColumns);
    for (std::size_t s = 0; s < kNumSettings; ++s)
        for (std::size_t w = 0; w < kNumWindows; ++w)
            for (std::size_t f = 0; f < kNumFeatures; ++f)
                names.push_back(std::to_string(s + 1) + "." + std::to_string(w + 1) +
                                "." + kFeatureNames[f]);
    return names;
}

std::size_t FeatureSpec::column_index(std::size_t setting, std::size_t window,
                                      std::size_t feature) {
    return (setting * kNumWindows + window) * kNumFeatures + feature;
}

BasicFeatures basic_features(const corpus::CorpusIndex& index,
                             const std::string& institution,
                             const std::vector<std::string>& venue_set,
                             corpus::YearRange years, bool full_only) {
    BasicFeatures bf;
    if (years.empty()) return bf;

    const auto papers = index.papers_of(venue_set, years, full_only);
    std::set<std::string> authors;
    for (const std::string& paper : papers) {
        const auto auths = index.authorships_of(paper);
        bool present = false, first = false, second = false;
        std::int64_t pairs = 0;
        for (const corpus::AuthorshipRecord& a : auths) {
            if (a.institution_id != institution || institution.empty()) continue;
            present = true;
            authors.insert(a.author_id);
            ++pairs;
            if (a.position == 1) first = true;
            if (a.position == 2) second = true;
        }
        if (present) {
            bf.n_paper += 1;
            bf.n_author_paper += pairs;
            if (first) bf.n_first_author += 1;
            if (second) bf.n_second_author += 1;
        }
    }
    bf.n_author = static_cast<std::int64_t>(authors.size());

    const auto table = scoring::institution_scores(index, venue_set, years, full_only);
    auto it = table.scores.find(institution);
    bf.score = it == table.scores.end() ? 0.0 : it->second;
    return bf;
}

FeatureMatrix assemble_matrix(const corpus::CorpusIndex& index, const FeatureSpec& spec,
                              const std::vector<std::string>& extra_institutions) {
    FeatureMatrix m;
    m.spec = spec;
    for (const std::string& v : spec.similar_venues)
        if (v.empty())
            throw ArgumentError("feature spec requires exactly 3 similar venues");

    if (index.has_papers() && spec.target_year - 3 < index.min_year())
        m.warnings.push_back("window start " + std::to_string(spec.target_year - 3) +
                             " predates the corpus (first year " +
                             std::to_string(index.min_year()) +
                             "); early windows are zero-filled");
    if (!index.has_papers())
        m.warnings.push_back("corpus is empty; all feature windows are zero-filled");

    constexpr std::size_t n_scopes = kNumSettings * kNumWindows;
    std::array<std::map<std::string, Accum>, n_scopes> per_scope;

#pragma omp parallel for schedule(dynamic)
    for (std::size_t q = 0; q < n_scopes; ++q) {
        const std::size_t s = q / kNumWindows;
        const std::size_t w = q % kNumWindows;
        per_scope[q] = scope_pass(index, spec.scope(s, w));
    }

    std::set<std::string> insts(extra_institutions.begin(), extra_institutions.end());
    insts.erase("");
    for (const auto& acc : per_scope)
        for (const auto& [inst, _] : acc) insts.insert(inst);
    m.institutions.assign(insts.begin(), insts.end());

    m.values.assign(m.institutions.size() * kNumColumns, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < m.institutions.size(); ++r) {
        const std::string& inst = m.institutions[r];
        for (std::size_t q = 0; q < n_scopes; ++q) {
            auto it = per_scope[q].find(inst);
            if (it == per_scope[q].end()) continue;
            const Accum& a = it->second;
            double* cell = m.values.data() + r * kNumColumns + q * kNumFeatures;
            cell[0] = static_cast<double>(a.n_paper);
            cell[1] = static_cast<double>(a.authors.size());
            cell[2] = static_cast<double>(a.n_author_paper);
            cell[3] = static_cast<double>(a.n_first_author);
            cell[4] = static_cast<double>(a.n_second_author);
            cell[5] = a.score;
        }
    }
    return m;
}

LabelVector target_scores(const corpus::CorpusIndex& index, const std::string& venue,
                          int year) {
    LabelVector lv;
    lv.target_venue = venue;
    lv.target_year = year;
    lv.labels = scoring::institution_scores(index, {venue}, {year, year}, true).scores;
    return lv;
}

void write_feature_tsv(const FeatureMatrix& matrix, std::ostream& out) {
    out << "institution_id";
    for (const std::string& name : FeatureSpec::column_names()) out << '\t' << name;
    out << '\n';
    for (std::size_t r = 0; r < matrix.institutions.size(); ++r) {
        out << matrix.institutions[r];
        for (double v : matrix.row(r)) out << '\t' << tsv::format_fixed(v, 6);
        out << '\n';
    }
}

}  // namespace instrank::features
