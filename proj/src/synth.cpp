#include "instrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "instrank/errors.hpp"
#include "instrank/scoring.hpp"

namespace instrank::synth {

namespace {

double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string padded(const char* prefix, std::size_t i, int width) {
    std::string s = std::to_string(i);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return prefix + s;
}

struct Generator {
    const SynthSpec& spec;
    std::mt19937_64 rng;
    std::vector<std::vector<std::size_t>> venue_pools;  // author indices per venue

    explicit Generator(const SynthSpec& s) : spec(s), rng(s.seed) { build_pools(); }

    std::size_t productive() const { return spec.institutions - spec.idle_institutions; }
    std::size_t institution_of(std::size_t author) const {
        return author % spec.institutions;
    }

    double weight(std::size_t institution, int year_index) const {
        if (institution >= productive()) return 0.0;
        double base = 1.0;
        if (!spec.time_constant && spec.years > 1) {
            const double phase =
                static_cast<double>(year_index) / static_cast<double>(spec.years - 1);
            switch (institution % 3) {
                case 0: base = 1.0; break;            // constant
                case 1: base = 0.5 + phase; break;    // rising
                default: base = 1.5 - phase; break;   // declining
            }
        }
        if (institution < spec.dominant_institutions) base *= spec.dominant_boost;
        return base;
    }

    void build_pools() {
        std::vector<std::size_t> order(spec.authors);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);

        const std::size_t target_size = std::max<std::size_t>(1, (order.size() * 2) / 5);
        std::vector<std::size_t> target(order.begin(), order.begin() + target_size);
        std::vector<std::size_t> rest(order.begin() + target_size, order.end());

        venue_pools.assign(spec.venues, {});
        venue_pools[0] = target;

        // Non-target authors are spread round-robin so other venues stay busy.
        std::vector<std::vector<std::size_t>> fillers(std::max<std::size_t>(spec.venues, 2));
        for (std::size_t i = 0; i < rest.size(); ++i)
            fillers[1 + i % std::max<std::size_t>(spec.venues - 1, 1)].push_back(rest[i]);

        for (std::size_t v = 1; v < spec.venues; ++v) {
            const double overlap = v == 1 ? spec.target_overlap : spec.other_overlap;
            const auto planted =
                static_cast<std::size_t>(std::floor(overlap * static_cast<double>(target_size)));
            const std::size_t offset = v == 1 ? 0 : (v * 7) % std::max<std::size_t>(target_size, 1);
            for (std::size_t i = 0; i < planted; ++i)
                venue_pools[v].push_back(target[(offset + i) % target_size]);
            for (std::size_t a : fillers[v]) venue_pools[v].push_back(a);
            std::sort(venue_pools[v].begin(), venue_pools[v].end());
            venue_pools[v].erase(
                std::unique(venue_pools[v].begin(), venue_pools[v].end()),
                venue_pools[v].end());
        }
    }

    std::vector<std::size_t> sample_team(const std::vector<std::size_t>& pool,
                                         int year_index) {
        std::vector<std::pair<std::size_t, double>> candidates;
        candidates.reserve(pool.size());
        double total = 0.0;
        for (std::size_t a : pool) {
            const double w = weight(institution_of(a), year_index);
            if (w > 0.0) {
                candidates.emplace_back(a, w);
                total += w;
            }
        }
        std::vector<std::size_t> team;
        if (candidates.empty()) return team;

        const std::size_t size = std::min<std::size_t>(
            1 + rng() % spec.max_authors_per_paper, candidates.size());
        for (std::size_t pick = 0; pick < size; ++pick) {
            double r = next_unit(rng) * total;
            std::size_t chosen = candidates.size() - 1;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                r -= candidates[i].second;
                if (r <= 0.0) {
                    chosen = i;
                    break;
                }
            }
            team.push_back(candidates[chosen].first);
            total -= candidates[chosen].second;
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(chosen));
        }
        return team;
    }

    struct PaperTemplate {
        std::vector<std::size_t> team;
        bool full = false;
        // Per member: 0 = unknown affiliation, 1 = home only, 2 = home + next.
        std::vector<int> affiliation_kind;
    };

    PaperTemplate make_template(const std::vector<std::size_t>& pool, int year_index) {
        PaperTemplate t;
        t.team = sample_team(pool, year_index);
        if (t.team.empty()) return t;
        t.full = next_unit(rng) < spec.full_paper_prob;
        t.affiliation_kind.reserve(t.team.size());
        for (std::size_t i = 0; i < t.team.size(); ++i) {
            const double u = next_unit(rng);
            if (u < spec.unknown_affiliation_prob)
                t.affiliation_kind.push_back(0);
            else if (u < spec.unknown_affiliation_prob + spec.second_affiliation_prob &&
                     productive() > 1)
                t.affiliation_kind.push_back(2);
            else
                t.affiliation_kind.push_back(1);
        }
        return t;
    }

    void emit(SynthCorpus& out, const PaperTemplate& t, const std::string& venue,
              int year, const std::string& paper_id) {
        if (t.team.empty()) return;
        out.papers.push_back({paper_id, venue, year, t.full});
        for (std::size_t m = 0; m < t.team.size(); ++m) {
            const std::size_t author = t.team[m];
            const std::string author_id = SynthSpec::author_name(author);
            const int position = static_cast<int>(m) + 1;
            const std::size_t home = institution_of(author);
            switch (t.affiliation_kind[m]) {
                case 0:
                    out.authorships.push_back({paper_id, author_id, position, ""});
                    break;
                case 2:
                    out.authorships.push_back(
                        {paper_id, author_id, position,
                         SynthSpec::institution_name(home)});
                    out.authorships.push_back(
                        {paper_id, author_id, position,
                         SynthSpec::institution_name((home + 1) % productive())});
                    break;
                default:
                    out.authorships.push_back(
                        {paper_id, author_id, position,
                         SynthSpec::institution_name(home)});
                    break;
            }
        }
    }

    SynthCorpus run() {
        SynthCorpus out;
        for (std::size_t v = 0; v < spec.venues; ++v) {
            const std::string venue = SynthSpec::venue_name(v);
            if (spec.time_constant) {
                for (std::size_t slot = 0; slot < spec.papers_per_venue_year; ++slot) {
                    const PaperTemplate t = make_template(venue_pools[v], 0);
                    for (int yi = 0; yi < spec.years; ++yi)
                        emit(out, t, venue, spec.start_year + yi,
                             "P_" + venue + "_" + std::to_string(spec.start_year + yi) +
                                 "_" + padded("", slot, 4));
                }
            } else {
                for (int yi = 0; yi < spec.years; ++yi)
                    for (std::size_t slot = 0; slot < spec.papers_per_venue_year; ++slot) {
                        const PaperTemplate t = make_template(venue_pools[v], yi);
                        emit(out, t, venue, spec.start_year + yi,
                             "P_" + venue + "_" +
                                 std::to_string(spec.start_year + yi) + "_" +
                                 padded("", slot, 4));
                    }
            }
        }
        return out;
    }
};

}  // namespace

std::string SynthSpec::institution_name(std::size_t i) { return padded("I", i, 3); }
std::string SynthSpec::author_name(std::size_t i) { return padded("A", i, 5); }

void SynthSpec::validate() const {
    if (institutions < 1 || venues < 1 || authors < 1 || years < 1 ||
        papers_per_venue_year < 1 || max_authors_per_paper < 1)
        throw ArgumentError("synth spec: all counts must be >= 1");
    if (target_overlap < 0.0 || target_overlap > 1.0 || other_overlap < 0.0 ||
        other_overlap > 1.0)
        throw ArgumentError("synth spec: overlaps must lie in [0, 1]");
    if (idle_institutions + dominant_institutions > institutions)
        throw ArgumentError("synth spec: idle + dominant exceeds institution count");
    if (idle_institutions >= institutions)
        throw ArgumentError("synth spec: at least one productive institution required");
    if (full_paper_prob < 0.0 || full_paper_prob > 1.0 ||
        second_affiliation_prob < 0.0 || second_affiliation_prob > 1.0 ||
        unknown_affiliation_prob < 0.0 || unknown_affiliation_prob > 1.0)
        throw ArgumentError("synth spec: probabilities must lie in [0, 1]");
    if (unknown_affiliation_prob + second_affiliation_prob > 1.0)
        throw ArgumentError("synth spec: affiliation probabilities exceed 1");
    if (dominant_boost <= 0.0)
        throw ArgumentError("synth spec: dominant boost must be > 0");
}

SynthCorpus generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Generator gen(spec);
    return gen.run();
}

void write_synthetic(const SynthSpec& spec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());

    SynthCorpus corpus = generate_synthetic(spec);
    auto index = corpus::CorpusIndex::build(std::move(corpus.papers),
                                            std::move(corpus.authorships));

    auto open = [&](const std::string& name) {
        std::ofstream out(out_dir + "/" + name, std::ios::binary);
        if (!out) throw IoError("cannot open '" + out_dir + "/" + name + "' for writing");
        return out;
    };

    {
        auto out = open("papers.tsv");
        index.write_papers_tsv(out);
    }
    {
        auto out = open("authorships.tsv");
        index.write_authorships_tsv(out);
    }
    for (int yi = 0; yi < spec.years; ++yi) {
        const int year = spec.start_year + yi;
        const auto table = scoring::institution_scores(
            index, {spec.target_venue()}, {year, year}, true);
        auto out = open("truth_" + std::to_string(year) + ".tsv");
        scoring::write_score_tsv(table, out);
    }
}

}  // namespace instrank::synth
