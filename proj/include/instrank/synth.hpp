#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"

namespace instrank::synth {

// Seeded synthetic corpus for desk-scale runs. Venue V0 is the target;
// V1 is planted to share target_overlap of the target's authors, every other
// venue shares at most other_overlap. Institution productivity follows a
// cyclic constant/rising/declining trend unless time_constant is set, in
// which case one year template is replicated verbatim across all years.
struct SynthSpec {
    std::uint64_t seed = 1;
    std::size_t institutions = 50;
    std::size_t venues = 6;
    std::size_t authors = 400;
    int years = 8;
    int start_year = 2008;
    std::size_t papers_per_venue_year = 40;
    std::size_t max_authors_per_paper = 4;
    double target_overlap = 0.8;
    double other_overlap = 0.15;
    std::size_t idle_institutions = 0;  // trailing institutions, zero productivity
    std::size_t dominant_institutions = 0;  // leading institutions, boosted weight
    double dominant_boost = 20.0;
    bool time_constant = false;
    double full_paper_prob = 0.7;
    double second_affiliation_prob = 0.05;
    double unknown_affiliation_prob = 0.05;

    std::string target_venue() const { return venue_name(0); }
    static std::string venue_name(std::size_t i) { return "V" + std::to_string(i); }
    static std::string institution_name(std::size_t i);
    static std::string author_name(std::size_t i);

    void validate() const;
};

struct SynthCorpus {
    std::vector<corpus::PaperRecord> papers;
    std::vector<corpus::AuthorshipRecord> authorships;
};

SynthCorpus generate_synthetic(const SynthSpec& spec);

// papers.tsv, authorships.tsv, and per-year truth_<year>.tsv (full-paper
// institution scores of the target venue, computed by the scoring module).
void write_synthetic(const SynthSpec& spec, const std::string& out_dir);

}  // namespace instrank::synth
