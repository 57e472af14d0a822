// Kernel benchmark: times each OpenMP-parallel kernel against its serial
// reference on a synthetic corpus and reports agreement, so speedups never
// come at the cost of different numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"
#include "instrank/features.hpp"
#include "instrank/pca.hpp"
#include "instrank/scoring.hpp"
#include "instrank/simconf.hpp"
#include "instrank/synth.hpp"
#include "support/reference.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(const char* kernel, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-22s %10.1f ms %10.1f ms %8.2fx   max|diff| %.3g\n", kernel,
                serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    int scale = 1;
    if (argc > 1) scale = std::max(1, std::atoi(argv[1]));

    instrank::synth::SynthSpec spec;
    spec.seed = 7;
    spec.institutions = 80 * static_cast<std::size_t>(scale);
    spec.venues = 8;
    spec.authors = 600 * static_cast<std::size_t>(scale);
    spec.years = 10;
    spec.start_year = 2006;
    spec.papers_per_venue_year = 120 * static_cast<std::size_t>(scale);

    auto generated = instrank::synth::generate_synthetic(spec);
    const auto papers = generated.papers;
    const auto authorships = generated.authorships;
    const auto index = instrank::corpus::CorpusIndex::build(
        std::move(generated.papers), std::move(generated.authorships));

#ifdef _OPENMP
    std::printf("corpus: %zu papers, %zu authorships; %d OpenMP threads\n",
                index.paper_count(), index.authorship_count(), omp_get_max_threads());
#else
    std::printf("corpus: %zu papers, %zu authorships; OpenMP disabled\n",
                index.paper_count(), index.authorship_count());
#endif
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const std::string target = spec.target_venue();
    const std::vector<std::string> all_venues = index.venues();
    const instrank::corpus::YearRange full_range{spec.start_year,
                                                 spec.start_year + spec.years - 1};

    {  // institution scoring
        auto t0 = Clock::now();
        const auto oracle = reference::brute_force_institution_scores(
            papers, authorships, all_venues, full_range, false);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        const auto table =
            instrank::scoring::institution_scores(index, all_venues, full_range, false);
        const double parallel_ms = ms_since(t0);

        double max_diff = oracle.size() == table.scores.size() ? 0.0 : INFINITY;
        for (const auto& [inst, score] : oracle) {
            auto it = table.scores.find(inst);
            max_diff = std::max(max_diff, it == table.scores.end()
                                              ? INFINITY
                                              : std::abs(score - it->second));
        }
        report("institution_scores", serial_ms, parallel_ms, max_diff);
    }

    instrank::features::FeatureSpec fspec;
    fspec.target_venue = target;
    fspec.similar_venues = {instrank::synth::SynthSpec::venue_name(1),
                            instrank::synth::SynthSpec::venue_name(2),
                            instrank::synth::SynthSpec::venue_name(3)};
    fspec.target_year = spec.start_year + spec.years - 1;

    instrank::features::FeatureMatrix matrix;
    {  // 144-column feature assembly
        auto t0 = Clock::now();
        const auto by_rows = reference::feature_matrix_by_rows(index, fspec);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        matrix = instrank::features::assemble_matrix(index, fspec);
        const double parallel_ms = ms_since(t0);

        double max_diff =
            by_rows.institutions == matrix.institutions &&
                    by_rows.values.size() == matrix.values.size()
                ? 0.0
                : INFINITY;
        if (max_diff == 0.0)
            for (std::size_t i = 0; i < matrix.values.size(); ++i)
                max_diff =
                    std::max(max_diff, std::abs(by_rows.values[i] - matrix.values[i]));
        report("assemble_matrix", serial_ms, parallel_ms, max_diff);
    }

    {  // cosine similarity ranking
        const auto avm =
            instrank::simconf::build_author_venue_matrix(index, target, spec.start_year);

        auto t0 = Clock::now();
        const auto serial_scores = reference::cosine_scores_serial(avm);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        const auto ranking = instrank::simconf::cosine_similarity_ranking(avm);
        const double parallel_ms = ms_since(t0);

        double max_diff = serial_scores.size() == ranking.ranked.size() ? 0.0 : INFINITY;
        for (const auto& [venue, score] : ranking.ranked) {
            auto it = serial_scores.find(venue);
            max_diff = std::max(max_diff, it == serial_scores.end()
                                              ? INFINITY
                                              : std::abs(score - it->second));
        }
        report("cosine_ranking", serial_ms, parallel_ms, max_diff);
    }

    {  // PCA transform
        instrank::DenseMatrix x(matrix.institutions.size(),
                                instrank::features::kNumColumns);
        x.data = matrix.values;
        const auto model = instrank::pca::fit_pca(x, 0.95);

        auto t0 = Clock::now();
        const auto serial_y = reference::pca_transform_serial(model, x);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        const auto parallel_y = instrank::pca::transform(model, x);
        const double parallel_ms = ms_since(t0);

        double max_diff = serial_y.data.size() == parallel_y.data.size() ? 0.0 : INFINITY;
        if (max_diff == 0.0)
            for (std::size_t i = 0; i < serial_y.data.size(); ++i)
                max_diff = std::max(max_diff,
                                    std::abs(serial_y.data[i] - parallel_y.data[i]));
        report("pca_transform", serial_ms, parallel_ms, max_diff);
    }

    return 0;
}
