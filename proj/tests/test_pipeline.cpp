#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "instrank/errors.hpp"
#include "instrank/pipeline.hpp"
#include "instrank/rankers.hpp"
#include "instrank/scoring.hpp"
#include "instrank/synth.hpp"
#include "support/testutil.hpp"

using namespace instrank;
using namespace instrank::pipeline;

namespace {

namespace fs = std::filesystem;

synth::SynthSpec small_spec(std::uint64_t seed = 1) {
    synth::SynthSpec spec;
    spec.seed = seed;
    spec.institutions = 40;
    spec.venues = 6;
    spec.authors = 300;
    spec.years = 8;
    spec.start_year = 2008;
    spec.papers_per_venue_year = 25;
    return spec;
}

corpus::CorpusIndex index_of(const synth::SynthSpec& spec) {
    auto generated = synth::generate_synthetic(spec);
    return corpus::CorpusIndex::build(std::move(generated.papers),
                                      std::move(generated.authorships));
}

RunConfig config_for(const std::string& out_dir) {
    RunConfig config;
    config.target_venue = "V0";
    config.train_year = 2013;
    config.validation_year = 2014;
    config.prediction_year = 2015;
    config.seed = 17;
    config.seed_explicit = true;
    config.out_dir = out_dir;
    return config;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    return testutil::slurp(a) == testutil::slurp(b);
}

}  // namespace

TEST_CASE("config files parse and flags override them") {
    const auto dir = testutil::fresh_dir("pipeline_config");
    const auto path = (dir / "run.conf").string();
    std::ofstream(path) << "target = KDD\n"
                        << "train_year = 2013   # comment\n"
                        << "validation_year = 2014\n"
                        << "prediction_year = 2015\n"
                        << "pca_tau = 0.9\n"
                        << "seed = 5\n"
                        << "\n# full-line comment\n";
    auto config = load_config_file(path);
    CHECK(config.target_venue == "KDD");
    CHECK(config.train_year == 2013);
    CHECK(config.pca_tau == doctest::Approx(0.9));
    CHECK(config.seed == 5);
    CHECK(config.seed_explicit);

    apply_config_entry(config, "target", "ICML");
    CHECK(config.target_venue == "ICML");

    CHECK_THROWS_AS(apply_config_entry(config, "nonsense", "1"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(config, "similar", "A,B"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(config, "train_year", "abc"), ConfigError);
}

TEST_CASE("config validation enforces year ordering and history depth") {
    const auto index = index_of(small_spec());
    auto config = config_for(".");

    SUBCASE("valid config passes") { validate_config(config, index); }
    SUBCASE("wrong order") {
        config.validation_year = 2012;
        CHECK_THROWS_AS(validate_config(config, index), ConfigError);
    }
    SUBCASE("train year at the first corpus year") {
        config.train_year = 2008;
        config.validation_year = 2009;
        config.prediction_year = 2010;
        CHECK_THROWS_AS(validate_config(config, index), ConfigError);
    }
    SUBCASE("unknown target venue") {
        config.target_venue = "NOPE";
        CHECK_THROWS_AS(validate_config(config, index), ConfigError);
    }
}

TEST_CASE("synthetic corpora are byte-identical across runs of one seed") {
    const auto dir_a = testutil::fresh_dir("synth_a");
    const auto dir_b = testutil::fresh_dir("synth_b");
    const auto spec = small_spec(7);
    synth::write_synthetic(spec, dir_a.string());
    synth::write_synthetic(spec, dir_b.string());
    for (const char* name : {"papers.tsv", "authorships.tsv", "truth_2008.tsv",
                             "truth_2012.tsv", "truth_2015.tsv"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir_a / name));
        CHECK(same_bytes(dir_a / name, dir_b / name));
    }
}

TEST_CASE("zero-productivity institutions never appear in truth files") {
    auto spec = small_spec(3);
    spec.idle_institutions = 4;  // I036..I039
    const auto index = index_of(spec);
    for (int year = 2008; year <= 2015; ++year) {
        const auto table =
            scoring::institution_scores(index, {"V0"}, {year, year}, true);
        for (std::size_t i = spec.institutions - spec.idle_institutions;
             i < spec.institutions; ++i)
            CHECK(table.scores.count(synth::SynthSpec::institution_name(i)) == 0);
    }
}

TEST_CASE("training produces artifacts and recovers the planted similar venue") {
    const auto dir = testutil::fresh_dir("train_smoke");
    const auto index = index_of(small_spec());
    const auto config = config_for(dir.string());

    const auto artifacts = run_training(config, index);
    CHECK(artifacts.similar.size() == 3);
    CHECK(artifacts.similar[0] == "V1");
    CHECK(artifacts.pca_model.k <= 144);
    CHECK(artifacts.pca_model.k >= 1);

    for (const char* name : {"similar.tsv", "pca.tsv", "linear.tsv", "svr.tsv",
                             "ranksvm.tsv", "baseline.tsv"})
        CHECK(fs::exists(dir / "V0" / name));

    SUBCASE("loading round trips") {
        const auto loaded = load_artifacts(config);
        CHECK(loaded.similar == artifacts.similar);
        CHECK(loaded.pca_model.k == artifacts.pca_model.k);
        CHECK(loaded.baseline.window == artifacts.baseline.window);
    }
}

TEST_CASE("training twice with one seed writes byte-identical artifacts") {
    const auto dir_a = testutil::fresh_dir("train_det_a");
    const auto dir_b = testutil::fresh_dir("train_det_b");
    const auto index = index_of(small_spec(11));
    run_training(config_for(dir_a.string()), index);
    run_training(config_for(dir_b.string()), index);
    for (const char* name : {"similar.tsv", "pca.tsv", "linear.tsv", "svr.tsv",
                             "ranksvm.tsv", "baseline.tsv"}) {
        CAPTURE(name);
        CHECK(same_bytes(dir_a / "V0" / name, dir_b / "V0" / name));
    }
}

TEST_CASE("validation requires trained artifacts") {
    const auto dir = testutil::fresh_dir("not_trained");
    const auto index = index_of(small_spec());
    CHECK_THROWS_WITH_AS(run_validation(config_for(dir.string()), index),
                         doctest::Contains("not trained"), ValidationError);
}

TEST_CASE("validation reports NDCG in [0,1] and persists member scores") {
    const auto dir = testutil::fresh_dir("validate");
    const auto index = index_of(small_spec(5));
    const auto config = config_for(dir.string());
    run_training(config, index);
    const auto report = run_validation(config, index);

    for (double v : {report.baseline, report.regression, report.ranksvm,
                     report.ensemble}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // The persisted ensemble is exactly the mean of the persisted members.
    auto read_scores = [&](const char* name) {
        std::ifstream in(dir / "V0" / name);
        REQUIRE(in);
        return rankers::read_scores_tsv(in);
    };
    const auto baseline = read_scores("scores_baseline.tsv");
    const auto regression = read_scores("scores_regression.tsv");
    const auto ranksvm = read_scores("scores_ranksvm.tsv");
    const auto blended = read_scores("scores_ensemble.tsv");
    const auto recomputed = rankers::ensemble({baseline, regression, ranksvm});
    REQUIRE(recomputed.scores.size() == blended.scores.size());
    for (const auto& [inst, v] : blended.scores)
        CHECK(std::abs(recomputed.scores.at(inst) - v) < 1e-9);

    CHECK(fs::exists(dir / "V0" / "validation_report.tsv"));
}

TEST_CASE("a time-constant corpus gives the baseline a perfect NDCG") {
    const auto dir = testutil::fresh_dir("time_constant");
    auto spec = small_spec(19);
    spec.time_constant = true;
    const auto index = index_of(spec);
    const auto config = config_for(dir.string());
    run_training(config, index);
    const auto report = run_validation(config, index);
    CHECK(std::abs(report.baseline - 1.0) <= 1e-9);
}

TEST_CASE("prediction writes consecutive ranks with non-increasing scores") {
    const auto dir = testutil::fresh_dir("predict");
    const auto index = index_of(small_spec(23));
    const auto config = config_for(dir.string());
    run_training(config, index);
    const auto rows = run_prediction(config, index);
    REQUIRE_FALSE(rows.empty());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].rank == static_cast<int>(i) + 1);
        if (i > 0) CHECK(rows[i].score <= rows[i - 1].score);
    }
    CHECK(fs::exists(dir / "V0" / "prediction.tsv"));
}

TEST_CASE("prediction reruns are byte-identical") {
    const auto dir_a = testutil::fresh_dir("predict_det_a");
    const auto dir_b = testutil::fresh_dir("predict_det_b");
    const auto index = index_of(small_spec(29));
    const auto config_a = config_for(dir_a.string());
    const auto config_b = config_for(dir_b.string());
    run_training(config_a, index);
    run_training(config_b, index);
    run_prediction(config_a, index);
    run_prediction(config_b, index);
    CHECK(same_bytes(dir_a / "V0" / "prediction.tsv", dir_b / "V0" / "prediction.tsv"));
}

TEST_CASE("a dominant institution is ranked first") {
    const auto dir = testutil::fresh_dir("dominant");
    auto spec = small_spec(31);
    spec.dominant_institutions = 1;
    spec.dominant_boost = 20.0;
    const auto index = index_of(spec);
    const auto config = config_for(dir.string());
    run_training(config, index);
    const auto rows = run_prediction(config, index);
    REQUIRE_FALSE(rows.empty());
    CHECK(rows[0].institution == synth::SynthSpec::institution_name(0));
}

TEST_CASE("feature windows never touch the target year") {
    const auto dir = testutil::fresh_dir("leakage");
    const auto index = index_of(small_spec(37));
    const auto config = config_for(dir.string());

    struct Query {
        std::vector<std::string> venues;
        corpus::YearRange years;
        bool full_only;
    };
    std::vector<Query> queries;
    index.set_query_observer(
        [&queries](const std::vector<std::string>& venues, corpus::YearRange range,
                   bool full_only) { queries.push_back({venues, range, full_only}); });

    run_training(config, index);
    for (const auto& q : queries) {
        if (q.years.hi >= config.train_year) {
            // The only query allowed at or beyond the target year is the
            // ground-truth label scope itself.
            CHECK(q.venues == std::vector<std::string>{"V0"});
            CHECK(q.years.lo == config.train_year);
            CHECK(q.years.hi == config.train_year);
            CHECK(q.full_only);
        }
    }

    queries.clear();
    run_validation(config, index);
    for (const auto& q : queries) {
        if (q.years.hi >= config.validation_year) {
            CHECK(q.years.lo == config.validation_year);
            CHECK(q.years.hi == config.validation_year);
            CHECK(q.full_only);
        }
    }

    queries.clear();
    run_prediction(config, index);
    for (const auto& q : queries) CHECK(q.years.hi < config.prediction_year);
    index.set_query_observer(nullptr);
}

TEST_CASE("similar override skips discovery") {
    const auto dir = testutil::fresh_dir("override");
    const auto index = index_of(small_spec(41));
    auto config = config_for(dir.string());
    config.similar_override = {"V2", "V3", "V4"};
    const auto artifacts = run_training(config, index);
    CHECK(artifacts.similar == std::vector<std::string>{"V2", "V3", "V4"});
}

TEST_CASE("corpus loads from TSV files or from the index cache") {
    const auto dir = testutil::fresh_dir("load_paths");
    const auto spec = small_spec(43);
    synth::write_synthetic(spec, dir.string());

    RunConfig config;
    config.papers_path = (dir / "papers.tsv").string();
    config.authorships_path = (dir / "authorships.tsv").string();
    const auto from_tsv = load_corpus(config);
    CHECK(from_tsv.paper_count() > 0);

    const auto cache = (dir / "corpus.idx").string();
    from_tsv.save_cache(cache);
    RunConfig cached;
    cached.index_cache_path = cache;
    const auto from_cache = load_corpus(cached);
    CHECK(from_cache.paper_count() == from_tsv.paper_count());
    CHECK(from_cache.authorship_count() == from_tsv.authorship_count());

    RunConfig empty;
    CHECK_THROWS_AS(load_corpus(empty), ConfigError);
}
