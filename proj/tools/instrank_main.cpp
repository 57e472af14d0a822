// Command-line front end: ingest, score, similar, features, train, validate,
// predict, evaluate, synth. Exit codes: 0 success, 1 validation/config
// errors, 2 I/O or parse errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"
#include "instrank/errors.hpp"
#include "instrank/evaluation.hpp"
#include "instrank/features.hpp"
#include "instrank/pipeline.hpp"
#include "instrank/scoring.hpp"
#include "instrank/simconf.hpp"
#include "instrank/synth.hpp"
#include "instrank/tsv.hpp"

namespace {

using namespace instrank;

struct CorpusArgs {
    std::string papers;
    std::string authorships;
    std::string index_cache;

    void attach(CLI::App* cmd) {
        cmd->add_option("--papers", papers, "papers.tsv path");
        cmd->add_option("--authorships", authorships, "authorships.tsv path");
        cmd->add_option("--index", index_cache, "serialized index cache path");
    }

    corpus::CorpusIndex load() const {
        pipeline::RunConfig cfg;
        cfg.papers_path = papers;
        cfg.authorships_path = authorships;
        cfg.index_cache_path = index_cache;
        return pipeline::load_corpus(cfg);
    }
};

// Every pipeline option arrives as a (key, value) assignment applied on top
// of the config file, so flags override file entries.
struct PipelineArgs {
    CorpusArgs corpus_args;
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> assignments;

    void attach(CLI::App* cmd) {
        corpus_args.attach(cmd);
        cmd->add_option("--config", config_path, "key = value config file");

        auto bind = [this, cmd](const std::string& flag, const std::string& key,
                                const std::string& help) {
            cmd->add_option_function<std::string>(
                flag,
                [this, key](const std::string& v) { assignments.emplace_back(key, v); },
                help);
        };
        bind("--target", "target", "target conference id");
        bind("--similar", "similar", "similar-conference override, 3 comma-separated ids");
        bind("--train-year", "train_year", "training target year");
        bind("--validation-year", "validation_year", "validation target year");
        bind("--prediction-year", "prediction_year", "prediction target year");
        bind("--model", "model", "baseline|regression|ranksvm|ensemble");
        bind("--pca-tau", "pca_tau", "explained-variance threshold");
        bind("--pca-fixed-k", "pca_fixed_k", "fixed PCA dimension override");
        bind("--baseline-window", "baseline_window", "baseline history window");
        bind("--similar-method", "similar_method", "cosine|colsum");
        bind("--similar-since", "similar_since", "similarity cutoff year");
        bind("--learning-rate", "learning_rate", "SGD learning rate");
        bind("--epochs", "epochs", "SGD epochs");
        bind("--tolerance", "tolerance", "SGD early-stop tolerance");
        bind("--svr-epsilon", "svr_epsilon", "SVR tube half-width");
        bind("--svr-c", "svr_c", "SVR trade-off");
        bind("--ranksvm-lambda", "ranksvm_lambda", "Ranking SVM regularization");
        bind("--max-pairs", "max_pairs", "ranking pair cap");
        bind("--min-score-gap", "min_score_gap", "minimum score gap for pairs");
        bind("--seed", "seed", "RNG seed (required for train/predict)");
        bind("--out", "out", "output directory");
    }

    // Precedence: config file, then global flags, then subcommand flags.
    pipeline::RunConfig materialize(bool require_seed, const std::string& global_config,
                                    const std::string& global_seed,
                                    const std::string& global_out) const {
        pipeline::RunConfig config;
        const std::string& file = config_path.empty() ? global_config : config_path;
        if (!file.empty()) config = pipeline::load_config_file(file);
        if (!global_seed.empty()) pipeline::apply_config_entry(config, "seed", global_seed);
        if (!global_out.empty()) pipeline::apply_config_entry(config, "out", global_out);
        if (!corpus_args.papers.empty()) config.papers_path = corpus_args.papers;
        if (!corpus_args.authorships.empty())
            config.authorships_path = corpus_args.authorships;
        if (!corpus_args.index_cache.empty())
            config.index_cache_path = corpus_args.index_cache;
        for (const auto& [key, value] : assignments)
            pipeline::apply_config_entry(config, key, value);
        if (require_seed && !config.seed_explicit)
            throw ConfigError("a seed is required: pass --seed or set it in the config");
        return config;
    }
};

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    return file;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        if (comma == std::string::npos) comma = s.size();
        auto item = s.substr(start, comma - start);
        if (!item.empty()) out.push_back(item);
        start = comma + 1;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Institution paper-acceptance rank prediction pipeline"};
    app.require_subcommand(1);

    std::string global_config, global_seed, global_out;
    app.add_option("--config", global_config, "key = value config file");
    app.add_option("--seed", global_seed, "RNG seed");
    app.add_option("--out", global_out, "output directory");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse, validate, and index a corpus");
    CorpusArgs ingest_corpus;
    ingest_corpus.attach(ingest);
    std::string ingest_cache_out;
    ingest->add_option("--write-cache", ingest_cache_out, "write index cache here");

    // score
    auto* score = app.add_subcommand("score", "institution ranking scores for a scope");
    CorpusArgs score_corpus;
    score_corpus.attach(score);
    std::string score_venues, score_output;
    int score_from = 0, score_to = 0;
    bool score_full_only = false;
    score->add_option("--venues", score_venues, "comma-separated venue ids")->required();
    score->add_option("--from", score_from, "first year, inclusive")->required();
    score->add_option("--to", score_to, "last year, inclusive")->required();
    score->add_flag("--full-only", score_full_only, "full papers only");
    score->add_option("--output", score_output, "output file (default stdout)");

    // similar
    auto* similar = app.add_subcommand("similar", "most similar conferences");
    CorpusArgs similar_corpus;
    similar_corpus.attach(similar);
    std::string similar_conference, similar_method = "cosine", similar_output;
    int similar_top = 3, similar_since = 2010;
    similar->add_option("--conference", similar_conference, "target conference")
        ->required();
    similar->add_option("--top", similar_top, "how many venues to report");
    similar->add_option("--method", similar_method, "cosine|colsum");
    similar->add_option("--since", similar_since, "cutoff year");
    similar->add_option("--output", similar_output, "output file (default stdout)");

    // features
    auto* feats = app.add_subcommand("features", "144-column feature matrix");
    CorpusArgs feats_corpus;
    feats_corpus.attach(feats);
    std::string feats_conference, feats_similar, feats_method = "cosine", feats_output;
    int feats_year = 0, feats_since = 2010;
    feats->add_option("--conference", feats_conference, "target conference")->required();
    feats->add_option("--year", feats_year, "target year")->required();
    feats->add_option("--similar", feats_similar,
                      "3 comma-separated similar venues (default: discovered)");
    feats->add_option("--method", feats_method, "cosine|colsum for discovery");
    feats->add_option("--since", feats_since, "discovery cutoff year");
    feats->add_option("--output", feats_output, "output file (default stdout)");

    // train / validate / predict
    auto* train = app.add_subcommand("train", "fit and persist per-conference models");
    PipelineArgs train_args;
    train_args.attach(train);
    auto* validate = app.add_subcommand("validate", "NDCG@20 report per model");
    PipelineArgs validate_args;
    validate_args.attach(validate);
    auto* predict = app.add_subcommand("predict", "final prediction-year ranking");
    PipelineArgs predict_args;
    predict_args.attach(predict);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "NDCG of a ranking vs truth");
    std::string eval_pred, eval_truth;
    int eval_n = 20;
    evaluate->add_option("--pred", eval_pred, "ranking.tsv (rank\\tinstitution_id)")
        ->required();
    evaluate->add_option("--truth", eval_truth, "truth.tsv (institution_id\\tscore)")
        ->required();
    evaluate->add_option("--ndcg", eval_n, "cutoff n");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    synth::SynthSpec synth_spec;
    std::string synth_out = "synth";
    long long synth_seed = 1;
    auto* synth_seed_opt = synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--institutions", synth_spec.institutions, "institution count");
    synth_cmd->add_option("--venues", synth_spec.venues, "venue count");
    synth_cmd->add_option("--authors", synth_spec.authors, "author count");
    synth_cmd->add_option("--years", synth_spec.years, "number of years");
    synth_cmd->add_option("--start-year", synth_spec.start_year, "first year");
    synth_cmd->add_option("--papers-per-venue-year", synth_spec.papers_per_venue_year,
                          "papers per venue per year");
    synth_cmd->add_option("--target-overlap", synth_spec.target_overlap,
                          "author overlap planted for venue V1");
    synth_cmd->add_option("--other-overlap", synth_spec.other_overlap,
                          "author overlap cap for other venues");
    synth_cmd->add_option("--idle-institutions", synth_spec.idle_institutions,
                          "trailing institutions with zero productivity");
    synth_cmd->add_option("--dominant-institutions", synth_spec.dominant_institutions,
                          "leading institutions with boosted productivity");
    synth_cmd->add_option("--dominant-boost", synth_spec.dominant_boost,
                          "weight multiplier for dominant institutions");
    synth_cmd->add_flag("--time-constant", synth_spec.time_constant,
                        "replicate one year template across all years");
    auto* synth_out_opt = synth_cmd->add_option("--out", synth_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (ingest->parsed()) {
        auto index = ingest_corpus.load();
        if (!ingest_cache_out.empty()) index.save_cache(ingest_cache_out);
        std::cout << "papers\tauthorships\tvenues\tinstitutions\tmin_year\tmax_year\n";
        std::cout << index.paper_count() << '\t' << index.authorship_count() << '\t'
                  << index.venues().size() << '\t' << index.institutions().size() << '\t'
                  << (index.has_papers() ? std::to_string(index.min_year()) : "-") << '\t'
                  << (index.has_papers() ? std::to_string(index.max_year()) : "-")
                  << '\n';
        return 0;
    }

    if (score->parsed()) {
        auto index = score_corpus.load();
        const auto table = scoring::institution_scores(
            index, split_commas(score_venues), {score_from, score_to}, score_full_only);
        std::ofstream file;
        scoring::write_score_tsv(table, output_stream(score_output, file));
        return 0;
    }

    if (similar->parsed()) {
        auto index = similar_corpus.load();
        const auto matrix =
            simconf::build_author_venue_matrix(index, similar_conference, similar_since);
        const auto ranking = simconf::method_from_string(similar_method) ==
                                     simconf::Method::cosine
                                 ? simconf::cosine_similarity_ranking(matrix)
                                 : simconf::column_sum_ranking(matrix);
        if (similar_top < 1) throw ArgumentError("--top must be >= 1");
        const auto top = simconf::top_similar(ranking, static_cast<std::size_t>(similar_top));
        std::ofstream file;
        auto& out = output_stream(similar_output, file);
        out << "rank\tvenue_id\tscore\n";
        for (std::size_t i = 0; i < top.venues.size(); ++i)
            out << (i + 1) << '\t' << top.venues[i] << '\t'
                << tsv::format_fixed(ranking.ranked[i].second, 6) << '\n';
        if (top.shortfall)
            std::cerr << "warning: only " << top.venues.size()
                      << " venues available, fewer than requested " << similar_top
                      << "\n";
        return 0;
    }

    if (feats->parsed()) {
        auto index = feats_corpus.load();
        std::vector<std::string> sim = split_commas(feats_similar);
        if (sim.empty()) {
            const auto matrix =
                simconf::build_author_venue_matrix(index, feats_conference, feats_since);
            const auto ranking =
                simconf::method_from_string(feats_method) == simconf::Method::cosine
                    ? simconf::cosine_similarity_ranking(matrix)
                    : simconf::column_sum_ranking(matrix);
            const auto top = simconf::top_similar(ranking, 3);
            if (top.shortfall)
                throw ValidationError("fewer than 3 similar venues; pass --similar");
            sim = top.venues;
        }
        if (sim.size() != 3)
            throw ArgumentError("--similar needs exactly 3 comma-separated venues");
        features::FeatureSpec spec;
        spec.target_venue = feats_conference;
        spec.similar_venues = {sim[0], sim[1], sim[2]};
        spec.target_year = feats_year;
        const auto matrix = features::assemble_matrix(index, spec);
        for (const auto& w : matrix.warnings) std::cerr << "warning: " << w << "\n";
        std::ofstream file;
        features::write_feature_tsv(matrix, output_stream(feats_output, file));
        return 0;
    }

    if (train->parsed()) {
        const auto config =
            train_args.materialize(true, global_config, global_seed, global_out);
        const auto index = pipeline::load_corpus(config);
        pipeline::run_training(config, index);
        std::cout << "trained\t" << config.artifact_dir() << '\n';
        return 0;
    }

    if (validate->parsed()) {
        const auto config =
            validate_args.materialize(false, global_config, global_seed, global_out);
        const auto index = pipeline::load_corpus(config);
        const auto report = pipeline::run_validation(config, index);
        std::cout << "conference\tbaseline\tregression\tranksvm\tensemble\n";
        std::cout << config.target_venue << '\t'
                  << tsv::format_fixed(report.baseline, 6) << '\t'
                  << tsv::format_fixed(report.regression, 6) << '\t'
                  << tsv::format_fixed(report.ranksvm, 6) << '\t'
                  << tsv::format_fixed(report.ensemble, 6) << '\n';
        return 0;
    }

    if (predict->parsed()) {
        const auto config =
            predict_args.materialize(true, global_config, global_seed, global_out);
        const auto index = pipeline::load_corpus(config);
        const auto rows = pipeline::run_prediction(config, index);
        std::cout << "prediction\t" << config.artifact_dir() << "/prediction.tsv\t"
                  << rows.size() << " institutions\n";
        return 0;
    }

    if (evaluate->parsed()) {
        std::ifstream pin(eval_pred, std::ios::binary);
        if (!pin) throw IoError("cannot open '" + eval_pred + "'");
        std::vector<std::string> ranked;
        std::string line;
        std::size_t n = 0;
        while (std::getline(pin, line)) {
            ++n;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto f = tsv::split(line);
            if (n == 1 && !f.empty() && f[0] == "rank") continue;
            if (f.size() < 2 || f[1].empty())
                throw ParseError(eval_pred + " line " + std::to_string(n) +
                                 ": expected rank\\tinstitution_id");
            ranked.emplace_back(f[1]);
        }

        std::ifstream tin(eval_truth, std::ios::binary);
        if (!tin) throw IoError("cannot open '" + eval_truth + "'");
        std::map<std::string, double> truth;
        n = 0;
        while (std::getline(tin, line)) {
            ++n;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto f = tsv::split(line);
            if (n == 1 && !f.empty() && f[0] == "institution_id") continue;
            double v = 0.0;
            if (f.size() != 2 || f[0].empty() || !tsv::parse_double(f[1], v))
                throw ParseError(eval_truth + " line " + std::to_string(n) +
                                 ": expected institution_id\\tscore");
            truth[std::string(f[0])] = v;
        }

        if (eval_n < 1) throw ArgumentError("--ndcg must be >= 1");
        const double value =
            evaluation::ndcg_at(ranked, truth, static_cast<std::size_t>(eval_n));
        std::cout << "NDCG@" << eval_n << '\t' << tsv::format_fixed(value, 6) << '\n';
        return 0;
    }

    if (synth_cmd->parsed()) {
        if (synth_seed_opt->count() == 0 && !global_seed.empty()) {
            long long v = 0;
            if (!tsv::parse_int(global_seed, v))
                throw ConfigError("--seed: '" + global_seed + "' is not an integer");
            synth_seed = v;
        }
        if (synth_out_opt->count() == 0 && !global_out.empty()) synth_out = global_out;
        synth_spec.seed = static_cast<std::uint64_t>(synth_seed);
        synth::write_synthetic(synth_spec, synth_out);
        std::cout << "synth\t" << synth_out << '\n';
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const instrank::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const instrank::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const instrank::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
