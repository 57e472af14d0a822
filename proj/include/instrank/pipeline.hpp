#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instrank/corpus.hpp"
#include "instrank/pca.hpp"
#include "instrank/rankers.hpp"
#include "instrank/simconf.hpp"

namespace instrank::pipeline {

struct RunConfig {
    // corpus input: either the two TSV files or a saved index cache
    std::string papers_path;
    std::string authorships_path;
    std::string index_cache_path;

    std::string target_venue;
    std::vector<std::string> similar_override;  // empty = discover, else exactly 3

    int train_year = 0;
    int validation_year = 0;
    int prediction_year = 0;

    std::string model = "ensemble";  // baseline | regression | ranksvm | ensemble

    double pca_tau = 0.95;
    std::optional<std::size_t> pca_fixed_k;

    int baseline_window = 5;
    simconf::Method similar_method = simconf::Method::cosine;
    int similar_since = 2010;

    double learning_rate = 0.01;
    std::size_t epochs = 200;
    double tolerance = 1e-8;
    double svr_epsilon = 0.1;
    double svr_c = 1.0;
    double ranksvm_lambda = 0.01;
    std::size_t max_pairs = 50000;
    double min_score_gap = 0.0;

    std::uint64_t seed = 0;
    bool seed_explicit = false;  // set whenever a seed key/flag was supplied
    std::string out_dir = ".";

    // Directory holding this target's artifacts.
    std::string artifact_dir() const;
};

// key = value lines; '#' starts a comment. Unknown keys are rejected.
RunConfig load_config_file(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

corpus::CorpusIndex load_corpus(const RunConfig& config);

// Year ordering and history-depth checks against the corpus.
void validate_config(const RunConfig& config, const corpus::CorpusIndex& index);

struct TrainedArtifacts {
    std::vector<std::string> similar;  // exactly 3
    pca::PcaModel pca_model;
    rankers::LinearModel linear;
    rankers::SvrModel svr;
    rankers::RankSvmModel ranksvm;
    rankers::BaselineModel baseline;
};

// Discovers similar conferences, assembles the training-year features and
// labels, fits PCA and all learned models, and persists everything under
// artifact_dir().
TrainedArtifacts run_training(const RunConfig& config, const corpus::CorpusIndex& index);

TrainedArtifacts load_artifacts(const RunConfig& config);

struct ValidationReport {
    double baseline = 0.0;
    double regression = 0.0;
    double ranksvm = 0.0;
    double ensemble = 0.0;
};

// Rebuilds validation-year features with the stored similar list and PCA,
// scores every model plus their ensemble with NDCG@20 against the
// validation-year truth, and persists the normalized member scores next to
// the report.
ValidationReport run_validation(const RunConfig& config,
                                const corpus::CorpusIndex& index);

struct PredictionRow {
    int rank = 0;
    std::string institution;
    double score = 0.0;
};

// Retrains the learned models on the union of training- and validation-year
// examples (stored PCA and similar list reused), then writes the final
// ranking for the prediction year.
std::vector<PredictionRow> run_prediction(const RunConfig& config,
                                          const corpus::CorpusIndex& index);

}  // namespace instrank::pipeline
