#include "instrank/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "instrank/errors.hpp"
#include "instrank/evaluation.hpp"
#include "instrank/features.hpp"
#include "instrank/scoring.hpp"
#include "instrank/tsv.hpp"

namespace instrank::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSimilarCount = 3;
constexpr std::size_t kNdcgCutoff = 20;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long long parse_ll(const std::string& key, const std::string& value) {
    long long v = 0;
    if (!tsv::parse_int(value, v))
        throw ConfigError("config key '" + key + "': '" + value + "' is not an integer");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!tsv::parse_double(value, v))
        throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path, const char* kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(std::string("not trained: missing ") + kind + " at '" +
                              path + "'; run train first");
    return in;
}

void write_similar(const std::vector<std::string>& similar, const std::string& path) {
    auto out = open_out(path);
    out << "rank\tvenue_id\n";
    for (std::size_t i = 0; i < similar.size(); ++i)
        out << (i + 1) << '\t' << similar[i] << '\n';
}

std::vector<std::string> read_similar(const std::string& path) {
    auto in = open_in(path, "similar-conference list");
    std::vector<std::string> similar;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto f = tsv::split(line);
        if (n == 1 && !f.empty() && f[0] == "rank") continue;
        if (f.size() != 2 || f[1].empty())
            throw ParseError(path + " line " + std::to_string(n) + ": malformed row");
        similar.emplace_back(f[1]);
    }
    if (similar.size() != kSimilarCount)
        throw ValidationError(path + ": expected " + std::to_string(kSimilarCount) +
                              " similar venues, found " + std::to_string(similar.size()));
    return similar;
}

features::FeatureSpec spec_for(const RunConfig& config,
                               const std::vector<std::string>& similar, int year) {
    features::FeatureSpec spec;
    spec.target_venue = config.target_venue;
    spec.similar_venues = {similar[0], similar[1], similar[2]};
    spec.target_year = year;
    return spec;
}

DenseMatrix to_dense(const features::FeatureMatrix& m) {
    DenseMatrix x(m.institutions.size(), features::kNumColumns);
    x.data = m.values;
    return x;
}

std::vector<double> labels_for_rows(const features::FeatureMatrix& m,
                                    const features::LabelVector& labels) {
    std::vector<double> y(m.institutions.size(), 0.0);
    for (std::size_t i = 0; i < m.institutions.size(); ++i) {
        auto it = labels.labels.find(m.institutions[i]);
        if (it != labels.labels.end()) y[i] = it->second;
    }
    return y;
}

// Per-year full-paper score tables of the target venue for [from, to].
std::map<std::string, std::map<int, double>> baseline_history(
    const corpus::CorpusIndex& index, const std::string& venue, int from, int to) {
    std::map<std::string, std::map<int, double>> history;
    for (int year = from; year <= to; ++year) {
        if (index.has_papers() && (year < index.min_year() || year > index.max_year()))
            continue;
        const auto table =
            scoring::institution_scores(index, {venue}, {year, year}, true);
        for (const auto& [inst, score] : table.scores) history[inst][year] = score;
    }
    return history;
}

std::vector<rankers::LabeledExample> year_examples(
    const features::FeatureMatrix& matrix, const DenseMatrix& reduced,
    const features::LabelVector& labels) {
    std::vector<rankers::LabeledExample> out;
    out.reserve(matrix.institutions.size());
    const std::vector<double> y = labels_for_rows(matrix, labels);
    for (std::size_t i = 0; i < matrix.institutions.size(); ++i) {
        rankers::LabeledExample ex;
        ex.institution = matrix.institutions[i];
        ex.features.assign(reduced.row(i).begin(), reduced.row(i).end());
        ex.score = y[i];
        out.push_back(std::move(ex));
    }
    return out;
}

struct ModelScores {
    rankers::PredictionScores baseline;
    rankers::PredictionScores regression;
    rankers::PredictionScores ranksvm;
    rankers::PredictionScores blended;
};

// Shared scoring stage: features for `year` over the union of feature-active
// and history institutions, every model's normalized scores, and the blend.
ModelScores score_year(const RunConfig& config, const corpus::CorpusIndex& index,
                       const TrainedArtifacts& artifacts, int year) {
    const auto history = baseline_history(index, config.target_venue,
                                          year - artifacts.baseline.window, year - 1);
    std::vector<std::string> extra;
    extra.reserve(history.size());
    for (const auto& [inst, _] : history) extra.push_back(inst);

    const auto matrix =
        features::assemble_matrix(index, spec_for(config, artifacts.similar, year), extra);
    if (matrix.institutions.empty())
        throw ValidationError("no institutions active for year " + std::to_string(year));
    const DenseMatrix reduced = pca::transform(artifacts.pca_model, to_dense(matrix));

    auto full_history = history;
    for (const auto& inst : matrix.institutions) full_history[inst];  // ensure key

    ModelScores s;
    s.baseline = rankers::normalize_scores(
        rankers::baseline_predict(full_history, year, artifacts.baseline));
    s.regression = rankers::normalize_scores(rankers::regression_predict(
        artifacts.linear, artifacts.svr, reduced, matrix.institutions));
    s.ranksvm = rankers::normalize_scores(
        rankers::ranksvm_predict(artifacts.ranksvm, reduced, matrix.institutions));
    s.blended = rankers::ensemble({s.baseline, s.regression, s.ranksvm});
    return s;
}

const rankers::PredictionScores& select_model(const ModelScores& s,
                                              const std::string& model) {
    if (model == "baseline") return s.baseline;
    if (model == "regression") return s.regression;
    if (model == "ranksvm") return s.ranksvm;
    if (model == "ensemble") return s.blended;
    throw ConfigError("unknown model '" + model +
                      "' (expected baseline, regression, ranksvm, or ensemble)");
}

}  // namespace

std::string RunConfig::artifact_dir() const {
    if (target_venue.empty()) throw ConfigError("target venue is not set");
    return out_dir + "/" + target_venue;
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "papers") config.papers_path = value;
    else if (key == "authorships") config.authorships_path = value;
    else if (key == "index_cache") config.index_cache_path = value;
    else if (key == "target") config.target_venue = value;
    else if (key == "similar") {
        config.similar_override = split_commas(value);
        if (config.similar_override.size() != kSimilarCount)
            throw ConfigError("config key 'similar' needs exactly 3 venue ids");
    } else if (key == "train_year") config.train_year = static_cast<int>(parse_ll(key, value));
    else if (key == "validation_year")
        config.validation_year = static_cast<int>(parse_ll(key, value));
    else if (key == "prediction_year")
        config.prediction_year = static_cast<int>(parse_ll(key, value));
    else if (key == "model") config.model = value;
    else if (key == "pca_tau") config.pca_tau = parse_real(key, value);
    else if (key == "pca_fixed_k") {
        const long long k = parse_ll(key, value);
        if (k < 1) throw ConfigError("pca_fixed_k must be >= 1");
        config.pca_fixed_k = static_cast<std::size_t>(k);
    } else if (key == "baseline_window") {
        config.baseline_window = static_cast<int>(parse_ll(key, value));
        if (config.baseline_window < 1) throw ConfigError("baseline_window must be >= 1");
    } else if (key == "similar_method")
        config.similar_method = simconf::method_from_string(value);
    else if (key == "similar_since")
        config.similar_since = static_cast<int>(parse_ll(key, value));
    else if (key == "learning_rate") config.learning_rate = parse_real(key, value);
    else if (key == "epochs") {
        const long long e = parse_ll(key, value);
        if (e < 1) throw ConfigError("epochs must be >= 1");
        config.epochs = static_cast<std::size_t>(e);
    } else if (key == "tolerance") config.tolerance = parse_real(key, value);
    else if (key == "svr_epsilon") config.svr_epsilon = parse_real(key, value);
    else if (key == "svr_c") config.svr_c = parse_real(key, value);
    else if (key == "ranksvm_lambda") config.ranksvm_lambda = parse_real(key, value);
    else if (key == "max_pairs") {
        const long long m = parse_ll(key, value);
        if (m < 1) throw ConfigError("max_pairs must be >= 1");
        config.max_pairs = static_cast<std::size_t>(m);
    } else if (key == "min_score_gap") config.min_score_gap = parse_real(key, value);
    else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_ll(key, value));
        config.seed_explicit = true;
    } else if (key == "out") config.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    RunConfig config;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(n) +
                              ": expected 'key = value'");
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

corpus::CorpusIndex load_corpus(const RunConfig& config) {
    if (!config.index_cache_path.empty())
        return corpus::CorpusIndex::load_cache(config.index_cache_path);
    if (config.papers_path.empty() || config.authorships_path.empty())
        throw ConfigError("corpus input missing: set papers/authorships or index_cache");
    std::ifstream pin(config.papers_path, std::ios::binary);
    if (!pin) throw IoError("cannot open '" + config.papers_path + "'");
    auto papers = corpus::parse_papers(pin);
    std::ifstream ain(config.authorships_path, std::ios::binary);
    if (!ain) throw IoError("cannot open '" + config.authorships_path + "'");
    auto parsed = corpus::parse_authorships(ain);
    if (parsed.duplicates_collapsed > 0)
        std::cerr << "warning: collapsed " << parsed.duplicates_collapsed
                  << " duplicate authorship row(s)\n";
    return corpus::CorpusIndex::build(std::move(papers), std::move(parsed.records));
}

void validate_config(const RunConfig& config, const corpus::CorpusIndex& index) {
    if (config.target_venue.empty()) throw ConfigError("target venue is not set");
    if (!(config.train_year < config.validation_year &&
          config.validation_year < config.prediction_year))
        throw ConfigError("years must satisfy train < validation < prediction, got " +
                          std::to_string(config.train_year) + ", " +
                          std::to_string(config.validation_year) + ", " +
                          std::to_string(config.prediction_year));
    if (!index.has_papers()) throw ConfigError("corpus is empty");
    if (config.train_year - 3 < index.min_year())
        throw ConfigError("train year " + std::to_string(config.train_year) +
                          " needs 3 preceding data years; corpus starts at " +
                          std::to_string(index.min_year()));
    const auto& venues = index.venues();
    if (!std::binary_search(venues.begin(), venues.end(), config.target_venue))
        throw ConfigError("target venue '" + config.target_venue +
                          "' does not appear in the corpus");
}

TrainedArtifacts run_training(const RunConfig& config, const corpus::CorpusIndex& index) {
    validate_config(config, index);
    TrainedArtifacts art;

    if (!config.similar_override.empty()) {
        if (config.similar_override.size() != kSimilarCount)
            throw ConfigError("similar override needs exactly 3 venues");
        art.similar = config.similar_override;
    } else {
        const auto matrix = simconf::build_author_venue_matrix(
            index, config.target_venue, config.similar_since);
        const auto ranking = config.similar_method == simconf::Method::cosine
                                 ? simconf::cosine_similarity_ranking(matrix)
                                 : simconf::column_sum_ranking(matrix);
        const auto top = simconf::top_similar(ranking, kSimilarCount);
        if (top.shortfall)
            throw ValidationError(
                "only " + std::to_string(top.venues.size()) +
                " similar venues available for '" + config.target_venue +
                "'; 3 are required (override with the similar option)");
        art.similar = top.venues;
    }

    const auto labels =
        features::target_scores(index, config.target_venue, config.train_year);
    std::vector<std::string> extra;
    extra.reserve(labels.labels.size());
    for (const auto& [inst, _] : labels.labels) extra.push_back(inst);

    const auto matrix = features::assemble_matrix(
        index, spec_for(config, art.similar, config.train_year), extra);
    if (matrix.institutions.size() < 2)
        throw ValidationError("training needs at least 2 active institutions, found " +
                              std::to_string(matrix.institutions.size()));

    art.pca_model = pca::fit_pca(to_dense(matrix), config.pca_tau, config.pca_fixed_k);
    const DenseMatrix reduced = pca::transform(art.pca_model, to_dense(matrix));
    const std::vector<double> y = labels_for_rows(matrix, labels);

    art.linear = rankers::fit_linear_regression(
        reduced, y,
        {config.learning_rate, config.epochs, config.seed, config.tolerance, true});
    art.svr = rankers::fit_svr_linear(reduced, y,
                                      {config.svr_epsilon, config.svr_c,
                                       config.learning_rate, config.epochs, config.seed,
                                       true});
    const auto pairs =
        rankers::make_pairs({year_examples(matrix, reduced, labels)},
                            {config.max_pairs, config.seed, config.min_score_gap});
    art.ranksvm = rankers::fit_ranksvm(pairs, {config.ranksvm_lambda,
                                               config.learning_rate, config.epochs,
                                               config.seed, true});
    art.baseline.window = config.baseline_window;

    const std::string dir = config.artifact_dir();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());

    write_similar(art.similar, dir + "/similar.tsv");
    pca::save_pca_file(art.pca_model, dir + "/pca.tsv");
    {
        auto out = open_out(dir + "/linear.tsv");
        rankers::save_linear(art.linear, out);
    }
    {
        auto out = open_out(dir + "/svr.tsv");
        rankers::save_svr(art.svr, out);
    }
    {
        auto out = open_out(dir + "/ranksvm.tsv");
        rankers::save_ranksvm(art.ranksvm, out);
    }
    {
        auto out = open_out(dir + "/baseline.tsv");
        rankers::save_baseline(art.baseline, out);
    }
    return art;
}

TrainedArtifacts load_artifacts(const RunConfig& config) {
    const std::string dir = config.artifact_dir();
    TrainedArtifacts art;
    art.similar = read_similar(dir + "/similar.tsv");
    {
        auto in = open_in(dir + "/pca.tsv", "pca model");
        art.pca_model = pca::load_pca(in);
    }
    {
        auto in = open_in(dir + "/linear.tsv", "linear model");
        art.linear = rankers::load_linear(in);
    }
    {
        auto in = open_in(dir + "/svr.tsv", "svr model");
        art.svr = rankers::load_svr(in);
    }
    {
        auto in = open_in(dir + "/ranksvm.tsv", "ranksvm model");
        art.ranksvm = rankers::load_ranksvm(in);
    }
    {
        auto in = open_in(dir + "/baseline.tsv", "baseline model");
        art.baseline = rankers::load_baseline(in);
    }
    return art;
}

ValidationReport run_validation(const RunConfig& config,
                                const corpus::CorpusIndex& index) {
    validate_config(config, index);
    const TrainedArtifacts art = load_artifacts(config);
    const ModelScores scores = score_year(config, index, art, config.validation_year);

    const auto truth = features::target_scores(index, config.target_venue,
                                               config.validation_year);

    ValidationReport report;
    report.baseline =
        evaluation::ndcg_at(rankers::rank_of(scores.baseline), truth.labels, kNdcgCutoff);
    report.regression = evaluation::ndcg_at(rankers::rank_of(scores.regression),
                                            truth.labels, kNdcgCutoff);
    report.ranksvm =
        evaluation::ndcg_at(rankers::rank_of(scores.ranksvm), truth.labels, kNdcgCutoff);
    report.ensemble =
        evaluation::ndcg_at(rankers::rank_of(scores.blended), truth.labels, kNdcgCutoff);

    const std::string dir = config.artifact_dir();
    {
        auto out = open_out(dir + "/scores_baseline.tsv");
        rankers::write_scores_tsv(scores.baseline, out);
    }
    {
        auto out = open_out(dir + "/scores_regression.tsv");
        rankers::write_scores_tsv(scores.regression, out);
    }
    {
        auto out = open_out(dir + "/scores_ranksvm.tsv");
        rankers::write_scores_tsv(scores.ranksvm, out);
    }
    {
        auto out = open_out(dir + "/scores_ensemble.tsv");
        rankers::write_scores_tsv(scores.blended, out);
    }
    {
        auto out = open_out(dir + "/validation_report.tsv");
        out << "conference\tbaseline\tregression\tranksvm\tensemble\n";
        out << config.target_venue << '\t' << tsv::format_fixed(report.baseline, 6)
            << '\t' << tsv::format_fixed(report.regression, 6) << '\t'
            << tsv::format_fixed(report.ranksvm, 6) << '\t'
            << tsv::format_fixed(report.ensemble, 6) << '\n';
    }
    return report;
}

std::vector<PredictionRow> run_prediction(const RunConfig& config,
                                          const corpus::CorpusIndex& index) {
    validate_config(config, index);
    TrainedArtifacts art = load_artifacts(config);

    // Retrain the learned models on training + validation years.
    const auto labels_t =
        features::target_scores(index, config.target_venue, config.train_year);
    const auto labels_v =
        features::target_scores(index, config.target_venue, config.validation_year);

    auto extra_of = [](const features::LabelVector& lv) {
        std::vector<std::string> extra;
        extra.reserve(lv.labels.size());
        for (const auto& [inst, _] : lv.labels) extra.push_back(inst);
        return extra;
    };

    const auto matrix_t = features::assemble_matrix(
        index, spec_for(config, art.similar, config.train_year), extra_of(labels_t));
    const auto matrix_v = features::assemble_matrix(
        index, spec_for(config, art.similar, config.validation_year),
        extra_of(labels_v));

    const DenseMatrix reduced_t = pca::transform(art.pca_model, to_dense(matrix_t));
    const DenseMatrix reduced_v = pca::transform(art.pca_model, to_dense(matrix_v));

    DenseMatrix stacked(reduced_t.rows + reduced_v.rows, art.pca_model.k);
    std::copy(reduced_t.data.begin(), reduced_t.data.end(), stacked.data.begin());
    std::copy(reduced_v.data.begin(), reduced_v.data.end(),
              stacked.data.begin() + static_cast<std::ptrdiff_t>(reduced_t.data.size()));
    std::vector<double> y = labels_for_rows(matrix_t, labels_t);
    {
        const auto yv = labels_for_rows(matrix_v, labels_v);
        y.insert(y.end(), yv.begin(), yv.end());
    }

    art.linear = rankers::fit_linear_regression(
        stacked, y,
        {config.learning_rate, config.epochs, config.seed, config.tolerance, true});
    art.svr = rankers::fit_svr_linear(stacked, y,
                                      {config.svr_epsilon, config.svr_c,
                                       config.learning_rate, config.epochs, config.seed,
                                       true});
    const auto pairs = rankers::make_pairs(
        {year_examples(matrix_t, reduced_t, labels_t),
         year_examples(matrix_v, reduced_v, labels_v)},
        {config.max_pairs, config.seed, config.min_score_gap});
    art.ranksvm = rankers::fit_ranksvm(pairs, {config.ranksvm_lambda,
                                               config.learning_rate, config.epochs,
                                               config.seed, true});

    const ModelScores scores = score_year(config, index, art, config.prediction_year);
    const rankers::PredictionScores& final_scores = select_model(scores, config.model);

    std::vector<PredictionRow> rows;
    const auto order = rankers::rank_of(final_scores);
    rows.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        rows.push_back({static_cast<int>(i) + 1, order[i],
                        final_scores.scores.at(order[i])});

    const std::string dir = config.artifact_dir();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
    auto out = open_out(dir + "/prediction.tsv");
    out << "rank\tinstitution_id\tscore\n";
    for (const PredictionRow& row : rows)
        out << row.rank << '\t' << row.institution << '\t'
            << tsv::format_fixed(row.score, 6) << '\n';
    return rows;
}

}  // namespace instrank::pipeline
