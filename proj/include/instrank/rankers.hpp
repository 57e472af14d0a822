#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instrank/dense.hpp"

namespace instrank::rankers {

// ---- models -------------------------------------------------------------

struct BaselineModel {
    int window = 5;  // history years averaged
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> training_loss;  // per-epoch sum-of-squares, not persisted
};

struct SvrModel {
    std::vector<double> weights;
    double bias = 0.0;
    double epsilon = 0.1;  // insensitivity half-width
    double c = 1.0;        // regularization trade-off
    std::vector<double> training_objective;  // not persisted
};

struct RankSvmModel {
    std::vector<double> weights;
    double lambda = 0.01;
    std::vector<double> training_objective;  // per-epoch objective, not persisted
};

struct RankPair {
    std::vector<double> first;
    std::vector<double> second;
    int label = 1;  // +1: first ranked ahead, -1: second ranked ahead
};

struct PairSet {
    std::vector<RankPair> pairs;
};

struct PredictionScores {
    std::map<std::string, double> scores;
};

// ---- hyperparameters ----------------------------------------------------

struct SgdHyper {
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    double tolerance = 1e-8;  // stop when epoch-loss improvement falls below
    bool decay = true;        // learning_rate / sqrt(epoch) when set
};

struct SvrHyper {
    double epsilon = 0.1;
    double c = 1.0;
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    bool decay = true;
};

struct RankSvmHyper {
    double lambda = 0.01;
    double learning_rate = 0.01;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
    bool decay = true;
};

struct PairOptions {
    std::size_t max_pairs = 50000;
    std::uint64_t seed = 0;
    double min_score_gap = 0.0;  // 0 still requires strictly unequal scores
};

// ---- operations ----------------------------------------------------------

// Mean of the last `window` yearly scores before target_year; missing years
// count as zero.
PredictionScores baseline_predict(
    const std::map<std::string, std::map<int, double>>& history, int target_year,
    const BaselineModel& model = {});

LinearModel fit_linear_regression(const DenseMatrix& x, const std::vector<double>& y,
                                  const SgdHyper& hyper);
SvrModel fit_svr_linear(const DenseMatrix& x, const std::vector<double>& y,
                        const SvrHyper& hyper);

std::vector<double> predict_linear(const LinearModel& model, const DenseMatrix& x);
std::vector<double> predict_svr(const SvrModel& model, const DenseMatrix& x);

// Per row: the mean of the linear and SVR outputs. Row i belongs to
// institutions[i].
PredictionScores regression_predict(const LinearModel& linear, const SvrModel& svr,
                                    const DenseMatrix& x,
                                    const std::vector<std::string>& institutions);

struct LabeledExample {
    std::string institution;
    std::vector<double> features;
    double score = 0.0;
};

// Every within-year unordered pair with strictly unequal scores (and gap >=
// min_score_gap) becomes one training pair; no cross-year pairs. Orientation
// alternates by pair index so both labels occur. Uniform seeded subsample
// when the total exceeds max_pairs.
PairSet make_pairs(const std::vector<std::vector<LabeledExample>>& years,
                   const PairOptions& options);

RankSvmModel fit_ranksvm(const PairSet& pairs, const RankSvmHyper& hyper);

PredictionScores ranksvm_predict(const RankSvmModel& model, const DenseMatrix& x,
                                 const std::vector<std::string>& institutions);

// Min-max to [0,1]; a constant table maps to all 0.5.
PredictionScores normalize_scores(const PredictionScores& scores);

// Component-wise mean of normalized tables; keys missing from a table count
// as 0 and are tallied into missing_key_warnings when given.
PredictionScores ensemble(const std::vector<PredictionScores>& tables,
                          std::size_t* missing_key_warnings = nullptr);

// Descending score, ties broken by ascending institution_id.
std::vector<std::string> rank_of(const PredictionScores& scores);

// ---- objective surfaces (used by training loops and gradient checks) -----

double squared_error_loss(const DenseMatrix& x, const std::vector<double>& y,
                          const std::vector<double>& w, double bias);
void squared_error_gradient(const DenseMatrix& x, const std::vector<double>& y,
                            const std::vector<double>& w, double bias,
                            std::vector<double>& grad_w, double& grad_b);

double svr_objective(const DenseMatrix& x, const std::vector<double>& y,
                     const std::vector<double>& w, double bias, double epsilon,
                     double c);
void svr_subgradient(const DenseMatrix& x, const std::vector<double>& y,
                     const std::vector<double>& w, double bias, double epsilon,
                     double c, std::vector<double>& grad_w, double& grad_b);

double ranksvm_objective(const PairSet& pairs, const std::vector<double>& w,
                         double lambda);
std::vector<double> ranksvm_subgradient(const PairSet& pairs,
                                        const std::vector<double>& w, double lambda);

// Count of pairs whose predicted order contradicts the label.
std::size_t ranksvm_inversions(const PairSet& pairs, const std::vector<double>& w);

// ---- persistence (TSV, 12 significant digits) ----------------------------

void save_linear(const LinearModel& model, std::ostream& out);
LinearModel load_linear(std::istream& in);
void save_svr(const SvrModel& model, std::ostream& out);
SvrModel load_svr(std::istream& in);
void save_ranksvm(const RankSvmModel& model, std::ostream& out);
RankSvmModel load_ranksvm(std::istream& in);
void save_baseline(const BaselineModel& model, std::ostream& out);
BaselineModel load_baseline(std::istream& in);

void write_scores_tsv(const PredictionScores& scores, std::ostream& out);
PredictionScores read_scores_tsv(std::istream& in);

}  // namespace instrank::rankers
