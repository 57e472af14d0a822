#include "instrank/rankers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "instrank/errors.hpp"
#include "instrank/tsv.hpp"

namespace instrank::rankers {

namespace {

// Fisher-Yates with explicit modulo draws: deterministic for a given seed
// across standard libraries, unlike std::shuffle.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng() % i]);
}

double epoch_rate(double base, std::size_t epoch, bool decay) {
    return decay ? base / std::sqrt(static_cast<double>(epoch)) : base;
}

void check_finite_inputs(const DenseMatrix& x, const std::vector<double>& y) {
    if (x.rows != y.size())
        throw ArgumentError("feature matrix has " + std::to_string(x.rows) +
                            " rows but " + std::to_string(y.size()) + " targets");
    if (x.rows == 0) throw ArgumentError("training requires at least one example");
    for (double v : x.data)
        if (!std::isfinite(v)) throw ArgumentError("non-finite feature value");
    for (double v : y)
        if (!std::isfinite(v)) throw ArgumentError("non-finite target value");
}

double dot_row(const DenseMatrix& x, std::size_t row, const std::vector<double>& w) {
    double acc = 0.0;
    const double* r = x.data.data() + row * x.cols;
    for (std::size_t j = 0; j < x.cols; ++j) acc += r[j] * w[j];
    return acc;
}

}  // namespace

PredictionScores baseline_predict(
    const std::map<std::string, std::map<int, double>>& history, int target_year,
    const BaselineModel& model) {
    if (model.window < 1)
        throw ArgumentError("baseline window must be >= 1, got " +
                            std::to_string(model.window));
    PredictionScores out;
    for (const auto& [institution, yearly] : history) {
        double sum = 0.0;
        for (int j = 1; j <= model.window; ++j) {
            auto it = yearly.find(target_year - j);
            if (it != yearly.end()) sum += it->second;
        }
        out.scores[institution] = sum / static_cast<double>(model.window);
    }
    return out;
}

double squared_error_loss(const DenseMatrix& x, const std::vector<double>& y,
                          const std::vector<double>& w, double bias) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = y[i] - (dot_row(x, i, w) + bias);
        loss += 0.5 * r * r;
    }
    return loss;
}

void squared_error_gradient(const DenseMatrix& x, const std::vector<double>& y,
                            const std::vector<double>& w, double bias,
                            std::vector<double>& grad_w, double& grad_b) {
    grad_w.assign(x.cols, 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double r = y[i] - (dot_row(x, i, w) + bias);
        const double* row = x.data.data() + i * x.cols;
        for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] -= r * row[j];
        grad_b -= r;
    }
}

LinearModel fit_linear_regression(const DenseMatrix& x, const std::vector<double>& y,
                                  const SgdHyper& hyper) {
    check_finite_inputs(x, y);
    if (hyper.epochs < 1) throw ArgumentError("epochs must be >= 1");

    LinearModel model;
    model.weights.assign(x.cols, 0.0);
    model.bias = 0.0;

    std::mt19937_64 rng(hyper.seed);
    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), 0);

    double prev_loss = squared_error_loss(x, y, model.weights, model.bias);
    for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
        const double rate = epoch_rate(hyper.learning_rate, epoch, hyper.decay);
        shuffle_indices(order, rng);
        for (std::size_t i : order) {
            const double err = (dot_row(x, i, model.weights) + model.bias) - y[i];
            const double* row = x.data.data() + i * x.cols;
            for (std::size_t j = 0; j < x.cols; ++j)
                model.weights[j] -= rate * err * row[j];
            model.bias -= rate * err;
        }
        const double loss = squared_error_loss(x, y, model.weights, model.bias);
        model.training_loss.push_back(loss);
        if (std::abs(prev_loss - loss) < hyper.tolerance) break;
        prev_loss = loss;
    }
    return model;
}

double svr_objective(const DenseMatrix& x, const std::vector<double>& y,
                     const std::vector<double>& w, double bias, double epsilon,
                     double c) {
    double obj = 0.0;
    for (double wj : w) obj += 0.5 * wj * wj;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double excess = std::abs(y[i] - (dot_row(x, i, w) + bias)) - epsilon;
        if (excess > 0.0) obj += c * excess;
    }
    return obj;
}

void svr_subgradient(const DenseMatrix& x, const std::vector<double>& y,
                     const std::vector<double>& w, double bias, double epsilon,
                     double c, std::vector<double>& grad_w, double& grad_b) {
    grad_w = w;  // d/dw of 0.5 ||w||^2
    grad_b = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double e = y[i] - (dot_row(x, i, w) + bias);
        if (std::abs(e) <= epsilon) continue;
        const double sign = e > 0.0 ? 1.0 : -1.0;
        const double* row = x.data.data() + i * x.cols;
        for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] -= c * sign * row[j];
        grad_b -= c * sign;
    }
}

SvrModel fit_svr_linear(const DenseMatrix& x, const std::vector<double>& y,
                        const SvrHyper& hyper) {
    check_finite_inputs(x, y);
    if (hyper.epsilon < 0.0)
        throw ArgumentError("svr epsilon must be >= 0, got " +
                            std::to_string(hyper.epsilon));
    if (hyper.c <= 0.0)
        throw ArgumentError("svr c must be > 0, got " + std::to_string(hyper.c));
    if (hyper.epochs < 1) throw ArgumentError("epochs must be >= 1");

    SvrModel model;
    model.weights.assign(x.cols, 0.0);
    model.bias = 0.0;
    model.epsilon = hyper.epsilon;
    model.c = hyper.c;

    const double inv_n = 1.0 / static_cast<double>(x.rows);
    std::mt19937_64 rng(hyper.seed);
    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
        const double rate = epoch_rate(hyper.learning_rate, epoch, hyper.decay);
        shuffle_indices(order, rng);
        for (std::size_t i : order) {
            const double e = y[i] - (dot_row(x, i, model.weights) + model.bias);
            const double* row = x.data.data() + i * x.cols;
            if (std::abs(e) > hyper.epsilon) {
                const double sign = e > 0.0 ? 1.0 : -1.0;
                for (std::size_t j = 0; j < x.cols; ++j)
                    model.weights[j] -=
                        rate * (model.weights[j] * inv_n - hyper.c * sign * row[j]);
                model.bias += rate * hyper.c * sign;
            } else {
                for (std::size_t j = 0; j < x.cols; ++j)
                    model.weights[j] -= rate * model.weights[j] * inv_n;
            }
        }
        model.training_objective.push_back(
            svr_objective(x, y, model.weights, model.bias, hyper.epsilon, hyper.c));
    }
    return model;
}

std::vector<double> predict_linear(const LinearModel& model, const DenseMatrix& x) {
    if (x.cols != model.weights.size())
        throw ArgumentError("predict_linear: dimension mismatch (" +
                            std::to_string(x.cols) + " vs " +
                            std::to_string(model.weights.size()) + ")");
    std::vector<double> out(x.rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < x.rows; ++i)
        out[i] = dot_row(x, i, model.weights) + model.bias;
    return out;
}

std::vector<double> predict_svr(const SvrModel& model, const DenseMatrix& x) {
    if (x.cols != model.weights.size())
        throw ArgumentError("predict_svr: dimension mismatch (" +
                            std::to_string(x.cols) + " vs " +
                            std::to_string(model.weights.size()) + ")");
    std::vector<double> out(x.rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < x.rows; ++i)
        out[i] = dot_row(x, i, model.weights) + model.bias;
    return out;
}

PredictionScores regression_predict(const LinearModel& linear, const SvrModel& svr,
                                    const DenseMatrix& x,
                                    const std::vector<std::string>& institutions) {
    if (linear.weights.size() != svr.weights.size())
        throw ArgumentError("regression_predict: model dimensions differ");
    if (institutions.size() != x.rows)
        throw ArgumentError("regression_predict: row/institution count mismatch");
    const auto a = predict_linear(linear, x);
    const auto b = predict_svr(svr, x);
    PredictionScores out;
    for (std::size_t i = 0; i < x.rows; ++i)
        out.scores[institutions[i]] = 0.5 * (a[i] + b[i]);
    return out;
}

PairSet make_pairs(const std::vector<std::vector<LabeledExample>>& years,
                   const PairOptions& options) {
    PairSet set;
    std::size_t pair_index = 0;
    for (const auto& year : years) {
        std::vector<const LabeledExample*> sorted;
        sorted.reserve(year.size());
        for (const auto& ex : year) sorted.push_back(&ex);
        std::sort(sorted.begin(), sorted.end(),
                  [](const LabeledExample* a, const LabeledExample* b) {
                      return a->institution < b->institution;
                  });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            for (std::size_t j = i + 1; j < sorted.size(); ++j) {
                const double gap = std::abs(sorted[i]->score - sorted[j]->score);
                if (gap == 0.0 || gap < options.min_score_gap) continue;
                const LabeledExample* hi = sorted[i];
                const LabeledExample* lo = sorted[j];
                if (hi->score < lo->score) std::swap(hi, lo);
                if (hi->features == lo->features) continue;  // indistinguishable
                RankPair pair;
                if (pair_index % 2 == 0) {
                    pair = {hi->features, lo->features, +1};
                } else {
                    pair = {lo->features, hi->features, -1};
                }
                set.pairs.push_back(std::move(pair));
                ++pair_index;
            }
        }
    }
    if (set.pairs.empty())
        throw ValidationError("no valid ranking pairs: all scores equal or below the "
                              "minimum gap");

    if (set.pairs.size() > options.max_pairs) {
        std::vector<std::size_t> idx(set.pairs.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(options.seed);
        shuffle_indices(idx, rng);
        idx.resize(options.max_pairs);
        std::sort(idx.begin(), idx.end());  // keep original enumeration order
        std::vector<RankPair> kept;
        kept.reserve(options.max_pairs);
        for (std::size_t i : idx) kept.push_back(std::move(set.pairs[i]));
        set.pairs = std::move(kept);
    }
    return set;
}

double ranksvm_objective(const PairSet& pairs, const std::vector<double>& w,
                         double lambda) {
    double obj = 0.0;
    for (double wj : w) obj += lambda * wj * wj;
    for (const RankPair& p : pairs.pairs) {
        double margin = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j)
            margin += w[j] * (p.first[j] - p.second[j]);
        margin *= p.label;
        if (margin < 1.0) obj += 1.0 - margin;
    }
    return obj;
}

std::vector<double> ranksvm_subgradient(const PairSet& pairs,
                                        const std::vector<double>& w, double lambda) {
    std::vector<double> grad(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) grad[j] = 2.0 * lambda * w[j];
    for (const RankPair& p : pairs.pairs) {
        double margin = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j)
            margin += w[j] * (p.first[j] - p.second[j]);
        if (p.label * margin < 1.0)
            for (std::size_t j = 0; j < w.size(); ++j)
                grad[j] -= p.label * (p.first[j] - p.second[j]);
    }
    return grad;
}

std::size_t ranksvm_inversions(const PairSet& pairs, const std::vector<double>& w) {
    std::size_t count = 0;
    for (const RankPair& p : pairs.pairs) {
        double margin = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j)
            margin += w[j] * (p.first[j] - p.second[j]);
        if (p.label * margin <= 0.0) ++count;
    }
    return count;
}

RankSvmModel fit_ranksvm(const PairSet& pairs, const RankSvmHyper& hyper) {
    if (pairs.pairs.empty()) throw ArgumentError("fit_ranksvm: empty pair set");
    if (hyper.lambda <= 0.0)
        throw ArgumentError("ranksvm lambda must be > 0, got " +
                            std::to_string(hyper.lambda));
    if (hyper.epochs < 1) throw ArgumentError("epochs must be >= 1");
    const std::size_t dim = pairs.pairs.front().first.size();
    for (const RankPair& p : pairs.pairs) {
        if (p.first.size() != dim || p.second.size() != dim)
            throw ArgumentError("fit_ranksvm: inconsistent pair dimensions");
        if (p.label != 1 && p.label != -1)
            throw ArgumentError("fit_ranksvm: labels must be +1 or -1");
    }

    RankSvmModel model;
    model.weights.assign(dim, 0.0);
    model.lambda = hyper.lambda;

    const double reg = 2.0 * hyper.lambda / static_cast<double>(pairs.pairs.size());
    std::mt19937_64 rng(hyper.seed);
    std::vector<std::size_t> order(pairs.pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
        const double rate = epoch_rate(hyper.learning_rate, epoch, hyper.decay);
        shuffle_indices(order, rng);
        for (std::size_t i : order) {
            const RankPair& p = pairs.pairs[i];
            double margin = 0.0;
            for (std::size_t j = 0; j < dim; ++j)
                margin += model.weights[j] * (p.first[j] - p.second[j]);
            const bool violated = p.label * margin < 1.0;
            for (std::size_t j = 0; j < dim; ++j) {
                double g = reg * model.weights[j];
                if (violated) g -= p.label * (p.first[j] - p.second[j]);
                model.weights[j] -= rate * g;
            }
        }
        model.training_objective.push_back(
            ranksvm_objective(pairs, model.weights, hyper.lambda));
    }
    return model;
}

PredictionScores ranksvm_predict(const RankSvmModel& model, const DenseMatrix& x,
                                 const std::vector<std::string>& institutions) {
    if (x.cols != model.weights.size())
        throw ArgumentError("ranksvm_predict: dimension mismatch (" +
                            std::to_string(x.cols) + " vs " +
                            std::to_string(model.weights.size()) + ")");
    if (institutions.size() != x.rows)
        throw ArgumentError("ranksvm_predict: row/institution count mismatch");
    std::vector<double> raw(x.rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < x.rows; ++i) raw[i] = dot_row(x, i, model.weights);
    PredictionScores out;
    for (std::size_t i = 0; i < x.rows; ++i) out.scores[institutions[i]] = raw[i];
    return out;
}

PredictionScores normalize_scores(const PredictionScores& scores) {
    if (scores.scores.empty())
        throw ArgumentError("normalize_scores: empty score table");
    double lo = scores.scores.begin()->second, hi = lo;
    for (const auto& [_, v] : scores.scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    PredictionScores out;
    if (hi == lo) {
        for (const auto& [k, _] : scores.scores) out.scores[k] = 0.5;
        return out;
    }
    const double span = hi - lo;
    for (const auto& [k, v] : scores.scores) out.scores[k] = (v - lo) / span;
    return out;
}

PredictionScores ensemble(const std::vector<PredictionScores>& tables,
                          std::size_t* missing_key_warnings) {
    if (tables.empty()) throw ArgumentError("ensemble: no score tables");
    std::set<std::string> keys;
    for (const auto& t : tables) {
        if (t.scores.empty()) throw ArgumentError("ensemble: empty member table");
        for (const auto& [k, v] : t.scores) {
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw ArgumentError("ensemble: member score " + tsv::format_sig12(v) +
                                    " for '" + k + "' is not normalized to [0, 1]");
            keys.insert(k);
        }
    }
    std::size_t missing = 0;
    PredictionScores out;
    for (const std::string& k : keys) {
        double sum = 0.0;
        for (const auto& t : tables) {
            auto it = t.scores.find(k);
            if (it == t.scores.end()) {
                ++missing;
            } else {
                sum += it->second;
            }
        }
        out.scores[k] = sum / static_cast<double>(tables.size());
    }
    if (missing_key_warnings) *missing_key_warnings = missing;
    return out;
}

std::vector<std::string> rank_of(const PredictionScores& scores) {
    std::vector<std::pair<std::string, double>> rows(scores.scores.begin(),
                                                     scores.scores.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (auto& [k, _] : rows) out.push_back(std::move(k));
    return out;
}

// ---- persistence ----------------------------------------------------------

namespace {

void write_vector(std::ostream& out, const char* key, const std::vector<double>& v) {
    out << key;
    for (double x : v) out << '\t' << tsv::format_sig12(x);
    out << '\n';
}

class ModelReader {
  public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::vector<std::string_view> next(const char* what) {
        if (!std::getline(in_, line_))
            throw ParseError(std::string("model file: missing ") + what);
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        return tsv::split(line_);
    }

    void expect_tag(const char* type) {
        auto f = next("type tag");
        if (f.size() != 2 || f[0] != "model" || f[1] != type)
            throw ParseError(std::string("model file: expected 'model\\t") + type + "'");
    }

    double scalar(const char* key) {
        auto f = next(key);
        double v = 0.0;
        if (f.size() != 2 || f[0] != key || !tsv::parse_double(f[1], v))
            throw ParseError(std::string("model file: malformed ") + key + " line");
        return v;
    }

    std::vector<double> vector(const char* key) {
        auto f = next(key);
        if (f.size() < 2 || f[0] != key)
            throw ParseError(std::string("model file: malformed ") + key + " line");
        std::vector<double> v(f.size() - 1);
        for (std::size_t i = 1; i < f.size(); ++i)
            if (!tsv::parse_double(f[i], v[i - 1]))
                throw ParseError(std::string("model file: bad number in ") + key);
        return v;
    }

  private:
    std::istream& in_;
    std::string line_;
};

}  // namespace

void save_linear(const LinearModel& model, std::ostream& out) {
    out << "model\tlinear\n";
    out << "bias\t" << tsv::format_sig12(model.bias) << '\n';
    write_vector(out, "weights", model.weights);
}

LinearModel load_linear(std::istream& in) {
    ModelReader r(in);
    r.expect_tag("linear");
    LinearModel m;
    m.bias = r.scalar("bias");
    m.weights = r.vector("weights");
    return m;
}

void save_svr(const SvrModel& model, std::ostream& out) {
    out << "model\tsvr\n";
    out << "epsilon\t" << tsv::format_sig12(model.epsilon) << '\n';
    out << "c\t" << tsv::format_sig12(model.c) << '\n';
    out << "bias\t" << tsv::format_sig12(model.bias) << '\n';
    write_vector(out, "weights", model.weights);
}

SvrModel load_svr(std::istream& in) {
    ModelReader r(in);
    r.expect_tag("svr");
    SvrModel m;
    m.epsilon = r.scalar("epsilon");
    m.c = r.scalar("c");
    m.bias = r.scalar("bias");
    m.weights = r.vector("weights");
    return m;
}

void save_ranksvm(const RankSvmModel& model, std::ostream& out) {
    out << "model\tranksvm\n";
    out << "lambda\t" << tsv::format_sig12(model.lambda) << '\n';
    write_vector(out, "weights", model.weights);
}

RankSvmModel load_ranksvm(std::istream& in) {
    ModelReader r(in);
    r.expect_tag("ranksvm");
    RankSvmModel m;
    m.lambda = r.scalar("lambda");
    m.weights = r.vector("weights");
    return m;
}

void save_baseline(const BaselineModel& model, std::ostream& out) {
    out << "model\tbaseline\n";
    out << "window\t" << model.window << '\n';
}

BaselineModel load_baseline(std::istream& in) {
    ModelReader r(in);
    r.expect_tag("baseline");
    BaselineModel m;
    m.window = static_cast<int>(r.scalar("window"));
    if (m.window < 1) throw ParseError("model file: baseline window must be >= 1");
    return m;
}

void write_scores_tsv(const PredictionScores& scores, std::ostream& out) {
    out << "institution_id\tscore\n";
    for (const auto& [k, v] : scores.scores)
        out << k << '\t' << tsv::format_sig12(v) << '\n';
}

PredictionScores read_scores_tsv(std::istream& in) {
    PredictionScores out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto f = tsv::split(line);
        if (n == 1 && !f.empty() && f[0] == "institution_id") continue;
        double v = 0.0;
        if (f.size() != 2 || f[0].empty() || !tsv::parse_double(f[1], v))
            throw ParseError("scores tsv line " + std::to_string(n) + ": malformed row");
        out.scores[std::string(f[0])] = v;
    }
    return out;
}

}  // namespace instrank::rankers
