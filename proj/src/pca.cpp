#include "instrank/pca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "instrank/errors.hpp"
#include "instrank/tsv.hpp"

namespace instrank::pca {

namespace {

constexpr double kOffDiagTolerance = 1e-12;
constexpr int kMaxSweeps = 100;
constexpr const char* kModelVersion = "instrank-pca-v1";

void canonicalize_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    if (v[arg] < 0.0)
        for (double& x : v) x = -x;
}

}  // namespace

EigenDecomposition jacobi_eigen_symmetric(const DenseMatrix& s) {
    if (s.rows != s.cols || s.rows == 0)
        throw ArgumentError("jacobi_eigen_symmetric requires a square matrix");
    const std::size_t d = s.rows;

    DenseMatrix a = s;
    DenseMatrix v(d, d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q)
                off = std::max(off, std::abs(a.at(p, q)));
        if (off < kOffDiagTolerance) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                for (std::size_t i = 0; i < d; ++i) {
                    const double aip = a.at(i, p);
                    const double aiq = a.at(i, q);
                    a.at(i, p) = c * aip - sn * aiq;
                    a.at(i, q) = sn * aip + c * aiq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double api = a.at(p, i);
                    const double aqi = a.at(q, i);
                    a.at(p, i) = c * api - sn * aqi;
                    a.at(q, i) = sn * api + c * aqi;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vip = v.at(i, p);
                    const double viq = v.at(i, q);
                    v.at(i, p) = c * vip - sn * viq;
                    v.at(i, q) = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::pair<double, std::vector<double>>> pairs(d);
    for (std::size_t j = 0; j < d; ++j) {
        pairs[j].first = a.at(j, j);
        pairs[j].second.resize(d);
        for (std::size_t i = 0; i < d; ++i) pairs[j].second[i] = v.at(i, j);
        canonicalize_sign(pairs[j].second);
    }
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;  // exact ties: lexicographic eigenvector order
    });

    EigenDecomposition dec;
    dec.values.resize(d);
    dec.vectors = DenseMatrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        dec.values[j] = pairs[j].first;
        for (std::size_t i = 0; i < d; ++i) dec.vectors.at(i, j) = pairs[j].second[i];
    }
    return dec;
}

PcaModel fit_pca(const DenseMatrix& x, double tau, std::optional<std::size_t> fixed_k) {
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    if (n < 2) throw ArgumentError("fit_pca requires at least 2 rows, got " +
                                   std::to_string(n));
    if (d < 1) throw ArgumentError("fit_pca requires at least 1 column");
    for (double v : x.data)
        if (!std::isfinite(v)) throw ArgumentError("fit_pca input contains non-finite values");
    if (fixed_k && (*fixed_k < 1 || *fixed_k > d))
        throw ArgumentError("fixed K " + std::to_string(*fixed_k) +
                            " outside [1, " + std::to_string(d) + "]");

    PcaModel model;
    model.tau = tau;
    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += x.at(i, j);
    for (double& m : model.mean) m /= static_cast<double>(n);

    // S = (1/n) sum of centered outer products.
    DenseMatrix s(d, d, 0.0);
    std::vector<double> centered(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) centered[j] = x.at(i, j) - model.mean[j];
        for (std::size_t p = 0; p < d; ++p) {
            const double cp = centered[p];
            for (std::size_t q = p; q < d; ++q) s.at(p, q) += cp * centered[q];
        }
    }
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p; q < d; ++q) {
            s.at(p, q) /= static_cast<double>(n);
            s.at(q, p) = s.at(p, q);
        }

    double total_variance = 0.0;
    for (std::size_t j = 0; j < d; ++j) total_variance += s.at(j, j);
    if (total_variance <= 0.0)
        throw ValidationError("degenerate input: total variance is zero");

    EigenDecomposition dec = jacobi_eigen_symmetric(s);
    for (double& ev : dec.values)
        if (ev < 0.0) ev = 0.0;  // covariance is PSD; negatives are roundoff
    model.eigenvalues = dec.values;

    const double sum_all =
        std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    if (fixed_k) {
        model.k = *fixed_k;
    } else {
        model.k = d;
        double cum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            cum += model.eigenvalues[j];
            if (cum / sum_all > tau) {
                model.k = j + 1;
                break;
            }
        }
    }

    model.components = DenseMatrix(d, model.k);
    for (std::size_t j = 0; j < model.k; ++j)
        for (std::size_t i = 0; i < d; ++i)
            model.components.at(i, j) = dec.vectors.at(i, j);
    return model;
}

DenseMatrix transform(const PcaModel& model, const DenseMatrix& x) {
    const std::size_t d = model.input_dim();
    if (x.cols != d)
        throw ArgumentError("transform: input has " + std::to_string(x.cols) +
                            " columns, model expects " + std::to_string(d));
    DenseMatrix y(x.rows, model.k);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t j = 0; j < model.k; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                acc += model.components.at(i, j) * (x.at(r, i) - model.mean[i]);
            y.at(r, j) = acc;
        }
    }
    return y;
}

DenseMatrix inverse_transform(const PcaModel& model, const DenseMatrix& y) {
    const std::size_t d = model.input_dim();
    if (y.cols != model.k)
        throw ArgumentError("inverse_transform: input has " + std::to_string(y.cols) +
                            " columns, model has K = " + std::to_string(model.k));
    DenseMatrix x(y.rows, d);
#pragma omp parallel for schedule(static)
    for (std::size_t r = 0; r < y.rows; ++r)
        for (std::size_t i = 0; i < d; ++i) {
            double acc = model.mean[i];
            for (std::size_t j = 0; j < model.k; ++j)
                acc += model.components.at(i, j) * y.at(r, j);
            x.at(r, i) = acc;
        }
    return x;
}

double explained_variance_ratio(const PcaModel& model) {
    const double sum_all =
        std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    double cum = 0.0;
    for (std::size_t j = 0; j < model.k && j < model.eigenvalues.size(); ++j)
        cum += model.eigenvalues[j];
    return cum / sum_all;
}

void save_pca(const PcaModel& model, std::ostream& out) {
    const std::size_t d = model.input_dim();
    out << kModelVersion << '\n';
    out << "d\t" << d << '\n';
    out << "mean";
    for (double m : model.mean) out << '\t' << tsv::format_sig12(m);
    out << '\n';
    out << "eigenvalues";
    for (double ev : model.eigenvalues) out << '\t' << tsv::format_sig12(ev);
    out << '\n';
    out << "k\t" << model.k << '\n';
    out << "tau\t" << tsv::format_sig12(model.tau) << '\n';
    for (std::size_t i = 0; i < d; ++i) {
        out << "component";
        for (std::size_t j = 0; j < model.k; ++j)
            out << '\t' << tsv::format_sig12(model.components.at(i, j));
        out << '\n';
    }
}

PcaModel load_pca(std::istream& in) {
    std::string line;
    auto next = [&](const char* what) -> std::vector<std::string_view> {
        if (!std::getline(in, line)) throw ParseError(std::string("pca model: missing ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return tsv::split(line);
    };

    auto head = next("version tag");
    if (head.size() != 1 || head[0] != kModelVersion)
        throw ParseError("pca model: version tag mismatch");

    auto read_size = [&](const char* key) -> std::size_t {
        auto f = next(key);
        long long v = 0;
        if (f.size() != 2 || f[0] != key || !tsv::parse_int(f[1], v) || v < 0)
            throw ParseError(std::string("pca model: malformed ") + key + " line");
        return static_cast<std::size_t>(v);
    };

    PcaModel model;
    const std::size_t d = read_size("d");

    auto read_vec = [&](const char* key, std::size_t count) {
        auto f = next(key);
        if (f.size() != count + 1 || f[0] != key)
            throw ParseError(std::string("pca model: malformed ") + key + " line");
        std::vector<double> vec(count);
        for (std::size_t i = 0; i < count; ++i)
            if (!tsv::parse_double(f[i + 1], vec[i]))
                throw ParseError(std::string("pca model: bad number in ") + key);
        return vec;
    };

    model.mean = read_vec("mean", d);
    model.eigenvalues = read_vec("eigenvalues", d);
    model.k = read_size("k");

    auto tau_fields = next("tau");
    if (tau_fields.size() != 2 || tau_fields[0] != "tau" ||
        !tsv::parse_double(tau_fields[1], model.tau))
        throw ParseError("pca model: malformed tau line");
    model.components = DenseMatrix(d, model.k);
    for (std::size_t i = 0; i < d; ++i) {
        auto row = read_vec("component", model.k);
        for (std::size_t j = 0; j < model.k; ++j) model.components.at(i, j) = row[j];
    }
    if (model.k > d) throw ParseError("pca model: K exceeds dimension");
    return model;
}

void save_pca_file(const PcaModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save_pca(model, out);
    if (!out) throw IoError("failed writing '" + path + "'");
}

PcaModel load_pca_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pca model '" + path + "'");
    return load_pca(in);
}

}  // namespace instrank::pca
