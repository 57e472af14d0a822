#include "instrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "instrank/errors.hpp"

namespace instrank::evaluation {

namespace {

void validate(const std::vector<std::string>& ranked,
              const std::map<std::string, double>& truth, std::size_t n) {
    if (n < 1) throw ArgumentError("ndcg/dcg requires n >= 1");
    std::set<std::string> seen;
    for (const std::string& id : ranked)
        if (!seen.insert(id).second)
            throw ValidationError("ranked list contains duplicate '" + id + "'");
    for (const auto& [id, score] : truth)
        if (score < 0.0)
            throw ValidationError("truth score for '" + id + "' is negative");
}

}  // namespace

double dcg_at(const std::vector<std::string>& ranked,
              const std::map<std::string, double>& truth, std::size_t n) {
    validate(ranked, truth, n);
    const std::size_t top = std::min(n, ranked.size());
    double dcg = 0.0;
    for (std::size_t i = 0; i < top; ++i) {
        auto it = truth.find(ranked[i]);
        const double gain = it == truth.end() ? 0.0 : it->second;
        dcg += gain / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg;
}

double ndcg_at(const std::vector<std::string>& ranked,
               const std::map<std::string, double>& truth, std::size_t n) {
    validate(ranked, truth, n);

    std::vector<std::pair<std::string, double>> ideal(truth.begin(), truth.end());
    std::sort(ideal.begin(), ideal.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ideal.empty() || ideal.front().second <= 0.0)
        throw ValidationError("NDCG undefined: truth has no positive score");

    double idcg = 0.0;
    const std::size_t top = std::min(n, ideal.size());
    for (std::size_t i = 0; i < top; ++i)
        idcg += ideal[i].second / std::log2(static_cast<double>(i) + 2.0);

    return dcg_at(ranked, truth, n) / idcg;
}

}  // namespace instrank::evaluation
