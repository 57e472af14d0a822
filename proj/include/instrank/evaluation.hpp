#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace instrank::evaluation {

// DCG@n = sum over the top min(n, |ranked|) positions of gain / log2(i + 1),
// 1-based rank i; the gain of an institution absent from truth is 0.
double dcg_at(const std::vector<std::string>& ranked,
              const std::map<std::string, double>& truth, std::size_t n);

// DCG divided by the DCG of truth sorted by descending score (ties by
// ascending id). Undefined (error) when every truth score is zero.
double ndcg_at(const std::vector<std::string>& ranked,
               const std::map<std::string, double>& truth, std::size_t n);

}  // namespace instrank::evaluation
