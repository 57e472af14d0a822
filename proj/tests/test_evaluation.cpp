#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "instrank/errors.hpp"
#include "instrank/evaluation.hpp"
#include "support/reference.hpp"

using namespace instrank;
using namespace instrank::evaluation;

TEST_CASE("dcg of a single item at rank one is its gain") {
    CHECK(dcg_at({"A"}, {{"A", 1.0}}, 5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("items absent from truth contribute nothing") {
    CHECK(dcg_at({"X", "Y"}, {{"A", 3.0}}, 5) == 0.0);
}

TEST_CASE("hand-evaluated dcg and ndcg") {
    const std::map<std::string, double> truth{{"A", 3.0}, {"B", 2.0}, {"C", 1.0}};
    const std::vector<std::string> order{"C", "B", "A"};
    const double dcg = dcg_at(order, truth, 3);
    CHECK(dcg == doctest::Approx(3.76186).epsilon(1e-4));
    const double ndcg = ndcg_at(order, truth, 3);
    CHECK(std::abs(ndcg - 0.789997) < 1e-4);
}

TEST_CASE("the ideal order scores exactly one") {
    const std::map<std::string, double> truth{{"A", 3.0}, {"B", 2.0}, {"C", 1.0}};
    CHECK(std::abs(ndcg_at({"A", "B", "C"}, truth, 3) - 1.0) < 1e-12);
}

TEST_CASE("every permutation scores at most one") {
    std::vector<std::string> order{"A", "B", "C", "D"};
    const std::map<std::string, double> truth{
        {"A", 4.0}, {"B", 1.0}, {"C", 2.5}, {"D", 0.5}};
    std::sort(order.begin(), order.end());
    do {
        CHECK(ndcg_at(order, truth, 4) <= 1.0 + 1e-12);
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("the ideal ordering attains the permutation maximum") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 5;  // 2..6 institutions
        std::map<std::string, double> truth;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "i" + std::to_string(i);
            truth[id] = reference::uniform01(rng) * 5.0;
            ids.push_back(id);
        }
        if (std::all_of(truth.begin(), truth.end(),
                        [](const auto& kv) { return kv.second == 0.0; }))
            truth[ids[0]] = 1.0;

        double best = 0.0;
        std::sort(ids.begin(), ids.end());
        do {
            best = std::max(best, dcg_at(ids, truth, n));
        } while (std::next_permutation(ids.begin(), ids.end()));

        std::vector<std::pair<std::string, double>> ideal(truth.begin(), truth.end());
        std::sort(ideal.begin(), ideal.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::string> ideal_order;
        for (const auto& [id, _] : ideal) ideal_order.push_back(id);
        CHECK(dcg_at(ideal_order, truth, n) == doctest::Approx(best).epsilon(1e-12));
        CHECK(std::abs(ndcg_at(ideal_order, truth, n) - 1.0) < 1e-12);
    }
}

TEST_CASE("swapping a low-gain item above a high-gain one lowers dcg") {
    const std::map<std::string, double> truth{{"A", 3.0}, {"B", 1.0}, {"C", 2.0}};
    const double good = dcg_at({"A", "C", "B"}, truth, 3);
    const double swapped = dcg_at({"A", "B", "C"}, truth, 3);
    CHECK(swapped < good);
}

TEST_CASE("ndcg is invariant under uniform positive scaling of gains") {
    const std::map<std::string, double> truth{{"A", 3.0}, {"B", 2.0}, {"C", 1.0}};
    std::map<std::string, double> scaled;
    for (const auto& [k, v] : truth) scaled[k] = 17.5 * v;
    const std::vector<std::string> order{"B", "A", "C"};
    CHECK(ndcg_at(order, truth, 3) ==
          doctest::Approx(ndcg_at(order, scaled, 3)).epsilon(1e-12));
}

TEST_CASE("institutions missing from the prediction still count in the ideal") {
    const std::map<std::string, double> truth{{"A", 3.0}, {"B", 2.0}};
    // Prediction covers only B; IDCG still includes A at the top slot.
    const double ndcg = ndcg_at({"B"}, truth, 2);
    const double expected = 2.0 / (3.0 + 2.0 / std::log2(3.0));
    CHECK(ndcg == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("validation errors") {
    const std::map<std::string, double> truth{{"A", 1.0}};
    CHECK_THROWS_AS(ndcg_at({"A"}, truth, 0), ArgumentError);
    CHECK_THROWS_AS(ndcg_at({"A", "A"}, truth, 2), ValidationError);
    CHECK_THROWS_AS(ndcg_at({"A"}, {{"A", 0.0}}, 1), ValidationError);
    CHECK_THROWS_AS(ndcg_at({"A"}, {{"A", -1.0}}, 1), ValidationError);
    CHECK_THROWS_AS(ndcg_at({"A"}, {}, 1), ValidationError);
}
