#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "icp4d/assignment.hpp"
#include "icp4d/geometry.hpp"
#include "icp4d/rng.hpp"
#include "oracles/oracle_assignment.hpp"

using namespace icp4d;
using namespace icp4d::testing;

TEST_SUITE_BEGIN("assignment");

namespace {

AcceptedMatch triple(uint32_t s, uint32_t d, const RigidTransform& t, double iou) {
  return {s, d, t, iou};
}

double table_total(const std::vector<CostEntry>& table, const Assignment& chosen) {
  double sum = 0.0;
  for (const auto& [s, d] : chosen)
    for (const CostEntry& e : table)
      if (e.src_id == s && e.dst_id == d) sum += e.cost.total();
  return sum;
}

}  // namespace

TEST_CASE("cost components and per-frame normalization") {
  SUBCASE("identity transform with perfect overlap costs nothing") {
    const auto table = build_cost({triple(1, 2, RigidTransform{}, 1.0)});
    REQUIRE(table.size() == 1);
    CHECK(table[0].cost.total() == 0.0);
  }

  SUBCASE("translation magnitudes scale against the frame maximum") {
    RigidTransform t1, t2;
    t1.translation = {1, 0, 0};
    t2.translation = {0, -2, 0};
    const auto table = build_cost({triple(1, 1, t1, 1.0), triple(2, 2, t2, 1.0)});
    REQUIRE(table.size() == 2);
    CHECK(table[0].cost.c_t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(table[1].cost.c_t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(table[0].cost.c_r == 0.0);
    CHECK(table[1].cost.c_r == 0.0);
  }

  SUBCASE("quarter turn carries angle pi/2 before normalization") {
    RigidTransform t;
    t.rotation = rot_z(std::numbers::pi / 2);
    AssignmentConfig cfg;
    cfg.normalization = AssignmentConfig::Normalization::kFixedScales;
    const auto table = build_cost({triple(1, 1, t, 1.0)}, cfg);
    REQUIRE(table.size() == 1);
    CHECK(table[0].cost.c_r == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  }

  SUBCASE("all-zero terms stay zero under max-normalization") {
    const auto table =
        build_cost({triple(1, 1, RigidTransform{}, 0.5), triple(2, 2, RigidTransform{}, 0.25)});
    for (const CostEntry& e : table) {
      CHECK(e.cost.c_t == 0.0);
      CHECK(e.cost.c_r == 0.0);
    }
    CHECK(table[0].cost.c_s == doctest::Approx(0.5));
    CHECK(table[1].cost.c_s == doctest::Approx(0.75));
  }
}

TEST_CASE("greedy selection order") {
  SUBCASE("disjoint pairs all match") {
    std::vector<CostEntry> table;
    for (uint32_t i = 1; i <= 4; ++i) table.push_back({i, i + 10, 0.5, {}});
    const Assignment got = assign_greedy(table);
    REQUIRE(got.size() == 4);
    for (uint32_t i = 1; i <= 4; ++i) CHECK(got[i - 1] == std::pair{i, i + 10});
  }

  SUBCASE("higher iou wins a contested destination") {
    std::vector<CostEntry> table{{1, 5, 0.9, {}}, {2, 5, 0.8, {}}};
    const Assignment got = assign_greedy(table);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == std::pair{1u, 5u});
  }

  SUBCASE("equal ious fall back to the cheaper pair") {
    CostEntry cheap{2, 5, 0.7, {}}, dear{1, 5, 0.7, {}};
    cheap.cost.c_t = 0.1;
    dear.cost.c_t = 0.3;
    const Assignment got = assign_greedy({dear, cheap});
    REQUIRE(got.size() == 1);
    CHECK(got[0] == std::pair{2u, 5u});
  }

  SUBCASE("input order never matters") {
    Rng rng(701);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<CostEntry> table;
      for (uint32_t s = 1; s <= 5; ++s)
        for (uint32_t d = 1; d <= 5; ++d) {
          if (rng.uniform01() < 0.4) continue;
          CostEntry e{s, d, rng.uniform(0.2, 1.0), {}};
          e.cost.c_t = rng.uniform(0.0, 1.0);
          table.push_back(e);
        }
      const Assignment base = assign_greedy(table);
      auto shuffled = table;
      rng.shuffle(shuffled);
      CHECK(assign_greedy(shuffled) == base);
    }
  }
}

TEST_CASE("hungarian on pinned tables") {
  SUBCASE("clean diagonal") {
    const auto got = hungarian_min_cost({{0.1, 0.9}, {0.9, 0.1}});
    REQUIRE(got.size() == 2);
    CHECK(got[0] == 0);
    CHECK(got[1] == 1);
  }

  SUBCASE("a full matching beats a cheaper partial one") {
    const auto got = hungarian_min_cost({{0.1, 0.2}, {0.15, kSentinelCost}});
    REQUIRE(got.size() == 2);
    CHECK(got[0] == 1);
    CHECK(got[1] == 0);
  }

  SUBCASE("rectangular table assigns exactly two rows") {
    const std::vector<std::vector<double>> cost{{3.0, 1.0}, {2.0, 4.0}, {0.5, 6.0}};
    const auto got = hungarian_min_cost(cost);
    int matched = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
      if (got[i] >= 0) {
        ++matched;
        total += cost[i][static_cast<std::size_t>(got[i])];
      }
    const auto want = oracles::oracle_assignment(cost, kSentinelCost);
    CHECK(matched == 2);
    CHECK(static_cast<std::size_t>(matched) == want.matched);
    CHECK(total == doctest::Approx(want.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("hungarian equals the exhaustive oracle on random tables") {
  Rng rng(702);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = 1 + rng.below(6);
    const std::size_t cols = 1 + rng.below(6);
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (auto& row : cost)
      for (double& c : row) c = rng.uniform01() < 0.25 ? kSentinelCost : rng.uniform(0.0, 10.0);

    const auto got = hungarian_min_cost(cost);
    std::size_t matched = 0;
    double total = 0.0;
    std::set<int> cols_used;
    for (std::size_t i = 0; i < rows; ++i) {
      if (got[i] < 0) continue;
      ++matched;
      total += cost[i][static_cast<std::size_t>(got[i])];
      CHECK(cols_used.insert(got[i]).second);  // injective
      CHECK(cost[i][static_cast<std::size_t>(got[i])] < kSentinelCost);
    }
    const auto want = oracles::oracle_assignment(cost, kSentinelCost);
    CHECK(matched == want.matched);
    CHECK(total == doctest::Approx(want.total_cost).epsilon(1e-9));
  }
}

TEST_CASE("hungarian never costs more than greedy") {
  Rng rng(703);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CostEntry> table;
    for (uint32_t s = 1; s <= 5; ++s)
      for (uint32_t d = 1; d <= 5; ++d) {
        if (rng.uniform01() < 0.3) continue;
        CostEntry e{s, d, rng.uniform(0.2, 1.0), {}};
        e.cost.c_t = rng.uniform(0.0, 1.0);
        e.cost.c_r = rng.uniform(0.0, 1.0);
        e.cost.c_s = 1.0 - e.iou;
        table.push_back(e);
      }
    if (table.empty()) continue;

    const Assignment greedy = assign_greedy(table);
    const Assignment optimal = assign_hungarian(table);

    std::set<uint32_t> srcs, dsts;
    for (const auto& [s, d] : optimal) {
      CHECK(srcs.insert(s).second);
      CHECK(dsts.insert(d).second);
    }
    // with everything pairwise comparable, both cover the same cardinality;
    // the optimal one can only be cheaper
    if (greedy.size() == optimal.size())
      CHECK(table_total(table, optimal) <= table_total(table, greedy) + 1e-12);
  }
}

TEST_SUITE_END();
