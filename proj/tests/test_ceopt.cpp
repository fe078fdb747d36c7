// Copyright 2026 The vpattack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "synthetic.hpp"

using namespace vpattack;
using namespace vpattack::ce;

namespace {

SearchSpace two_cells() { return SearchSpace{{BoundedInteger{0, 9, 2}}}; }

ScoredCandidate scored(Point x, const CellPartition& p, const CEDistribution& d, double score, std::size_t index = 0) {
    Candidate c;
    c.point = std::move(x);
    for (std::size_t k = 0; k < c.point.size(); ++k) {
        c.cells.push_back(p.cell_of(k, c.point[k]));
    }
    c.density = d.density(p, c.point);
    c.index = index;
    return {c, score};
}

}  // namespace

TEST(Partition, CoversRangeWithDisjointCells) {
    const SearchSpace s{{Categorical{3}, BoundedInteger{0, 255, 8}, BoundedInteger{5, 7, 8}}};
    const auto p = CellPartition::of(s);
    ASSERT_EQ(p.cells.size(), 3u);
    EXPECT_EQ(p.cells[0].size(), 3u);
    ASSERT_EQ(p.cells[1].size(), 8u);
    EXPECT_EQ(p.cells[2].size(), 3u);  // fewer values than bins
    for (std::size_t j = 0; j < 8; ++j) {
        EXPECT_EQ(p.cells[1][j], (Cell{static_cast<Value>(32 * j), static_cast<Value>(32 * j + 31)}));
    }
    for (Value v = 0; v <= 255; ++v) {
        EXPECT_TRUE(p.cells[1][p.cell_of(1, v)].contains(v));
    }
    EXPECT_THROW(p.cell_of(1, 256), InvalidParameter);
}

TEST(Partition, RejectsDegenerateCoordinates) {
    EXPECT_THROW(CellPartition::of(SearchSpace{{Categorical{0}}}), InvalidParameter);
    EXPECT_THROW(CellPartition::of(SearchSpace{{BoundedInteger{3, 2, 1}}}), InvalidParameter);
    EXPECT_THROW(CellPartition::of(SearchSpace{{BoundedInteger{0, 2, 0}}}), InvalidParameter);
    EXPECT_THROW(CellPartition::of(SearchSpace{}), InvalidParameter);
}

TEST(InitDistribution, UniformPerCoordinate) {
    const SearchSpace s{{Categorical{4}, Categorical{1}, BoundedInteger{0, 1, 2}, Categorical{3}}};
    const auto d = init_distribution(s, CellPartition::of(s));
    EXPECT_EQ(d.alpha[0], (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
    EXPECT_EQ(d.alpha[1], (std::vector<double>{1.0}));
    EXPECT_EQ(d.alpha[2], (std::vector<double>{0.5, 0.5}));
    for (const double m : d.alpha[3]) {
        EXPECT_DOUBLE_EQ(m, 1.0 / 3.0);
    }
}

TEST(Sample, ConcentratedDistributionStaysInCell) {
    for (std::size_t m : {2u, 5u, 10u}) {
        const SearchSpace s{{Categorical{m}}};
        const auto p = CellPartition::of(s);
        CEDistribution d{{std::vector<double>(m, 1e-3)}};
        d.alpha[0][m - 1] = 1.0 - static_cast<double>(m - 1) * 1e-3;
        const auto xs = sample(d, p, 1000, 42);
        const auto in = std::count_if(xs.begin(), xs.end(), [&](const Candidate& c) { return c.cells[0] == m - 1; });
        EXPECT_GE(in, 990) << "m=" << m;
    }
}

TEST(Sample, UniformFrequenciesWithinTolerance) {
    const SearchSpace s{{BoundedInteger{0, 99, 4}}};
    const auto p = CellPartition::of(s);
    const auto xs = sample(init_distribution(s, p), p, 100000, 3);
    std::array<int, 4> counts{};
    for (const auto& c : xs) {
        ++counts[c.cells[0]];
        EXPECT_TRUE(p.cells[0][c.cells[0]].contains(c.point[0]));
    }
    for (const int n : counts) {
        EXPECT_NEAR(n / 100000.0, 0.25, 0.01);
    }
}

TEST(Sample, DensityIsMassOverWidth) {
    const SearchSpace s{{Categorical{2}, BoundedInteger{0, 9, 2}}};
    const auto p = CellPartition::of(s);
    CEDistribution d{{{0.25, 0.75}, {0.6, 0.4}}};
    for (const auto& c : sample(d, p, 50, 9)) {
        const double expect = d.alpha[0][c.cells[0]] * d.alpha[1][c.cells[1]] / 5.0;
        EXPECT_DOUBLE_EQ(c.density, expect);
        EXPECT_DOUBLE_EQ(d.density(p, c.point), expect);
    }
}

TEST(Sample, ReproducibleFromSeed) {
    const auto s = fixtures::grid_space(5, 3, 256, 8);
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    const auto a = sample(d, p, 30, 77, 4);
    const auto b = sample(d, p, 30, 77, 4);
    const auto c = sample(d, p, 30, 78, 4);
    ASSERT_EQ(a.size(), b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].point, b[i].point);
        differs |= a[i].point != c[i].point;
    }
    EXPECT_TRUE(differs);
    EXPECT_THROW(sample(d, p, 0, 1), InvalidParameter);
}

TEST(SelectElites, TopScores) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    const auto e = select_elites({scored({1}, p, d, 3, 0), scored({2}, p, d, 1, 1), scored({3}, p, d, 2, 2)}, 2);
    ASSERT_EQ(e.candidates.size(), 2u);
    EXPECT_EQ(e.candidates[0].score, 3);
    EXPECT_EQ(e.candidates[1].score, 2);
}

TEST(SelectElites, TiesPreferDensityThenIndex) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const CEDistribution d{{{0.2, 0.8}}};
    // Scores equal; index 1 and 3 sit in the denser cell.
    const auto e = select_elites(
        {scored({0}, p, d, 1, 0), scored({7}, p, d, 1, 1), scored({1}, p, d, 1, 2), scored({9}, p, d, 1, 3)}, 3);
    EXPECT_EQ(e.candidates[0].candidate.index, 1u);
    EXPECT_EQ(e.candidates[1].candidate.index, 3u);
    EXPECT_EQ(e.candidates[2].candidate.index, 0u);
}

TEST(SelectElites, BoundaryAndErrors) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    std::vector<ScoredCandidate> all{scored({1}, p, d, 1, 0), scored({6}, p, d, 2, 1)};
    EXPECT_EQ(select_elites(all, 2).candidates.size(), 2u);
    EXPECT_THROW(select_elites(all, 3), InvalidParameter);
    EXPECT_THROW(select_elites(all, 0), InvalidParameter);
}

TEST(UpdateDistribution, Concentration) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    const EliteSet e{{scored({0}, p, d, 2, 0), scored({3}, p, d, 1, 1)}};
    const auto next = update_distribution(d, p, e, UpdateParams{0.0, 0.0, 1e-6});
    EXPECT_EQ(next.alpha[0], (std::vector<double>{1.0, 0.0}));
}

TEST(UpdateDistribution, Symmetry) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    const EliteSet e{{scored({1}, p, d, 4, 0), scored({8}, p, d, 4, 1)}};
    const auto next = update_distribution(d, p, e, UpdateParams{0.0, 0.0, 1e-6});
    EXPECT_EQ(next.alpha[0], (std::vector<double>{0.5, 0.5}));
}

TEST(UpdateDistribution, HandMixedSmoothing) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const auto d = init_distribution(s, p);
    const EliteSet e{{scored({2}, p, d, 1, 0)}};
    // 0.5 * (1, 0) + 0.5 * (0.5, 0.5)
    const auto next = update_distribution(d, p, e, UpdateParams{0.5, 0.0, 1e-6});
    EXPECT_EQ(next.alpha[0], (std::vector<double>{0.75, 0.25}));
}

TEST(UpdateDistribution, ImportanceWeightsDivideByDensity) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const CEDistribution d{{{0.8, 0.2}}};
    // Equal scores: gamma ratio is the inverse density ratio, 0.2 : 0.8.
    const EliteSet e{{scored({0}, p, d, 1, 0), scored({9}, p, d, 1, 1)}};
    const auto next = update_distribution(d, p, e, UpdateParams{0.0, 0.0, 0.0});
    EXPECT_NEAR(next.alpha[0][0], 0.2, 1e-12);
    EXPECT_NEAR(next.alpha[0][1], 0.8, 1e-12);
}

TEST(UpdateDistribution, AllZeroSurrogateKeepsDistribution) {
    const auto s = two_cells();
    const auto p = CellPartition::of(s);
    const CEDistribution d{{{0.3, 0.7}}};
    const EliteSet e{{scored({0}, p, d, 0, 0), scored({9}, p, d, 0, 1)}};
    EXPECT_EQ(update_distribution(d, p, e, UpdateParams{0.0, 0.0, 0.0}).alpha, d.alpha);
}

TEST(UpdateDistribution, FloorKeepsSupportAndNormalization) {
    const auto s = fixtures::grid_space(6, 2, 64, 16);
    const auto p = CellPartition::of(s);
    auto d = init_distribution(s, p);
    for (int h = 0; h < 40; ++h) {
        const auto xs = sample(d, p, 20, 5, static_cast<std::uint64_t>(h));
        std::vector<ScoredCandidate> sc;
        for (const auto& c : xs) {
            sc.push_back({c, static_cast<double>(c.point[0] == 2) + static_cast<double>(c.point[1]) / 64.0});
        }
        d = update_distribution(d, p, select_elites(sc, 5), UpdateParams{0.3, 1e-3, 1e-6});
        EXPECT_NO_THROW(d.validate(1e-3));
    }
    EXPECT_GT(d.alpha[0][2], 0.9);
}

TEST(ApplyFloor, WaterFilling) {
    const auto v = apply_floor({0.0, 0.0, 1.0}, 0.1);
    EXPECT_NEAR(v[0], 0.1, 1e-15);
    EXPECT_NEAR(v[1], 0.1, 1e-15);
    EXPECT_NEAR(v[2], 0.8, 1e-15);
    const auto w = apply_floor({0.05, 0.15, 0.8}, 0.1);
    EXPECT_NEAR(w[0], 0.1, 1e-15);
    EXPECT_NEAR(w[1] / w[2], 0.15 / 0.8, 1e-12);
    EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-12);
    EXPECT_THROW(apply_floor({0.5, 0.5}, 0.6), InvalidParameter);
}

TEST(Optimize, PerfectScoreStopsEarly) {
    const auto s = fixtures::grid_space(3, 1, 4, 4);
    Budget b;
    b.target_score = 1.0;
    std::atomic<int> calls{0};
    const auto r = optimize(s, [&](const Point&) { ++calls; return 1.0; }, b);
    EXPECT_EQ(r.trace.size(), 1u);
    EXPECT_EQ(calls.load(), 20);
    EXPECT_EQ(r.best_score, 1.0);
}

TEST(Optimize, InvalidBudgets) {
    const auto s = fixtures::grid_space(3, 1, 4, 4);
    const auto f = [](const Point&) { return 0.0; };
    Budget b;
    b.max_iterations = 0;
    EXPECT_THROW(optimize(s, f, b), InvalidParameter);
    b = Budget{};
    b.n_elite = b.n_samples;
    EXPECT_THROW(optimize(s, f, b), InvalidParameter);
}

TEST(Optimize, BestSoFarIsMonotoneAndMatchesTrace) {
    const auto s = fixtures::grid_space(10, 3, 8, 8);
    const fixtures::PeakObjective f{s, fixtures::optimum_for(s, 3)};
    Budget b;
    b.seed = 11;
    b.workers = 4;
    const auto r = optimize(s, f, b);
    ASSERT_EQ(r.trace.size(), b.max_iterations);
    for (std::size_t h = 1; h < r.trace.size(); ++h) {
        EXPECT_GE(r.trace[h].best_score, r.trace[h - 1].best_score);
        EXPECT_LE(r.trace[h].iteration_best, r.trace[h].best_score);
    }
    EXPECT_EQ(r.best_score, f(r.best_point));
    EXPECT_EQ(r.best_score, r.trace.back().best_score);
    EXPECT_EQ(r.evaluations, 600u);
}

TEST(Optimize, DeterministicAcrossWorkerCounts) {
    const auto s = fixtures::grid_space(10, 3, 8, 8);
    const fixtures::PeakObjective f{s, fixtures::optimum_for(s, 4)};
    Budget b;
    b.seed = 5;
    b.max_iterations = 8;
    b.workers = 1;
    const auto a = optimize(s, f, b);
    b.workers = 6;
    const auto c = optimize(s, f, b);
    EXPECT_EQ(a.best_point, c.best_point);
    ASSERT_EQ(a.trace.size(), c.trace.size());
    for (std::size_t h = 0; h < a.trace.size(); ++h) {
        EXPECT_EQ(a.trace[h].alpha.alpha, c.trace[h].alpha.alpha);
    }
}

TEST(Optimize, EvaluationBudgetTruncates) {
    const auto s = fixtures::grid_space(10, 3, 8, 8);
    const fixtures::PeakObjective f{s, fixtures::optimum_for(s, 1)};
    Budget b;
    b.max_evaluations = 50;
    const auto r = optimize(s, f, b);
    EXPECT_TRUE(r.truncated);
    EXPECT_EQ(r.evaluations, 50u);
    EXPECT_EQ(r.trace.size(), 3u);
}

TEST(Optimize, FindsUniqueOptimumOnTenByEightPowSix) {
    // 10 x 8^3 x 8^3 points; ground truth from the objective's construction,
    // confirmed by enumeration on a reduced copy below.
    const auto s = fixtures::grid_space(10, 6, 8, 8);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const fixtures::PeakObjective f{s, fixtures::optimum_for(s, seed)};
        Budget b;
        b.seed = seed;
        const auto r = optimize(s, f, b);
        hits += r.best_point == f.optimum ? 1 : 0;
    }
    EXPECT_GE(hits, 18);
}

TEST(PeakObjective, BruteForceConfirmsUniqueMaximum) {
    const auto s = fixtures::grid_space(4, 3, 8, 8);
    const fixtures::PeakObjective f{s, fixtures::optimum_for(s, 2)};
    Point arg;
    const auto [best, count] = fixtures::brute_force_max(s, f, &arg);
    EXPECT_EQ(count, 1u);
    EXPECT_EQ(arg, f.optimum);
    EXPECT_EQ(best, f(f.optimum));
}
