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

#include "fixtures.hpp"
#include "vpattack/attack_space.hpp"

using namespace vpattack;

namespace {

struct ObjectiveFixture : ::testing::Test {
    LabelSpace space = fixtures::drive_space();
    SimulatedOracle oracle{space, fixtures::drive_oracle_config()};
    Dictionary dict{{{"helipad", 0.0, 0}, {"proceed", 0.0, 1}, {"go", 0.0, 2}}};
    AttackContext ctx{dict, space, oracle, TargetPrompt("Proceed or brake?"), 2, std::nullopt};

    AttackParams pi(std::size_t i, Rgb fg = kBlack, Rgb bg = kWhite) const {
        return AttackParams{i, SignSpec{dict.at(i).phrase, fg, bg, 1, 3}, PlacementSpec{}, 1.0};
    }
};

}  // namespace

TEST_F(ObjectiveFixture, AllAndNone) {
    const auto s = fixtures::blank_scenarios(space, 4);
    EXPECT_EQ(objective_score(pi(1), s, ctx), 4);
    EXPECT_EQ(objective_score(pi(0), s, ctx), 0);
}

TEST_F(ObjectiveFixture, ThreeOfFiveLegible) {
    auto s = fixtures::blank_scenarios(space, 5);
    // Enlarged frames push the sign below the 0.5% area threshold:
    // the "proceed" sign is 62x20 px, so 1240 / (600*600) < 0.005 < 1240 / (96*64).
    s[1].image = Image(600, 600, Rgb{30, 30, 30});
    s[4].image = Image(600, 600, Rgb{31, 30, 30});
    EXPECT_EQ(objective_score(pi(1), s, ctx), 3);
}

TEST_F(ObjectiveFixture, LabelsOutsideSpaceRejected) {
    const LabelSpace other({"left", "right"});
    auto s = fixtures::blank_scenarios(space, 1);
    s[0].benign_label = other.label("left");
    s[0].target_label = other.label("right");
    EXPECT_THROW(objective_score(pi(1), s, ctx), ConfigError);
}

TEST_F(ObjectiveFixture, PlacementFailureIsNonSuccess) {
    const auto s = fixtures::blank_scenarios(space, 2);
    auto p = pi(1);
    p.placement.tx = 1000;
    const auto out = evaluate_all(ctx, s, p);
    EXPECT_FALSE(out[0].success);
    EXPECT_NE(out[0].failure.find("placement"), std::string::npos);
    EXPECT_EQ(objective_score(p, s, ctx), 0);
}

TEST_F(ObjectiveFixture, NonRefusalQueryErrorsPropagateWithScenarioId) {
    class Broken final : public Oracle {
    public:
        std::string provider_id() const override { return "broken"; }
        OracleResponse query(const OracleRequest&) override { throw QueryError("boom", true); }
    } broken;
    AttackContext c{dict, space, broken, TargetPrompt("p"), 1, std::nullopt};
    const auto s = fixtures::blank_scenarios(space, 2);
    try {
        objective_score(pi(1), s, c);
        FAIL();
    } catch (const QueryError& e) {
        EXPECT_EQ(e.scenario_id(), "s0");
        EXPECT_TRUE(e.retryable());
    }
}

TEST_F(ObjectiveFixture, AttackSpaceShapeAndDecode) {
    AttackSpaceConfig cfg;
    cfg.scales = {0.5, 1.0};
    cfg.rotations = {0.0, 0.25};
    cfg.placement.tx = 3;
    const AttackSpace as(dict, cfg);
    const auto ss = as.search_space();
    ASSERT_EQ(ss.coordinates.size(), 9u);
    EXPECT_EQ(std::get<ce::Categorical>(ss.coordinates[0]).size, 3u);
    EXPECT_EQ(as.coordinate_names().back(), "rotation");
    const auto p = as.decode({2, 1, 2, 3, 250, 251, 252, 1, 1});
    EXPECT_EQ(p.sign.text, "go");
    EXPECT_EQ(p.sign.letter_color, (Rgb{1, 2, 3}));
    EXPECT_EQ(p.sign.background_color, (Rgb{250, 251, 252}));
    EXPECT_DOUBLE_EQ(p.placement.scale, 1.0);
    EXPECT_DOUBLE_EQ(p.placement.rotation, 0.25);
    EXPECT_DOUBLE_EQ(p.placement.tx, 3.0);
    EXPECT_NO_THROW(p.validate(dict));
    EXPECT_THROW(as.decode({0, 1, 2}), InvalidParameter);
    const auto n = as.naive(1);
    EXPECT_EQ(n.sign.letter_color, kBlack);
    EXPECT_EQ(n.sign.background_color, kWhite);
    EXPECT_EQ(n.sign.text, "proceed");
    EXPECT_THROW(AttackSpace(Dictionary{}, cfg), ConfigError);
}

TEST_F(ObjectiveFixture, OptimizeAttackFindsLegibleKeyword) {
    const auto s = fixtures::blank_scenarios(space, 6);
    const AttackSpace as(dict, AttackSpaceConfig{});
    ce::Budget b;
    b.seed = 3;
    b.workers = 4;
    const auto r = optimize_attack(as, s, ctx, b);
    EXPECT_EQ(r.best_score, 6);
    EXPECT_NE(r.best_pi.sign.text, "helipad");
    EXPECT_GE(contrast_ratio(r.best_pi.sign.letter_color, r.best_pi.sign.background_color), 4.5);
    EXPECT_LE(r.raw.trace.size(), 30u);
}

TEST_F(ObjectiveFixture, OptimizeAttackIsSeedDeterministic) {
    const auto s = fixtures::blank_scenarios(space, 3);
    const AttackSpace as(dict, AttackSpaceConfig{});
    ce::Budget b;
    b.seed = 21;
    b.max_iterations = 4;
    b.workers = 3;
    const auto a = optimize_attack(as, s, ctx, b);
    const auto c = optimize_attack(as, s, ctx, b);
    EXPECT_EQ(a.raw.best_point, c.raw.best_point);
    EXPECT_EQ(a.raw.trace.size(), c.raw.trace.size());
}
