// Copyright 2026 The regret_miner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "regret_miner/core.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

namespace regret_miner {
namespace {

TEST(DubinsStep, StraightLine) {
  const AgentState s = DubinsStep({0.0, 0.0, 0.0, 1.0}, 0.0, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(s.x, 0.1);
  EXPECT_DOUBLE_EQ(s.y, 0.0);
  EXPECT_DOUBLE_EQ(s.heading, 0.0);
  EXPECT_DOUBLE_EQ(s.speed, 1.0);
}

TEST(DubinsStep, AxisAligned) {
  const AgentState s = DubinsStep({0.0, 0.0, kPi / 2.0, 1.0}, 0.0, 1.0, 0.5);
  EXPECT_NEAR(s.x, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.y, 0.5);
  EXPECT_DOUBLE_EQ(s.heading, kPi / 2.0);
}

TEST(DubinsStep, ConvergesToExactArc) {
  // Forward Euler: the endpoint error against the closed-form arc shrinks in
  // proportion to the step.
  const auto error = [](double dt, int steps) {
    AgentState s{0.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < steps; ++i) s = DubinsStep(s, 0.3, 1.0, dt);
    const double t = dt * steps;
    return std::hypot(s.x - std::sin(0.3 * t) / 0.3,
                      s.y - (1.0 - std::cos(0.3 * t)) / 0.3);
  };
  const double coarse = error(0.1, 100);
  const double fine = error(0.01, 1000);
  EXPECT_LT(fine, 1e-2);
  EXPECT_GT(coarse / fine, 8.0);
  EXPECT_LT(coarse / fine, 12.0);
}

TEST(DubinsStep, RejectsBadInput) {
  EXPECT_THROW(DubinsStep({}, 0.0, 1.0, 0.0), Error);
  try {
    DubinsStep({std::nan(""), 0.0, 0.0, 0.0}, 0.0, 1.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(UnicycleRollout, FixedPointAtRest) {
  ActionTraj traj;
  traj.actions.assign(5, Action{});
  const AgentState init{1.0, 2.0, 0.4, 0.0};
  for (const AgentState& s : UnicycleRollout(init, traj, 0.1)) {
    EXPECT_EQ(s.x, init.x);
    EXPECT_EQ(s.y, init.y);
    EXPECT_NEAR(s.heading, init.heading, 1e-12);
    EXPECT_EQ(s.speed, 0.0);
  }
}

TEST(UnicycleRollout, ConstantAccel) {
  ActionTraj traj;
  traj.actions.assign(3, Action{1.0, 0.0});
  const auto states = UnicycleRollout({}, traj, 1.0);
  ASSERT_EQ(states.size(), 3u);
  EXPECT_DOUBLE_EQ(states[0].speed, 1.0);
  EXPECT_DOUBLE_EQ(states[1].speed, 2.0);
  EXPECT_DOUBLE_EQ(states[2].speed, 3.0);
}

TEST(UnicycleRollout, ComposesSteps) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ActionTraj traj;
  for (int i = 0; i < 30; ++i) traj.actions.push_back({2.0 * u(gen), u(gen)});
  const AgentState init{0.0, 0.0, 0.2, 5.0};
  const auto states = UnicycleRollout(init, traj, 0.1);
  AgentState s = init;
  for (std::size_t i = 0; i < traj.actions.size(); ++i) {
    const double speed = s.speed;
    s = DubinsStep(s, traj.actions[i].turn_rate, speed, 0.1);
    s.speed = std::max(0.0, speed + traj.actions[i].accel * 0.1);
    EXPECT_EQ(states[i], s);
  }
}

TEST(FootprintOverlap, Cases) {
  EXPECT_DOUBLE_EQ(FootprintOverlap({0, 0, 0, 0}, {5, 0, 0, 0}, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(FootprintOverlap({0, 0, 0, 0}, {0, 0, 0, 0}, 1.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(FootprintOverlap({0, 0, 0, 0}, {1.5, 0, 0, 0}, 1.0, 1.0), 0.5);
}

TEST(WrapAngle, StaysInRange) {
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = WrapAngle(a);
    EXPECT_GT(w, -kPi - 1e-12);
    EXPECT_LE(w, kPi + 1e-12);
    EXPECT_NEAR(std::remainder(w - a, 2.0 * kPi), 0.0, 1e-9);
  }
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  const RngStream root{42, 0};
  Rng a(root.Derive(1)), b(root.Derive(1)), c(root.Derive(2));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    seen.insert(x);
    seen.insert(c.NextU64());
  }
  EXPECT_EQ(seen.size(), 20u);
}

TEST(Rng, UniformAndIndexRanges) {
  Rng r(RngStream{7, 0});
  for (int i = 0; i < 1000; ++i) {
    const double u = r.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.Index(7), 7u);
  }
  const std::vector<double> w = {0.0, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r.Categorical(w), 1u);
}

TEST(ActionTraj, Prefix) {
  ActionTraj t;
  t.start_t = 4;
  t.actions = {{1, 0}, {2, 0}, {3, 0}};
  EXPECT_EQ(t.Prefix(2).size(), 2);
  EXPECT_EQ(t.Prefix(2).start_t, 4);
  EXPECT_EQ(t.Prefix(10).size(), 3);
}

TEST(WithinBounds, ChecksBothChannels) {
  ActionTraj t;
  t.actions = {{4.0, 1.0}};
  EXPECT_TRUE(WithinBounds(t, {}));
  t.actions = {{4.5, 0.0}};
  EXPECT_FALSE(WithinBounds(t, {}));
  t.actions = {{0.0, -1.2}};
  EXPECT_FALSE(WithinBounds(t, {}));
}

}  // namespace
}  // namespace regret_miner
