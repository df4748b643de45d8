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

#ifndef REGRET_MINER_CORE_HPP_
#define REGRET_MINER_CORE_HPP_

#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace regret_miner {

inline constexpr double kPi = std::numbers::pi;

// Simulation defaults shared by every world.
inline constexpr double kDefaultDt = 0.1;
inline constexpr int kDefaultSceneHorizon = 200;

// Disc footprints.
inline constexpr double kRobotRadius = 1.0;
inline constexpr double kCarRadius = 1.0;
inline constexpr double kTruckRadius = 1.8;
inline constexpr double kPedestrianRadius = 0.3;

enum class ErrorCode {
  kInvalidArgument,
  kNonFinite,
  kOutOfSupport,
  kIo,
  kSchema,
  kAborted,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure in the library is reported with this exception; the CLI maps
// code() onto its machine-readable error document.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// Heading is kept in [-pi, pi).
double WrapAngle(double angle);

struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct JointState {
  AgentState robot;
  std::vector<AgentState> humans;
  int t = 0;
  friend bool operator==(const JointState&, const JointState&) = default;
};

struct Action {
  double accel = 0.0;
  double turn_rate = 0.0;
  friend bool operator==(const Action&, const Action&) = default;
};

struct ActionTraj {
  std::vector<Action> actions;
  int start_t = 0;

  int size() const { return static_cast<int>(actions.size()); }
  bool empty() const { return actions.empty(); }
  // First `n` actions (or all of them when shorter).
  ActionTraj Prefix(int n) const;
  friend bool operator==(const ActionTraj&, const ActionTraj&) = default;
};

struct ActionBounds {
  double max_accel = 4.0;
  double max_turn_rate = 1.0;
  friend bool operator==(const ActionBounds&, const ActionBounds&) = default;
};

bool WithinBounds(const ActionTraj& traj, const ActionBounds& bounds,
                  double tolerance = 1e-12);

// Straight multi-lane road; traffic flows toward +x.
struct DrivingCorridor {
  std::vector<double> lane_centers = {0.0, 3.7};
  double lane_width = 3.7;
  double length = 400.0;
  double speed_limit = 12.0;
  friend bool operator==(const DrivingCorridor&, const DrivingCorridor&) =
      default;
};

// Open floor with a primary and a backup goal. The robot travels from
// robot_start toward goal_primary along +x.
struct NavWorld {
  Vec2 goal_primary{40.0, 0.0};
  Vec2 goal_backup{40.0, 6.0};
  Vec2 human_start{20.0, -5.0};
  Vec2 robot_start{0.0, 0.0};
  double speed_limit = 3.0;
  friend bool operator==(const NavWorld&, const NavWorld&) = default;
};

using Context = std::variant<DrivingCorridor, NavWorld>;

void ValidateContext(const Context& ctx);

// Lane geometry every context reduces to: reference lines parallel to +x.
struct LaneFrame {
  std::vector<double> centers;
  double width = 0.0;
  double speed_limit = 0.0;
};

LaneFrame LanesOf(const Context& ctx);
double NearestLaneCenter(const LaneFrame& lanes, double y);
int NearestLaneIndex(const LaneFrame& lanes, double y);

// Radii of the discs used for collision checks.
struct Footprints {
  double robot = kRobotRadius;
  std::vector<double> humans;
};

// ---------------------------------------------------------------------------
// Seeded randomness.

// A named, reproducible source of randomness. Two streams with the same
// (seed, stream_id) always produce identical draws, independent of the order
// in which scenes or threads consume them.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream Derive(std::uint64_t child) const;
  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t HashString(std::string_view s);

// Engine seeded from a stream. Distributions are implemented here rather than
// with <random> distributions so draws are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(const RngStream& stream);

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Uniform integer in [0, n).
  std::size_t Index(std::size_t n);
  std::size_t Categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Dynamics.

// One Euler step of the Dubins car: the pose advances at `speed` and the
// heading turns at `turn_rate`. The returned speed equals `speed`.
AgentState DubinsStep(const AgentState& state, double turn_rate, double speed,
                      double dt);

// Applies one (accel, turn_rate) action: pose advances with the current speed,
// then the speed integrates the acceleration, clamped at zero.
AgentState UnicycleStep(const AgentState& state, const Action& action,
                        double dt);

// States after each action; element 0 is the state after the first step.
std::vector<AgentState> UnicycleRollout(const AgentState& state,
                                        const ActionTraj& traj, double dt);

double Distance(const AgentState& a, const AgentState& b);

// max(0, radius_a + radius_b - center distance).
double FootprintOverlap(const AgentState& a, const AgentState& b,
                        double radius_a, double radius_b);

}  // namespace regret_miner

#endif  // REGRET_MINER_CORE_HPP_
