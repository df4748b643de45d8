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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace regret_miner {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kNonFinite:
      return "non_finite";
    case ErrorCode::kOutOfSupport:
      return "out_of_support";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kSchema:
      return "schema";
    case ErrorCode::kAborted:
      return "aborted";
  }
  return "unknown";
}

double WrapAngle(double angle) {
  double wrapped = std::fmod(angle + kPi, 2.0 * kPi);
  if (wrapped < 0.0) wrapped += 2.0 * kPi;
  wrapped -= kPi;
  // fmod can land exactly on +pi after the shift due to rounding.
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  return wrapped;
}

ActionTraj ActionTraj::Prefix(int n) const {
  ActionTraj out;
  out.start_t = start_t;
  const int len = std::clamp(n, 0, size());
  out.actions.assign(actions.begin(), actions.begin() + len);
  return out;
}

bool WithinBounds(const ActionTraj& traj, const ActionBounds& bounds,
                  double tolerance) {
  return std::all_of(traj.actions.begin(), traj.actions.end(),
                     [&](const Action& a) {
                       return std::abs(a.accel) <= bounds.max_accel + tolerance &&
                              std::abs(a.turn_rate) <=
                                  bounds.max_turn_rate + tolerance;
                     });
}

void ValidateContext(const Context& ctx) {
  if (const auto* road = std::get_if<DrivingCorridor>(&ctx)) {
    if (road->lane_centers.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "driving corridor needs at least one lane");
    }
    if (!(road->lane_width > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "lane width must be positive");
    }
  } else {
    const auto& nav = std::get<NavWorld>(ctx);
    if (nav.goal_primary == nav.goal_backup) {
      throw Error(ErrorCode::kInvalidArgument, "nav goals must be distinct");
    }
  }
}

LaneFrame LanesOf(const Context& ctx) {
  if (const auto* road = std::get_if<DrivingCorridor>(&ctx)) {
    return {road->lane_centers, road->lane_width, road->speed_limit};
  }
  const auto& nav = std::get<NavWorld>(ctx);
  // The nav floor has one virtual lane along the start-goal line.
  return {{nav.robot_start.y}, 2.0, nav.speed_limit};
}

int NearestLaneIndex(const LaneFrame& lanes, double y) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(lanes.centers.size()); ++i) {
    const double d = std::abs(lanes.centers[i] - y);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

double NearestLaneCenter(const LaneFrame& lanes, double y) {
  if (lanes.centers.empty()) return y;
  return lanes.centers[NearestLaneIndex(lanes, y)];
}

// ---------------------------------------------------------------------------

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashString(std::string_view s) {
  // FNV-1a followed by a finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(h);
}

RngStream RngStream::Derive(std::uint64_t child) const {
  return {seed, SplitMix64(stream_id ^ SplitMix64(child + 0x51ed2701ULL))};
}

Rng::Rng(const RngStream& stream)
    : engine_(SplitMix64(stream.seed ^ SplitMix64(stream.stream_id))) {}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  // Box-Muller; one variate per call keeps the draw count predictable.
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::size_t Rng::Index(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Index(0)");
  return static_cast<std::size_t>(Uniform() * static_cast<double>(n)) % n;
}

std::size_t Rng::Categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "categorical draw needs positive total weight");
  }
  const double u = Uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding can leave u == total; return the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

// ---------------------------------------------------------------------------

namespace {

bool Finite(const AgentState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) &&
         std::isfinite(s.heading) && std::isfinite(s.speed);
}

std::string Describe(const AgentState& s) {
  std::ostringstream os;
  os << "(x=" << s.x << ", y=" << s.y << ", heading=" << s.heading
     << ", speed=" << s.speed << ")";
  return os.str();
}

}  // namespace

AgentState DubinsStep(const AgentState& state, double turn_rate, double speed,
                      double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument, "dubins step needs dt > 0");
  }
  if (!Finite(state) || !std::isfinite(turn_rate) || !std::isfinite(speed)) {
    throw Error(ErrorCode::kNonFinite,
                "non-finite dubins input: state " + Describe(state) +
                    ", turn_rate " + std::to_string(turn_rate) + ", speed " +
                    std::to_string(speed));
  }
  AgentState next;
  next.x = state.x + speed * std::cos(state.heading) * dt;
  next.y = state.y + speed * std::sin(state.heading) * dt;
  next.heading = WrapAngle(state.heading + turn_rate * dt);
  next.speed = speed;
  return next;
}

AgentState UnicycleStep(const AgentState& state, const Action& action,
                        double dt) {
  if (!std::isfinite(action.accel)) {
    throw Error(ErrorCode::kNonFinite, "non-finite acceleration");
  }
  AgentState next = DubinsStep(state, action.turn_rate, state.speed, dt);
  next.speed = std::max(0.0, state.speed + action.accel * dt);
  return next;
}

std::vector<AgentState> UnicycleRollout(const AgentState& state,
                                        const ActionTraj& traj, double dt) {
  if (traj.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rollout of an empty trajectory");
  }
  std::vector<AgentState> out;
  out.reserve(traj.actions.size());
  AgentState s = state;
  for (const Action& a : traj.actions) {
    s = UnicycleStep(s, a, dt);
    out.push_back(s);
  }
  return out;
}

double Distance(const AgentState& a, const AgentState& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double FootprintOverlap(const AgentState& a, const AgentState& b,
                        double radius_a, double radius_b) {
  return std::max(0.0, radius_a + radius_b - Distance(a, b));
}

}  // namespace regret_miner
