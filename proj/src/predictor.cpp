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

#include "regret_miner/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regret_miner {

int BucketFeatures::Index() const {
  return ((speed * kDistanceBuckets + distance) * 2 + (approaching ? 1 : 0)) *
             kLaneBuckets +
         lane;
}

ModeVector PredictorParams::Logits(int bucket) const {
  const ModeVector& c = counts.at(static_cast<std::size_t>(bucket));
  const double total =
      std::accumulate(c.begin(), c.end(), 0.0) + kNumBehaviorModes * smoothing;
  ModeVector logits{};
  for (int m = 0; m < kNumBehaviorModes; ++m) {
    // An empty bucket without smoothing falls back to uniform.
    const double p = total > 0.0 ? (c[m] + smoothing) / total
                                 : 1.0 / kNumBehaviorModes;
    logits[m] = std::log(std::max(p, 1e-300));
  }
  return logits;
}

ModeVector PredictorParams::Probabilities(int bucket) const {
  return Softmax(Logits(bucket));
}

void ValidateParams(const PredictorParams& params) {
  if (params.counts.size() != static_cast<std::size_t>(kNumBuckets)) {
    throw Error(ErrorCode::kSchema, "predictor needs one count row per bucket");
  }
  if (!(params.smoothing >= 0.0) || params.history_window < 1 ||
      params.label_window < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid predictor constants");
  }
  for (const ModeVector& row : params.counts) {
    for (double c : row) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "predictor counts must be finite and non-negative");
      }
    }
  }
}

ModeVector Softmax(const ModeVector& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  ModeVector out{};
  double total = 0.0;
  for (int m = 0; m < kNumBehaviorModes; ++m) {
    out[m] = std::exp(logits[m] - top);
    total += out[m];
  }
  for (double& p : out) p /= total;
  return out;
}

namespace {

int SpeedBucket(double v) {
  if (v < 0.1) return 0;
  if (v < 3.0) return 1;
  if (v < 7.0) return 2;
  return 3;
}

int DistanceBucket(double d) {
  if (d < 10.0) return 0;
  if (d < 25.0) return 1;
  return 2;
}

int LaneBucket(const AgentState& human, const AgentState& robot,
               const Context& ctx) {
  if (std::abs(std::sin(human.heading)) > 0.5) return 2;
  const LaneFrame lanes = LanesOf(ctx);
  const int idx = NearestLaneIndex(lanes, human.y);
  if (std::abs(lanes.centers[idx] - human.y) > lanes.width / 2.0) return 2;
  return idx == NearestLaneIndex(lanes, robot.y) ? 0 : 1;
}

}  // namespace

BucketFeatures ComputeFeatures(const PredictorParams& params,
                               const JointState& joint,
                               std::span<const JointState> history,
                               const ActionTraj& ego, const Context& ctx,
                               int human, double dt) {
  const auto hi = static_cast<std::size_t>(human);
  const AgentState& self = joint.humans.at(hi);
  BucketFeatures f;

  double speed_sum = self.speed;
  int n = 1;
  const int prior = std::min<int>(params.history_window - 1,
                                  static_cast<int>(history.size()));
  for (int k = 0; k < prior; ++k) {
    const JointState& past = history[history.size() - 1 - k];
    if (past.humans.size() != joint.humans.size()) {
      throw Error(ErrorCode::kInvalidArgument, "history human count mismatch");
    }
    speed_sum += past.humans[hi].speed;
    ++n;
  }
  f.speed = SpeedBucket(speed_sum / n);
  f.distance = DistanceBucket(Distance(self, joint.robot));
  f.lane = LaneBucket(self, joint.robot, ctx);

  // Ego-conditioning: does this candidate bring the robot close to where the
  // human would be at constant velocity?
  if (!ego.empty()) {
    const std::vector<AgentState> robot = UnicycleRollout(joint.robot, ego, dt);
    const double vx = self.speed * std::cos(self.heading);
    const double vy = self.speed * std::sin(self.heading);
    for (std::size_t k = 0; k < robot.size(); ++k) {
      const double tk = static_cast<double>(k + 1) * dt;
      const double d = std::hypot(robot[k].x - (self.x + vx * tk),
                                  robot[k].y - (self.y + vy * tk));
      if (d < params.approach_radius) {
        f.approaching = true;
        break;
      }
    }
  }
  return f;
}

ActionTraj ModeTemplate(const PredictorParams& params, BehaviorMode mode,
                        const AgentState& self, const JointState& joint,
                        const Context& ctx, int length, double dt) {
  ActionTraj out;
  out.start_t = joint.t;
  out.actions.reserve(static_cast<std::size_t>(std::max(length, 0)));
  double v = self.speed;
  auto push = [&](double accel, double turn) {
    accel = std::clamp(accel, -4.0, 4.0);
    out.actions.push_back({accel, std::clamp(turn, -1.0, 1.0)});
    v = std::max(0.0, v + accel * dt);
  };
  switch (mode) {
    case BehaviorMode::kGoStraight: {
      const double target = self.speed > 0.5 ? self.speed : params.resume_speed;
      for (int k = 0; k < length; ++k) {
        push(std::clamp(1.5 * (target - v), -4.0, params.resume_accel), 0.0);
      }
      break;
    }
    case BehaviorMode::kBrake:
      for (int k = 0; k < length; ++k) push(-std::min(2.0, v / dt), 0.0);
      break;
    case BehaviorMode::kYield:
      for (int k = 0; k < length; ++k) push(-std::min(4.0, v / dt), 0.0);
      break;
    case BehaviorMode::kStay:
      for (int k = 0; k < length; ++k) {
        push(v < 0.5 ? 0.0 : -std::min(4.0, v / dt), 0.0);
      }
      break;
    case BehaviorMode::kCross: {
      if (std::abs(std::sin(self.heading)) > 0.5) {
        // Already crossing: keep going across.
        const double dir = std::sin(self.heading) >= 0.0 ? 1.0 : -1.0;
        double heading = self.heading;
        for (int k = 0; k < length; ++k) {
          const double turn =
              std::clamp(1.5 * WrapAngle(dir * kPi / 2.0 - heading), -1.0, 1.0);
          push(std::clamp(std::max(v, 1.5) - v, -4.0, 2.0), turn);
          heading = WrapAngle(heading + turn * dt);
        }
        break;
      }
      // Lane change toward the robot's lane, or the nearest other lane.
      const LaneFrame lanes = LanesOf(ctx);
      const int own = NearestLaneIndex(lanes, self.y);
      int target = NearestLaneIndex(lanes, joint.robot.y);
      if (target == own) {
        double best = 1e300;
        for (int i = 0; i < static_cast<int>(lanes.centers.size()); ++i) {
          const double d = std::abs(lanes.centers[i] - self.y);
          if (i != own && d < best) {
            best = d;
            target = i;
          }
        }
      }
      const double dir =
          target == own ? 1.0
                        : (lanes.centers[target] > self.y ? 1.0 : -1.0);
      constexpr double kRate = 0.25;
      const double speed = std::max(self.speed, 1.0);
      int n1 = static_cast<int>(
          std::lround(std::sqrt(lanes.width / (speed * kRate)) / dt));
      n1 = std::clamp(n1, 1, std::max(1, length / 2));
      for (int k = 0; k < length; ++k) {
        const double turn = k < n1 ? dir * kRate : (k < 2 * n1 ? -dir * kRate : 0.0);
        push(0.0, turn);
      }
      break;
    }
  }
  return out;
}

PredictionSet Predict(const PredictorParams& params, const PredictionQuery& q) {
  if (q.n_modes_out < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_modes_out must be >= 1");
  }
  const int length = std::max(q.ego.size(), 1);
  const int keep = std::min(q.n_modes_out, kNumBehaviorModes);
  PredictionSet out;
  out.humans.reserve(q.joint.humans.size());
  for (int i = 0; i < static_cast<int>(q.joint.humans.size()); ++i) {
    const BucketFeatures f =
        ComputeFeatures(params, q.joint, q.history, q.ego, q.ctx, i, q.dt);
    const ModeVector probs = params.Probabilities(f.Index());
    std::array<int, kNumBehaviorModes> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    double kept = 0.0;
    for (int k = 0; k < keep; ++k) kept += probs[order[k]];
    HumanPrediction hp;
    for (int k = 0; k < keep; ++k) {
      const auto mode = static_cast<BehaviorMode>(order[k]);
      hp.modes.push_back(
          {mode, probs[order[k]] / kept,
           ModeTemplate(params, mode, q.joint.humans[i], q.joint, q.ctx,
                        length, q.dt)});
    }
    out.humans.push_back(std::move(hp));
  }
  return out;
}

LearnedPredictor::LearnedPredictor(PredictorParams params)
    : params_(std::move(params)) {
  ValidateParams(params_);
}

PredictionSet LearnedPredictor::Predict(const PredictionQuery& query) const {
  return regret_miner::Predict(params_, query);
}

OraclePredictor::OraclePredictor(PredictorParams labeling)
    : labeling_(std::move(labeling)) {}

PredictionSet OraclePredictor::Predict(const PredictionQuery& q) const {
  if (q.world == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "the oracle predictor needs the ground-truth world");
  }
  const std::size_t m = q.joint.humans.size();
  std::vector<ActionTraj> acts(m);
  std::vector<JointState> states{q.joint};
  std::vector<Action> step;
  for (const Action& a : q.ego.actions) {
    states.push_back(AdvanceWorld(*q.world, states.back(), a, &step));
    for (std::size_t i = 0; i < m; ++i) acts[i].actions.push_back(step[i]);
  }
  PredictionSet out;
  for (std::size_t i = 0; i < m; ++i) {
    acts[i].start_t = q.joint.t;
    const BehaviorMode label =
        LabelSegment(states, static_cast<int>(i), q.ctx, labeling_.yield_radius);
    out.humans.push_back({{{label, 1.0, std::move(acts[i])}}});
  }
  return out;
}

BehaviorMode LabelSegment(std::span<const JointState> states, int human,
                          const Context& ctx, double yield_radius) {
  if (states.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot label an empty segment");
  }
  const auto hi = static_cast<std::size_t>(human);
  double sum = 0.0;
  double lowest = states.front().humans.at(hi).speed;
  bool robot_near = false;
  for (const JointState& s : states) {
    const AgentState& h = s.humans.at(hi);
    sum += h.speed;
    lowest = std::min(lowest, h.speed);
    if (Distance(h, s.robot) < yield_radius) robot_near = true;
  }
  if (sum / static_cast<double>(states.size()) < 0.1) return BehaviorMode::kStay;
  if (states.front().humans[hi].speed - lowest > 1.0) {
    return robot_near ? BehaviorMode::kYield : BehaviorMode::kBrake;
  }
  const double lateral =
      std::abs(states.back().humans[hi].y - states.front().humans[hi].y);
  if (lateral > LanesOf(ctx).width / 2.0) return BehaviorMode::kCross;
  return BehaviorMode::kGoStraight;
}

std::vector<LabeledSample> ExtractSamples(const PredictorParams& params,
                                          std::span<const SceneRecord> data) {
  std::vector<LabeledSample> out;
  for (const SceneRecord& scene : data) {
    if (scene.aborted) continue;
    const ActionTraj robot = scene.RobotActions();
    const int horizon = scene.horizon();
    const std::span<const JointState> states(scene.states);
    for (const ReplanEntry& e : scene.replan_log) {
      const int len = std::min(params.label_window, horizon - e.t);
      if (len < 1) continue;
      ActionTraj ego;
      ego.start_t = e.t;
      ego.actions.assign(robot.actions.begin() + e.t,
                         robot.actions.begin() + e.t + len);
      const int h0 = std::max(0, e.t - params.history_window + 1);
      const auto history = states.subspan(static_cast<std::size_t>(h0),
                                          static_cast<std::size_t>(e.t - h0));
      const auto window = states.subspan(static_cast<std::size_t>(e.t),
                                         static_cast<std::size_t>(len) + 1);
      for (int i = 0; i < scene.num_humans(); ++i) {
        const BucketFeatures f =
            ComputeFeatures(params, states[static_cast<std::size_t>(e.t)],
                            history, ego, scene.context, i, scene.dt);
        out.push_back(
            {f.Index(), LabelSegment(window, i, scene.context,
                                     params.yield_radius)});
      }
    }
  }
  return out;
}

PredictorParams FitFromSamples(std::span<const LabeledSample> samples,
                               const std::optional<PredictorParams>& init,
                               const FitOptions& options) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fit needs at least one sample");
  }
  PredictorParams out = init.value_or(PredictorParams{});
  ValidateParams(out);
  std::vector<ModeVector> fresh(kNumBuckets);
  for (const LabeledSample& s : samples) {
    if (s.bucket < 0 || s.bucket >= kNumBuckets) {
      throw Error(ErrorCode::kInvalidArgument, "sample bucket out of range");
    }
    fresh[static_cast<std::size_t>(s.bucket)][static_cast<int>(s.label)] += 1.0;
  }
  if (options.kind == FitOptions::Kind::kFull) {
    out.counts = std::move(fresh);
    return out;
  }
  if (!init.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "finetuning needs initial params");
  }
  if (!(options.blend > 0.0 && options.blend <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "blend must lie in (0, 1]");
  }
  const double lambda = options.blend;
  for (int b = 0; b < kNumBuckets; ++b) {
    const ModeVector& add = fresh[static_cast<std::size_t>(b)];
    if (std::accumulate(add.begin(), add.end(), 0.0) == 0.0) continue;
    ModeVector& row = out.counts[static_cast<std::size_t>(b)];
    for (int m = 0; m < kNumBehaviorModes; ++m) {
      row[m] = (1.0 - lambda) * row[m] + lambda * add[m];
    }
  }
  return out;
}

PredictorParams Fit(std::span<const SceneRecord> data,
                    const std::optional<PredictorParams>& init,
                    const FitOptions& options) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fit needs at least one scene");
  }
  const PredictorParams constants = init.value_or(PredictorParams{});
  const std::vector<LabeledSample> samples = ExtractSamples(constants, data);
  return FitFromSamples(samples, init, options);
}

DisplacementError AdeFde(std::span<const Vec2> predicted,
                         std::span<const Vec2> truth) {
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ADE/FDE needs equal non-empty trajectories");
  }
  double sum = 0.0;
  double last = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    last = std::hypot(predicted[k].x - truth[k].x, predicted[k].y - truth[k].y);
    sum += last;
  }
  return {sum / static_cast<double>(predicted.size()), last};
}

std::vector<Vec2> Positions(const std::vector<AgentState>& states) {
  std::vector<Vec2> out;
  out.reserve(states.size());
  for (const AgentState& s : states) out.push_back(s.position());
  return out;
}

}  // namespace regret_miner
