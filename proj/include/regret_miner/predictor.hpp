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

// Ego-conditioned behavior predictor: a bucketed mode classifier with one
// trajectory template per mode, refittable from deployment logs.

#ifndef REGRET_MINER_PREDICTOR_HPP_
#define REGRET_MINER_PREDICTOR_HPP_

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regret_miner/core.hpp"
#include "regret_miner/records.hpp"
#include "regret_miner/world.hpp"

namespace regret_miner {

using ModeVector = std::array<double, kNumBehaviorModes>;

// Feature buckets: speed (4) x distance to robot (3) x approaching (2) x
// lane-relative position (3).
inline constexpr int kSpeedBuckets = 4;
inline constexpr int kDistanceBuckets = 3;
inline constexpr int kLaneBuckets = 3;
inline constexpr int kNumBuckets =
    kSpeedBuckets * kDistanceBuckets * 2 * kLaneBuckets;

struct BucketFeatures {
  int speed = 0;     // mean speed < 0.1, < 3, < 7, >= 7 m/s
  int distance = 0;  // < 10, < 25, >= 25 m
  bool approaching = false;
  int lane = 0;  // robot's lane, other lane, off-road or crossing
  int Index() const;
  friend bool operator==(const BucketFeatures&, const BucketFeatures&) =
      default;
};

struct PredictorParams {
  // Observed (possibly blended) label counts per bucket.
  std::vector<ModeVector> counts = std::vector<ModeVector>(kNumBuckets);
  double smoothing = 1.0;
  int history_window = 4;
  // Feature and template constants.
  double approach_radius = 8.0;
  double yield_radius = 15.0;
  double resume_speed = 8.0;
  double resume_accel = 3.0;
  int label_window = 40;

  ModeVector Logits(int bucket) const;
  ModeVector Probabilities(int bucket) const;
  friend bool operator==(const PredictorParams&, const PredictorParams&) =
      default;
};

void ValidateParams(const PredictorParams& params);

ModeVector Softmax(const ModeVector& logits);

// Everything a predictor may look at for one query.
struct PredictionQuery {
  const JointState& joint;
  // Prior joint states, oldest first; may be shorter than the history window.
  std::span<const JointState> history;
  const ActionTraj& ego;
  const Context& ctx;
  int n_modes_out = 3;
  double dt = kDefaultDt;
  // Ground truth of the running scene. Only the oracle reads it.
  const WorldModel* world = nullptr;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionSet Predict(const PredictionQuery& query) const = 0;
  virtual std::string name() const = 0;
};

BucketFeatures ComputeFeatures(const PredictorParams& params,
                               const JointState& joint,
                               std::span<const JointState> history,
                               const ActionTraj& ego, const Context& ctx,
                               int human, double dt);

// Deterministic open-loop rollout of one behavior mode.
ActionTraj ModeTemplate(const PredictorParams& params, BehaviorMode mode,
                        const AgentState& self, const JointState& joint,
                        const Context& ctx, int length, double dt);

PredictionSet Predict(const PredictorParams& params, const PredictionQuery& q);

class LearnedPredictor : public Predictor {
 public:
  explicit LearnedPredictor(PredictorParams params);
  PredictionSet Predict(const PredictionQuery& query) const override;
  std::string name() const override { return "learned"; }
  const PredictorParams& params() const { return params_; }

 private:
  PredictorParams params_;
};

// Simulates the true world under the candidate, so its single mode carries
// the realized future whenever the robot follows that candidate.
class OraclePredictor : public Predictor {
 public:
  explicit OraclePredictor(PredictorParams labeling = {});
  PredictionSet Predict(const PredictionQuery& query) const override;
  std::string name() const override { return "oracle"; }

 private:
  PredictorParams labeling_;
};

// Labels human `human` over states[t .. t + len] (len + 1 states).
BehaviorMode LabelSegment(std::span<const JointState> states, int human,
                          const Context& ctx, double yield_radius);

struct LabeledSample {
  int bucket = 0;
  BehaviorMode label = BehaviorMode::kGoStraight;
};

// One labeled sample per (replan, human) of every non-aborted scene.
std::vector<LabeledSample> ExtractSamples(const PredictorParams& params,
                                          std::span<const SceneRecord> data);

struct FitOptions {
  enum class Kind { kFull, kFinetune } kind = Kind::kFull;
  double blend = 0.5;
};

// Full fit ignores `init` counts but keeps its constants; finetune blends
// (1 - blend) * old + blend * new in buckets the new data reaches.
PredictorParams Fit(std::span<const SceneRecord> data,
                    const std::optional<PredictorParams>& init,
                    const FitOptions& options);

PredictorParams FitFromSamples(std::span<const LabeledSample> samples,
                               const std::optional<PredictorParams>& init,
                               const FitOptions& options);

struct DisplacementError {
  double ade = 0.0;
  double fde = 0.0;
};

DisplacementError AdeFde(std::span<const Vec2> predicted,
                         std::span<const Vec2> truth);

std::vector<Vec2> Positions(const std::vector<AgentState>& states);

}  // namespace regret_miner

#endif  // REGRET_MINER_PREDICTOR_HPP_
