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

// Reward-free generative planning on a small social-navigation floor: a
// categorical-code joint trajectory model, kernel-density counterfactual
// likelihoods and the regret built on them.

#ifndef REGRET_MINER_GENPLAN_HPP_
#define REGRET_MINER_GENPLAN_HPP_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/core.hpp"

namespace regret_miner {

inline constexpr int kNavSteps = 6;
inline constexpr int kCueBuckets = 12;

enum class NavGoal { kPrimary, kBackup };
enum class HumanClass { kLeft = 0, kStraight = 1, kRight = 2 };

std::string_view NavGoalName(NavGoal goal);
NavGoal ParseNavGoal(std::string_view name);

// Per-step scalar actions. Robot entries are Dubins turn rates (rad/s);
// human entries are headings relative to the human's initial facing (rad).
using NavTraj = std::vector<double>;

struct NavSample {
  double delta_h = 0.0;
  NavGoal goal = NavGoal::kPrimary;
  NavTraj human_traj;
  NavTraj robot_traj;
  int outcome_class = 0;
  // Whether the proximity rule fired and whether the robot then switched.
  bool triggered = false;
  bool switched = false;
  friend bool operator==(const NavSample&, const NavSample&) = default;
};

// Floor layout and controller constants.
struct NavGeometry {
  Vec2 robot_start{0.0, 0.0};
  double robot_heading = 0.0;
  double robot_speed = 1.0;
  Vec2 goal_primary{2.5, 1.8};
  Vec2 goal_backup{2.5, -1.8};
  Vec2 human_start{5.0, 0.0};
  double human_facing = kPi;  // walks toward -x
  double human_speed = 1.0;
  // Human waypoints per class, in world coordinates.
  Vec2 human_left{2.6, -1.8};
  Vec2 human_straight{2.0, 0.0};
  Vec2 human_right{2.6, 1.8};
  double dt = 0.5;
  double turn_gain = 1.0;
  double max_turn = 1.0;
  double proximity = 0.8;
  double switch_probability = 0.8;
  double heading_noise = 0.03;
  double turn_noise = 0.03;
};

HumanClass ClassifyCue(double cue);  // thresholds 1/3 and 2/3
int OutcomeClass(HumanClass human, NavGoal final_goal);

// Noisy single-integrator walk toward the class waypoint. `positions` (when
// non-null) receives the kNavSteps positions after each step.
NavTraj SimulateHuman(const NavGeometry& geo, HumanClass cls, Rng* noise,
                      std::vector<Vec2>* positions = nullptr);

// Dubins proportional control toward `goal` at `speed`.
NavTraj PursuitTurnRates(const Vec2& start, double heading, double speed,
                         const Vec2& goal, const NavGeometry& geo, Rng* noise,
                         std::vector<Vec2>* positions = nullptr);

std::vector<Vec2> HumanPositions(const NavGeometry& geo, const NavTraj& traj);
std::vector<Vec2> RobotPositions(const NavGeometry& geo, const NavTraj& traj,
                                 double speed);

// Generates one sample for a given cue and goal. `epsilon` perturbs the cue
// before thresholding.
NavSample GenerateNavSample(const NavGeometry& geo, double delta_h,
                            NavGoal goal, double epsilon, Rng& rng);

std::vector<NavSample> GenerateNavDataset(int n, double epsilon_sigma,
                                          const RngStream& rng,
                                          const NavGeometry& geo = {});

// ---------------------------------------------------------------------------

struct Codebook {
  int K = 6;
  int robot_len = kNavSteps;
  int human_len = kNavSteps;
  // Rows indexed by cue bucket * 2 + goal; each row is a distribution over K.
  std::vector<std::vector<double>> encoder;
  // Per code: mean and variance of [robot_traj, human_traj].
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> var;
  double noise_sigma = 0.02;
  double pseudo_count = 0.5;

  int dims() const { return robot_len + human_len; }
  const std::vector<double>& EncoderRow(double delta_h, NavGoal goal) const;
  friend bool operator==(const Codebook&, const Codebook&) = default;
};

int CueBucket(double delta_h);

void ValidateCodebook(const Codebook& cb);

struct CodebookOptions {
  double pseudo_count = 0.5;
  double noise_sigma = 0.02;
  double min_variance = 1e-8;
};

// Code index = outcome_class; every code in [0, K) needs >= 2 samples.
Codebook FitCodebook(std::span<const NavSample> data, int K,
                     const CodebookOptions& options = {});

struct GenerativePlan {
  int code = 0;
  NavTraj robot;
  NavTraj anticipated_human;
};

GenerativePlan PlanGenerative(const Codebook& cb, double delta_h, NavGoal goal,
                              const RngStream& rng);

// (1/n) sum_i [Phi((c + delta - x_i)/h) - Phi((c - delta - x_i)/h)].
double KdeWindowMass(std::span<const double> samples, double bandwidth,
                     double center, double delta);

double SilvermanBandwidth(std::span<const double> samples);

struct KdeSettings {
  int n_samples = 250;
  double delta = 0.1;
  double bandwidth = 0.05;
  bool silverman = false;
};

// Decoder draws per code and dimension, shared by every candidate scored
// against the same deployment.
struct KdeMixture {
  std::vector<std::vector<std::vector<double>>> samples;  // [code][dim][i]
  std::vector<std::vector<double>> bandwidth;             // [code][dim]
};

KdeMixture SampleMixture(const Codebook& cb, const KdeSettings& settings,
                         const RngStream& rng);

// Posterior code weights given the observed human part, proportional to
// encoder weight times the human window-mass product. Throws out_of_support
// when the normalizer underflows.
std::vector<double> CodePosterior(const Codebook& cb, const KdeMixture& mix,
                                  std::span<const double> human, double delta_h,
                                  NavGoal goal, double delta);

// Whole-trajectory counterfactual probability of a robot trajectory.
double CounterfactualProb(const Codebook& cb, const KdeMixture& mix,
                          std::span<const double> robot,
                          std::span<const double> human, double delta_h,
                          NavGoal goal, double delta);

double CounterfactualProb(const Codebook& cb, std::span<const double> robot,
                          std::span<const double> human, double delta_h,
                          NavGoal goal, const KdeSettings& settings,
                          const RngStream& rng);

// Per-timestep counterfactual probabilities of the robot action at each step.
std::vector<double> CounterfactualProbPerStep(
    const Codebook& cb, const KdeMixture& mix, std::span<const double> robot,
    std::span<const double> human, double delta_h, NavGoal goal, double delta);

struct GenerativeRegretReport {
  std::vector<double> per_step;
  double regret = 0.0;
  int argmax_candidate = 0;
};

// Per-step max over the hindsight candidates minus the executed trajectory's
// probability, averaged over steps. `executed` must appear in `candidates`.
GenerativeRegretReport GenerativeRegret(
    const Codebook& cb, std::span<const NavTraj> candidates, int executed,
    std::span<const double> human, double delta_h, NavGoal goal,
    const KdeSettings& settings, const RngStream& rng);

// Convenience overload: appends `executed` to `hindsight` when absent.
double GenerativeRegret(const Codebook& cb, const NavTraj& executed,
                        std::span<const double> human, double delta_h,
                        NavGoal goal, std::vector<NavTraj> hindsight,
                        const KdeSettings& settings, const RngStream& rng);

// Pursuit trajectories to {primary, backup, straight ahead} x speeds
// {0.8, 1.0, 1.2}.
std::vector<NavTraj> DefaultHindsightSet(const NavGeometry& geo = {});

// ---------------------------------------------------------------------------
// Social-navigation fixtures.

enum class NavFixtureKind { kNominal, kIrrelevant, kCollision };

std::string_view NavFixtureName(NavFixtureKind kind);

struct NavDeployment {
  std::string tag;
  double delta_h = 0.0;
  NavGoal goal = NavGoal::kPrimary;
  HumanClass anticipated = HumanClass::kStraight;
  HumanClass actual = HumanClass::kStraight;
  NavTraj executed_robot;
  NavTraj anticipated_human;
  NavTraj observed_human;
  double regret = 0.0;
};

NavDeployment RunNavFixture(const Codebook& cb, NavFixtureKind kind,
                            const KdeSettings& settings, const RngStream& rng,
                            const NavGeometry& geo = {});

// ---------------------------------------------------------------------------
// Perception fault case study.

struct SensorModel {
  double detect_true_positive = 1.0;
  double detect_false_positive = 0.0;
  // -1: no fault; 0 or 1 forces the reported bit.
  int injected_fault = -1;
};

void ValidateSensor(const SensorModel& sensor);
int Sense(const SensorModel& sensor, bool obstacle, Rng& rng);

struct PerceptionGeometry {
  Vec2 robot_start{0.0, 0.0};
  double robot_heading = kPi / 2.0;
  double speed = 1.0;
  Vec2 goal_clear{0.0, 3.0};     // straight ahead when the path is free
  Vec2 goal_avoid{2.5, 1.5};     // off to the right when an obstacle sits ahead
  double dt = 0.5;
  double turn_gain = 1.0;
  double max_turn = 1.0;
  double turn_noise = 0.03;
};

struct PerceptionResult {
  std::string tag;
  bool obstacle = false;
  int sensed = 0;
  double regret = 0.0;
};

std::vector<PerceptionResult> PerceptionCaseStudy(
    const SensorModel& sensor, int n_samples_per_condition, const RngStream& rng,
    const KdeSettings& settings = {}, const PerceptionGeometry& geo = {});

}  // namespace regret_miner

#endif  // REGRET_MINER_GENPLAN_HPP_
