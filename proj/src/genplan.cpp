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

#include "regret_miner/genplan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regret_miner {

std::string_view NavGoalName(NavGoal goal) {
  return goal == NavGoal::kPrimary ? "primary" : "backup";
}

NavGoal ParseNavGoal(std::string_view name) {
  if (name == "primary") return NavGoal::kPrimary;
  if (name == "backup") return NavGoal::kBackup;
  throw Error(ErrorCode::kSchema, "unknown nav goal '" + std::string(name) + "'");
}

HumanClass ClassifyCue(double cue) {
  if (cue < 1.0 / 3.0) return HumanClass::kLeft;
  if (cue > 2.0 / 3.0) return HumanClass::kRight;
  return HumanClass::kStraight;
}

int OutcomeClass(HumanClass human, NavGoal final_goal) {
  return static_cast<int>(human) * 2 + (final_goal == NavGoal::kBackup ? 1 : 0);
}

namespace {

const Vec2& Waypoint(const NavGeometry& geo, HumanClass cls) {
  switch (cls) {
    case HumanClass::kLeft:
      return geo.human_left;
    case HumanClass::kRight:
      return geo.human_right;
    case HumanClass::kStraight:
      break;
  }
  return geo.human_straight;
}

const Vec2& GoalPoint(const NavGeometry& geo, NavGoal goal) {
  return goal == NavGoal::kPrimary ? geo.goal_primary : geo.goal_backup;
}

double Dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

NavTraj SimulateHuman(const NavGeometry& geo, HumanClass cls, Rng* noise,
                      std::vector<Vec2>* positions) {
  const Vec2& target = Waypoint(geo, cls);
  NavTraj traj;
  Vec2 p = geo.human_start;
  if (positions != nullptr) positions->clear();
  for (int k = 0; k < kNavSteps; ++k) {
    // Heading relative to the initial facing, so a straight walk reads as 0.
    const double bearing = std::atan2(target.y - p.y, target.x - p.x);
    double rel = WrapAngle(bearing - geo.human_facing);
    if (noise != nullptr) rel += noise->Normal(0.0, geo.heading_noise);
    traj.push_back(rel);
    const double heading = geo.human_facing + rel;
    p.x += geo.human_speed * std::cos(heading) * geo.dt;
    p.y += geo.human_speed * std::sin(heading) * geo.dt;
    if (positions != nullptr) positions->push_back(p);
  }
  return traj;
}

std::vector<Vec2> HumanPositions(const NavGeometry& geo, const NavTraj& traj) {
  std::vector<Vec2> out;
  Vec2 p = geo.human_start;
  for (double rel : traj) {
    const double heading = geo.human_facing + rel;
    p.x += geo.human_speed * std::cos(heading) * geo.dt;
    p.y += geo.human_speed * std::sin(heading) * geo.dt;
    out.push_back(p);
  }
  return out;
}

NavTraj PursuitTurnRates(const Vec2& start, double heading, double speed,
                         const Vec2& goal, const NavGeometry& geo, Rng* noise,
                         std::vector<Vec2>* positions) {
  AgentState s{start.x, start.y, WrapAngle(heading), speed};
  NavTraj traj;
  if (positions != nullptr) positions->clear();
  for (int k = 0; k < kNavSteps; ++k) {
    const double bearing = std::atan2(goal.y - s.y, goal.x - s.x);
    double u = std::clamp(geo.turn_gain * WrapAngle(bearing - s.heading),
                          -geo.max_turn, geo.max_turn);
    if (noise != nullptr) u += noise->Normal(0.0, geo.turn_noise);
    traj.push_back(u);
    s = DubinsStep(s, u, speed, geo.dt);
    if (positions != nullptr) positions->push_back(s.position());
  }
  return traj;
}

std::vector<Vec2> RobotPositions(const NavGeometry& geo, const NavTraj& traj,
                                 double speed) {
  AgentState s{geo.robot_start.x, geo.robot_start.y, geo.robot_heading, speed};
  std::vector<Vec2> out;
  for (double u : traj) {
    s = DubinsStep(s, u, speed, geo.dt);
    out.push_back(s.position());
  }
  return out;
}

NavSample GenerateNavSample(const NavGeometry& geo, double delta_h,
                            NavGoal goal, double epsilon, Rng& rng) {
  NavSample out;
  out.delta_h = delta_h;
  out.goal = goal;
  const HumanClass cls = ClassifyCue(delta_h + epsilon);
  std::vector<Vec2> human_pos;
  out.human_traj = SimulateHuman(geo, cls, &rng, &human_pos);

  // The robot checks its nominal path against the human's walk; when they
  // come close it diverts to the other goal with the switch probability.
  std::vector<Vec2> robot_pos;
  PursuitTurnRates(geo.robot_start, geo.robot_heading, geo.robot_speed,
                   GoalPoint(geo, goal), geo, nullptr, &robot_pos);
  for (int k = 0; k < kNavSteps; ++k) {
    if (Dist(robot_pos[k], human_pos[k]) < geo.proximity) {
      out.triggered = true;
      break;
    }
  }
  NavGoal final_goal = goal;
  if (out.triggered && rng.Uniform() < geo.switch_probability) {
    out.switched = true;
    final_goal = goal == NavGoal::kPrimary ? NavGoal::kBackup : NavGoal::kPrimary;
  }
  out.robot_traj = PursuitTurnRates(geo.robot_start, geo.robot_heading,
                                    geo.robot_speed, GoalPoint(geo, final_goal),
                                    geo, &rng);
  out.outcome_class = OutcomeClass(cls, final_goal);
  return out;
}

std::vector<NavSample> GenerateNavDataset(int n, double epsilon_sigma,
                                          const RngStream& rng,
                                          const NavGeometry& geo) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "dataset size must be >= 1");
  if (!(epsilon_sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon_sigma must be >= 0");
  }
  std::vector<NavSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng draw(rng.Derive(static_cast<std::uint64_t>(i)));
    const double delta_h = draw.Uniform();
    const NavGoal goal = draw.Uniform() < 0.5 ? NavGoal::kPrimary : NavGoal::kBackup;
    const double eps = draw.Normal(0.0, epsilon_sigma);
    out.push_back(GenerateNavSample(geo, delta_h, goal, eps, draw));
  }
  return out;
}

// ---------------------------------------------------------------------------

int CueBucket(double delta_h) {
  const int b = static_cast<int>(std::floor(delta_h * kCueBuckets));
  return std::clamp(b, 0, kCueBuckets - 1);
}

const std::vector<double>& Codebook::EncoderRow(double delta_h,
                                                NavGoal goal) const {
  return encoder.at(static_cast<std::size_t>(
      CueBucket(delta_h) * 2 + (goal == NavGoal::kBackup ? 1 : 0)));
}

void ValidateCodebook(const Codebook& cb) {
  if (cb.K < 1 || cb.robot_len < 1 || cb.human_len < 0) {
    throw Error(ErrorCode::kSchema, "invalid codebook dimensions");
  }
  if (cb.encoder.size() != static_cast<std::size_t>(kCueBuckets * 2) ||
      cb.mean.size() != static_cast<std::size_t>(cb.K) ||
      cb.var.size() != static_cast<std::size_t>(cb.K)) {
    throw Error(ErrorCode::kSchema, "codebook table sizes do not match K");
  }
  for (const auto& row : cb.encoder) {
    if (row.size() != static_cast<std::size_t>(cb.K)) {
      throw Error(ErrorCode::kSchema, "encoder row length differs from K");
    }
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::kSchema, "encoder row is not a distribution");
    }
  }
  for (int k = 0; k < cb.K; ++k) {
    if (cb.mean[k].size() != static_cast<std::size_t>(cb.dims()) ||
        cb.var[k].size() != static_cast<std::size_t>(cb.dims())) {
      throw Error(ErrorCode::kSchema, "decoder dimension mismatch");
    }
    for (double v : cb.var[k]) {
      if (!(v > 0.0)) throw Error(ErrorCode::kSchema, "decoder variance <= 0");
    }
  }
  if (!(cb.noise_sigma >= 0.0)) {
    throw Error(ErrorCode::kSchema, "noise_sigma must be >= 0");
  }
}

Codebook FitCodebook(std::span<const NavSample> data, int K,
                     const CodebookOptions& options) {
  if (K < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "empty dataset");
  if (!(options.pseudo_count >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pseudo_count must be >= 0");
  }
  Codebook cb;
  cb.K = K;
  cb.robot_len = static_cast<int>(data.front().robot_traj.size());
  cb.human_len = static_cast<int>(data.front().human_traj.size());
  cb.noise_sigma = options.noise_sigma;
  cb.pseudo_count = options.pseudo_count;
  const int dims = cb.dims();

  std::vector<std::vector<double>> counts(
      kCueBuckets * 2, std::vector<double>(static_cast<std::size_t>(K), 0.0));
  std::vector<std::vector<double>> sum(K, std::vector<double>(dims, 0.0));
  std::vector<int> n(K, 0);
  auto joint = [](const NavSample& s, int d, int robot_len) {
    return d < robot_len ? s.robot_traj[d] : s.human_traj[d - robot_len];
  };
  for (const NavSample& s : data) {
    if (s.outcome_class < 0 || s.outcome_class >= K) {
      throw Error(ErrorCode::kInvalidArgument,
                  "outcome class outside the codebook range");
    }
    if (static_cast<int>(s.robot_traj.size()) != cb.robot_len ||
        static_cast<int>(s.human_traj.size()) != cb.human_len) {
      throw Error(ErrorCode::kInvalidArgument, "inconsistent trajectory lengths");
    }
    const int row = CueBucket(s.delta_h) * 2 + (s.goal == NavGoal::kBackup ? 1 : 0);
    counts[row][s.outcome_class] += 1.0;
    for (int d = 0; d < dims; ++d) sum[s.outcome_class][d] += joint(s, d, cb.robot_len);
    ++n[s.outcome_class];
  }
  for (int k = 0; k < K; ++k) {
    if (n[k] < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "outcome class " + std::to_string(k) +
                      " has fewer than two samples");
    }
  }
  cb.encoder.resize(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    const double total =
        std::accumulate(counts[r].begin(), counts[r].end(), 0.0) +
        K * options.pseudo_count;
    cb.encoder[r].resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      cb.encoder[r][k] = total > 0.0 ? (counts[r][k] + options.pseudo_count) / total
                                     : 1.0 / K;
    }
  }
  cb.mean.assign(K, std::vector<double>(dims, 0.0));
  cb.var.assign(K, std::vector<double>(dims, 0.0));
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < dims; ++d) cb.mean[k][d] = sum[k][d] / n[k];
  }
  for (const NavSample& s : data) {
    const int k = s.outcome_class;
    for (int d = 0; d < dims; ++d) {
      const double e = joint(s, d, cb.robot_len) - cb.mean[k][d];
      cb.var[k][d] += e * e;
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < dims; ++d) {
      cb.var[k][d] = std::max(cb.var[k][d] / (n[k] - 1), options.min_variance);
    }
  }
  return cb;
}

GenerativePlan PlanGenerative(const Codebook& cb, double delta_h, NavGoal goal,
                              const RngStream& rng) {
  Rng draw(rng);
  const std::vector<double>& row = cb.EncoderRow(delta_h, goal);
  GenerativePlan plan;
  plan.code = static_cast<int>(draw.Categorical(row));
  const std::vector<double>& mean = cb.mean[static_cast<std::size_t>(plan.code)];
  for (int d = 0; d < cb.dims(); ++d) {
    const double x = mean[d] + cb.noise_sigma * draw.Normal();
    (d < cb.robot_len ? plan.robot : plan.anticipated_human).push_back(x);
  }
  return plan;
}

// ---------------------------------------------------------------------------

namespace {

// P(a < Z < b) for a standard normal, evaluated on the tail that keeps
// precision.
double NormalInterval(double a, double b) {
  if (a >= 0.0) {
    return 0.5 * (std::erfc(a / std::numbers::sqrt2) -
                  std::erfc(b / std::numbers::sqrt2));
  }
  if (b <= 0.0) {
    return 0.5 * (std::erfc(-b / std::numbers::sqrt2) -
                  std::erfc(-a / std::numbers::sqrt2));
  }
  return 1.0 - 0.5 * (std::erfc(-a / std::numbers::sqrt2) +
                      std::erfc(b / std::numbers::sqrt2));
}

}  // namespace

double KdeWindowMass(std::span<const double> samples, double bandwidth,
                     double center, double delta) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "KDE needs at least one sample");
  }
  if (!(bandwidth > 0.0) || !(delta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bandwidth and delta must be > 0");
  }
  double mass = 0.0;
  for (double x : samples) {
    mass += NormalInterval((center - delta - x) / bandwidth,
                           (center + delta - x) / bandwidth);
  }
  return std::clamp(mass / static_cast<double>(samples.size()), 0.0, 1.0);
}

double SilvermanBandwidth(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Silverman needs >= 2 samples");
  }
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return std::max(1.06 * sd * std::pow(n, -0.2), 1e-6);
}

KdeMixture SampleMixture(const Codebook& cb, const KdeSettings& settings,
                         const RngStream& rng) {
  ValidateCodebook(cb);
  if (settings.n_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  }
  if (!settings.silverman && !(settings.bandwidth > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bandwidth must be > 0");
  }
  KdeMixture mix;
  mix.samples.resize(static_cast<std::size_t>(cb.K));
  mix.bandwidth.resize(static_cast<std::size_t>(cb.K));
  for (int k = 0; k < cb.K; ++k) {
    Rng draw(rng.Derive(static_cast<std::uint64_t>(k)));
    auto& per_dim = mix.samples[k];
    per_dim.assign(static_cast<std::size_t>(cb.dims()), {});
    for (int i = 0; i < settings.n_samples; ++i) {
      for (int d = 0; d < cb.dims(); ++d) {
        per_dim[d].push_back(draw.Normal(cb.mean[k][d], std::sqrt(cb.var[k][d])));
      }
    }
    for (int d = 0; d < cb.dims(); ++d) {
      mix.bandwidth[k].push_back(settings.silverman && settings.n_samples > 1
                                     ? SilvermanBandwidth(per_dim[d])
                                     : settings.bandwidth);
    }
  }
  return mix;
}

namespace {

void CheckLengths(const Codebook& cb, std::span<const double> robot,
                  std::span<const double> human) {
  if (static_cast<int>(robot.size()) != cb.robot_len ||
      static_cast<int>(human.size()) != cb.human_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory lengths do not match the codebook");
  }
}

double HumanMass(const Codebook& cb, const KdeMixture& mix, int k,
                 std::span<const double> human, double delta) {
  double mass = 1.0;
  for (int j = 0; j < cb.human_len; ++j) {
    const int d = cb.robot_len + j;
    mass *= KdeWindowMass(mix.samples[k][d], mix.bandwidth[k][d], human[j], delta);
  }
  return mass;
}

}  // namespace

std::vector<double> CodePosterior(const Codebook& cb, const KdeMixture& mix,
                                  std::span<const double> human, double delta_h,
                                  NavGoal goal, double delta) {
  if (static_cast<int>(human.size()) != cb.human_len) {
    throw Error(ErrorCode::kInvalidArgument, "human trajectory length mismatch");
  }
  const std::vector<double>& row = cb.EncoderRow(delta_h, goal);
  std::vector<double> w(static_cast<std::size_t>(cb.K));
  double total = 0.0;
  for (int k = 0; k < cb.K; ++k) {
    w[k] = row[k] * HumanMass(cb, mix, k, human, delta);
    total += w[k];
  }
  if (!(total >= 1e-300)) {
    throw Error(ErrorCode::kOutOfSupport,
                "observed human behavior has no support under any code");
  }
  for (double& x : w) x /= total;
  return w;
}

double CounterfactualProb(const Codebook& cb, const KdeMixture& mix,
                          std::span<const double> robot,
                          std::span<const double> human, double delta_h,
                          NavGoal goal, double delta) {
  CheckLengths(cb, robot, human);
  const std::vector<double> post = CodePosterior(cb, mix, human, delta_h, goal, delta);
  double p = 0.0;
  for (int k = 0; k < cb.K; ++k) {
    double mass = post[k];
    for (int j = 0; j < cb.robot_len && mass > 0.0; ++j) {
      mass *= KdeWindowMass(mix.samples[k][j], mix.bandwidth[k][j], robot[j], delta);
    }
    p += mass;
  }
  return std::clamp(p, 0.0, 1.0);
}

double CounterfactualProb(const Codebook& cb, std::span<const double> robot,
                          std::span<const double> human, double delta_h,
                          NavGoal goal, const KdeSettings& settings,
                          const RngStream& rng) {
  const KdeMixture mix = SampleMixture(cb, settings, rng);
  return CounterfactualProb(cb, mix, robot, human, delta_h, goal, settings.delta);
}

std::vector<double> CounterfactualProbPerStep(
    const Codebook& cb, const KdeMixture& mix, std::span<const double> robot,
    std::span<const double> human, double delta_h, NavGoal goal, double delta) {
  CheckLengths(cb, robot, human);
  const std::vector<double> post = CodePosterior(cb, mix, human, delta_h, goal, delta);
  std::vector<double> out(static_cast<std::size_t>(cb.robot_len), 0.0);
  for (int j = 0; j < cb.robot_len; ++j) {
    for (int k = 0; k < cb.K; ++k) {
      out[j] += post[k] * KdeWindowMass(mix.samples[k][j], mix.bandwidth[k][j],
                                        robot[j], delta);
    }
    out[j] = std::clamp(out[j], 0.0, 1.0);
  }
  return out;
}

GenerativeRegretReport GenerativeRegret(
    const Codebook& cb, std::span<const NavTraj> candidates, int executed,
    std::span<const double> human, double delta_h, NavGoal goal,
    const KdeSettings& settings, const RngStream& rng) {
  if (candidates.empty() || executed < 0 ||
      executed >= static_cast<int>(candidates.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "executed trajectory must be one of the candidates");
  }
  const KdeMixture mix = SampleMixture(cb, settings, rng);
  std::vector<std::vector<double>> probs;
  probs.reserve(candidates.size());
  for (const NavTraj& c : candidates) {
    probs.push_back(CounterfactualProbPerStep(cb, mix, c, human, delta_h, goal,
                                              settings.delta));
  }
  GenerativeRegretReport report;
  std::vector<double> best_count(candidates.size(), 0.0);
  for (int j = 0; j < cb.robot_len; ++j) {
    double best = probs[0][j];
    int arg = 0;
    for (int c = 1; c < static_cast<int>(probs.size()); ++c) {
      if (probs[c][j] > best) {
        best = probs[c][j];
        arg = c;
      }
    }
    best_count[arg] += 1.0;
    report.per_step.push_back(best - probs[executed][j]);
  }
  report.regret = std::accumulate(report.per_step.begin(), report.per_step.end(), 0.0) /
                  static_cast<double>(report.per_step.size());
  report.argmax_candidate = static_cast<int>(
      std::max_element(best_count.begin(), best_count.end()) - best_count.begin());
  return report;
}

double GenerativeRegret(const Codebook& cb, const NavTraj& executed,
                        std::span<const double> human, double delta_h,
                        NavGoal goal, std::vector<NavTraj> hindsight,
                        const KdeSettings& settings, const RngStream& rng) {
  auto it = std::find(hindsight.begin(), hindsight.end(), executed);
  int index = static_cast<int>(it - hindsight.begin());
  if (it == hindsight.end()) {
    hindsight.push_back(executed);
    index = static_cast<int>(hindsight.size()) - 1;
  }
  return GenerativeRegret(cb, hindsight, index, human, delta_h, goal, settings, rng)
      .regret;
}

std::vector<NavTraj> DefaultHindsightSet(const NavGeometry& geo) {
  const Vec2 ahead{geo.robot_start.x + 3.0 * std::cos(geo.robot_heading),
                   geo.robot_start.y + 3.0 * std::sin(geo.robot_heading)};
  std::vector<NavTraj> out;
  for (const Vec2& goal : {geo.goal_primary, geo.goal_backup, ahead}) {
    for (double speed : {0.8, 1.0, 1.2}) {
      out.push_back(PursuitTurnRates(geo.robot_start, geo.robot_heading, speed,
                                     goal, geo, nullptr));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view NavFixtureName(NavFixtureKind kind) {
  switch (kind) {
    case NavFixtureKind::kNominal:
      return "nominal";
    case NavFixtureKind::kIrrelevant:
      return "irrelevant";
    case NavFixtureKind::kCollision:
      return "collision";
  }
  return "nominal";
}

NavDeployment RunNavFixture(const Codebook& cb, NavFixtureKind kind,
                            const KdeSettings& settings, const RngStream& rng,
                            const NavGeometry& geo) {
  NavDeployment dep;
  dep.tag = std::string(NavFixtureName(kind));
  dep.goal = NavGoal::kPrimary;
  switch (kind) {
    case NavFixtureKind::kNominal:
      // Human clearly heading right and behaving as anticipated.
      dep.delta_h = 0.9;
      break;
    case NavFixtureKind::kIrrelevant:
      // Just under the left threshold: mispredicted as left, walks straight.
      dep.delta_h = 0.30;
      dep.actual = HumanClass::kStraight;
      break;
    case NavFixtureKind::kCollision:
      // Just under the right threshold: anticipated straight, turns right
      // into the robot's primary path.
      dep.delta_h = 0.62;
      dep.actual = HumanClass::kRight;
      break;
  }
  // The deployment commits to the encoder's most likely code, which isolates
  // the effect of the human's realized behavior.
  const std::vector<double>& row = cb.EncoderRow(dep.delta_h, dep.goal);
  const int code =
      static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  Rng draw(rng.Derive(1));
  const std::vector<double>& mean = cb.mean[static_cast<std::size_t>(code)];
  for (int d = 0; d < cb.dims(); ++d) {
    const double x = mean[d] + cb.noise_sigma * draw.Normal();
    (d < cb.robot_len ? dep.executed_robot : dep.anticipated_human).push_back(x);
  }
  dep.anticipated = static_cast<HumanClass>(code / 2);
  if (kind == NavFixtureKind::kNominal) dep.actual = dep.anticipated;
  Rng walk(rng.Derive(2));
  dep.observed_human = SimulateHuman(geo, dep.actual, &walk);
  dep.regret = GenerativeRegret(cb, dep.executed_robot, dep.observed_human,
                                dep.delta_h, dep.goal, DefaultHindsightSet(geo),
                                settings, rng.Derive(3));
  return dep;
}

// ---------------------------------------------------------------------------

void ValidateSensor(const SensorModel& sensor) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(sensor.detect_true_positive) || !prob(sensor.detect_false_positive)) {
    throw Error(ErrorCode::kInvalidArgument, "sensor probabilities must lie in [0, 1]");
  }
  if (sensor.injected_fault < -1 || sensor.injected_fault > 1) {
    throw Error(ErrorCode::kInvalidArgument, "injected fault must be -1, 0 or 1");
  }
}

int Sense(const SensorModel& sensor, bool obstacle, Rng& rng) {
  ValidateSensor(sensor);
  if (sensor.injected_fault >= 0) return sensor.injected_fault;
  const double p = obstacle ? sensor.detect_true_positive : sensor.detect_false_positive;
  return rng.Uniform() < p ? 1 : 0;
}

std::vector<PerceptionResult> PerceptionCaseStudy(
    const SensorModel& sensor, int n_samples_per_condition, const RngStream& rng,
    const KdeSettings& settings, const PerceptionGeometry& pg) {
  ValidateSensor(sensor);
  if (n_samples_per_condition < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need >= 2 samples per condition");
  }
  NavGeometry geo;
  geo.robot_start = pg.robot_start;
  geo.robot_heading = pg.robot_heading;
  geo.dt = pg.dt;
  geo.turn_gain = pg.turn_gain;
  geo.max_turn = pg.max_turn;
  geo.turn_noise = pg.turn_noise;

  // Robot-only demonstrations conditioned on the sensed bit: avoid when an
  // obstacle is reported, go straight otherwise. The bit is carried as the
  // cue (0 or 1) under the primary goal slot.
  std::vector<NavSample> data;
  for (int bit = 0; bit < 2; ++bit) {
    const Vec2& goal = bit == 1 ? pg.goal_avoid : pg.goal_clear;
    for (int i = 0; i < n_samples_per_condition; ++i) {
      Rng draw(rng.Derive(static_cast<std::uint64_t>(bit * 1000003 + i)));
      NavSample s;
      s.delta_h = bit;
      s.goal = NavGoal::kPrimary;
      s.robot_traj = PursuitTurnRates(pg.robot_start, pg.robot_heading, pg.speed,
                                      goal, geo, &draw);
      s.outcome_class = bit;
      data.push_back(std::move(s));
    }
  }
  const Codebook cb = FitCodebook(data, 2);

  std::vector<NavTraj> hindsight;
  const Vec2 middle{(pg.goal_clear.x + pg.goal_avoid.x) / 2.0,
                    (pg.goal_clear.y + pg.goal_avoid.y) / 2.0};
  for (const Vec2& goal : {pg.goal_clear, pg.goal_avoid, middle}) {
    for (double speed : {0.8 * pg.speed, pg.speed, 1.2 * pg.speed}) {
      hindsight.push_back(PursuitTurnRates(pg.robot_start, pg.robot_heading, speed,
                                           goal, geo, nullptr));
    }
  }

  struct Case {
    const char* tag;
    bool obstacle;
    int fault;
  };
  const Case cases[] = {{"obstacle_detected", true, -1},
                        {"obstacle_missed", true, 0},
                        {"empty_clear", false, -1},
                        {"empty_false_alarm", false, 1}};
  std::vector<PerceptionResult> out;
  int index = 0;
  for (const Case& c : cases) {
    SensorModel s = sensor;
    if (c.fault >= 0) s.injected_fault = c.fault;
    Rng draw(rng.Derive(5000 + index));
    PerceptionResult r;
    r.tag = c.tag;
    r.obstacle = c.obstacle;
    r.sensed = Sense(s, c.obstacle, draw);
    // The executed plan is the average of the planner's samples for the
    // sensed bit.
    NavTraj executed(static_cast<std::size_t>(cb.robot_len), 0.0);
    for (int i = 0; i < n_samples_per_condition; ++i) {
      const GenerativePlan plan = PlanGenerative(
          cb, r.sensed, NavGoal::kPrimary,
          rng.Derive(static_cast<std::uint64_t>(9000000 + index * 100003 + i)));
      for (int j = 0; j < cb.robot_len; ++j) executed[j] += plan.robot[j];
    }
    for (double& u : executed) u /= n_samples_per_condition;
    r.regret = GenerativeRegret(cb, executed, std::span<const double>{},
                                c.obstacle ? 1.0 : 0.0, NavGoal::kPrimary,
                                hindsight, settings, rng.Derive(7000 + index));
    out.push_back(std::move(r));
    ++index;
  }
  return out;
}

}  // namespace regret_miner
