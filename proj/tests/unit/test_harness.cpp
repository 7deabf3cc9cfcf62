#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "xpmarl/envs/grid_traffic.hpp"
#include "xpmarl/errors.hpp"
#include "xpmarl/harness/checkpoint.hpp"
#include "xpmarl/harness/config.hpp"
#include "xpmarl/harness/experiment.hpp"
#include "xpmarl/harness/metrics.hpp"
#include "xpmarl/harness/report.hpp"
#include "xpmarl/harness/trajectory_log.hpp"
#include "xpmarl/harness/variant.hpp"

using namespace xpmarl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() /
                       ("xpmarl_" + std::string(info->test_suite_name()) + "_" + info->name() + "_" +
                        std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A small traffic setup that trains in well under a second.
ExperimentConfig tiny_traffic_config(Variant variant) {
  ExperimentConfig c;
  c.variant = variant;
  c.scenario = default_traffic_scenario();
  c.train_agents = 3;
  c.eval_agents = 4;
  c.train_env_steps = 300;
  c.train_horizon = 50;
  c.eval_episodes = 2;
  c.eval_horizon = 40;
  c.k_obs = 2;
  for (auto* hp : {&c.priority_learner, &c.decision_learner}) {
    hp->hidden = {8};
    hp->rollout_steps = 100;
    hp->minibatch_size = 60;
  }
  return c;
}

EvaluationOptions eval_options(const ExperimentConfig& c) {
  EvaluationOptions o;
  o.episodes = c.eval_episodes;
  o.horizon = c.eval_horizon;
  return o;
}

// Every spawn point lies within two radii of every other, and nobody moves.
Checkpoint stationary_pile_checkpoint() {
  TrafficScenario s = default_traffic_scenario();
  s.lanes = {LaneSpec{"dot", {{0.0, 0.0}, {0.02, 0.0}, {0.02, 0.02}}, true, 0.125, std::nullopt}};
  s.spawn = SpawnSpec{{}, 0.0, 0.0, 0.0};
  s.k_obs = 1;
  ExperimentConfig c;
  c.variant = Variant::Vanilla;
  c.scenario = s;
  c.eval_agents = 2;
  c.k_obs = 1;
  Checkpoint cp;
  cp.config = c;
  cp.config_hash = config_hash(c);
  cp.layout = SlotLayout{1, 2};
  cp.obs_dim = traffic_obs_dim(1);
  Actor zero(cp.obs_dim + cp.layout.width(), {4}, GridTraffic(s, 2, 10).action_spec());
  zero.parameters().setZero();
  cp.decision_actor = zero;
  return cp;
}

}  // namespace

TEST(Variants, ParseAndPrint) {
  for (Variant v : kAllVariants) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
    EXPECT_EQ(parse_variant(short_name(v)), v);
  }
  EXPECT_EQ(to_string(Variant::Vanilla), "M2_vanilla");
  EXPECT_THROW(parse_variant("M6"), ConfigError);
  EXPECT_THROW(parse_variant(""), ConfigError);
}

TEST(Variants, WiringMatchesTheModelDefinitions) {
  const NoiseSpec noise{0.1};
  const auto m1 = wire_variant(Variant::XpMarl, noise);
  EXPECT_EQ(m1.priority, PrioritySource::Learned);
  EXPECT_EQ(m1.slots, SlotSource::Propagated);
  EXPECT_FALSE(m1.noise.active());
  const auto m2 = wire_variant(Variant::Vanilla, noise);
  EXPECT_EQ(m2.priority, PrioritySource::None);
  EXPECT_EQ(m2.slots, SlotSource::Empty);
  const auto m3 = wire_variant(Variant::OpponentModel, noise);
  EXPECT_EQ(m3.priority, PrioritySource::None);
  EXPECT_EQ(m3.slots, SlotSource::Predicted);
  const auto m4 = wire_variant(Variant::RandomPriority, noise);
  EXPECT_EQ(m4.priority, PrioritySource::Random);
  EXPECT_EQ(m4.slots, SlotSource::Propagated);
  const auto m5 = wire_variant(Variant::NoisyComm, noise);
  EXPECT_EQ(m5.priority, PrioritySource::Learned);
  EXPECT_EQ(m5.noise.variance_fraction, 0.1);
}

TEST(Variants, ZeroNoiseM5IsBitIdenticalToM1) {
  auto m1 = tiny_traffic_config(Variant::XpMarl);
  auto m5 = tiny_traffic_config(Variant::NoisyComm);
  m5.noise = NoiseSpec{0.0};
  const auto a = train_model(m1, 4);
  const auto b = train_model(m5, 4);
  ASSERT_EQ(a.curve.episodes.size(), b.curve.episodes.size());
  for (std::size_t i = 0; i < a.curve.episodes.size(); ++i) {
    EXPECT_EQ(a.curve.episodes[i].team_return, b.curve.episodes[i].team_return);
  }
  std::vector<TrajectoryRow> ta;
  std::vector<TrajectoryRow> tb;
  evaluate(a.checkpoint, eval_options(m1), &ta);
  evaluate(b.checkpoint, eval_options(m5), &tb);
  std::ostringstream sa;
  std::ostringstream sb;
  for (const auto& r : ta) write_trajectory_row(sa, r);
  for (const auto& r : tb) write_trajectory_row(sb, r);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Variants, BaselinesCarryNoPriorityActor) {
  const auto m2 = train_model(tiny_traffic_config(Variant::Vanilla), 1);
  EXPECT_FALSE(m2.checkpoint.priority_actor.has_value());
  const auto m4 = train_model(tiny_traffic_config(Variant::RandomPriority), 1);
  EXPECT_FALSE(m4.checkpoint.priority_actor.has_value());
  const auto m1 = train_model(tiny_traffic_config(Variant::XpMarl), 1);
  EXPECT_TRUE(m1.checkpoint.priority_actor.has_value());
}

TEST(Config, ArchitectureHashIsSharedAcrossVariants) {
  const auto base = architecture_hash(tiny_traffic_config(Variant::XpMarl));
  for (Variant v : kAllVariants) EXPECT_EQ(architecture_hash(tiny_traffic_config(v)), base);
  auto wider = tiny_traffic_config(Variant::XpMarl);
  wider.decision_learner.hidden = {16};
  EXPECT_NE(architecture_hash(wider), base);
  EXPECT_NE(config_hash(tiny_traffic_config(Variant::Vanilla)), config_hash(tiny_traffic_config(Variant::XpMarl)));
}

TEST(Config, RoundTripsThroughJson) {
  const auto c = tiny_traffic_config(Variant::RandomPriority);
  const auto text = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(text)), text);
  EXPECT_EQ(config_hash(parse_config(text)), config_hash(c));
}

TEST(Config, ShippedConfigsLoad) {
  const fs::path dir = fs::path(XPMARL_SOURCE_DIR) / "configs";
  const auto nav = load_config(dir / "nav_game.json");
  EXPECT_EQ(scenario_kind(nav.scenario), "nav_game");
  EXPECT_EQ(nav.seeds.size(), 10u);
  const auto traffic = load_config(dir / "grid_traffic.json");
  EXPECT_EQ(scenario_kind(traffic.scenario), "grid_traffic");
  EXPECT_EQ(traffic.train_agents, 4);
  EXPECT_EQ(traffic.eval_agents, 8);
  EXPECT_EQ(traffic.eval_horizon, 300);
}

TEST(Config, RejectsInvalidDocuments) {
  const std::string ok = config_to_json(tiny_traffic_config(Variant::XpMarl));
  EXPECT_NO_THROW(parse_config(ok));
  const auto with = [&](const std::string& key, const std::string& value) {
    std::string t = ok;
    const auto pos = t.find('{');
    t.insert(pos + 1, "\"" + key + "\": " + value + ",");
    return t;
  };
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config(with("unknown_key", "1")), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 1, "variant": "M9"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema_version": 7})"), ConfigError);
  EXPECT_THROW(load_config(fs::path(XPMARL_SOURCE_DIR) / "configs" / "does_not_exist.json"), ConfigError);
}

TEST(Metrics, SlidingWindowExamples) {
  const std::vector<double> spike{0, 0, 0, 0, 5};
  EXPECT_DOUBLE_EQ(sliding_window_mean(spike, 5).back(), 1.0);
  const std::vector<double> constant(12, 3.25);
  EXPECT_EQ(sliding_window_mean(constant, 5), constant);
  const std::vector<double> ramp{1, 2, 3};
  EXPECT_EQ(sliding_window_mean(ramp, 5), (std::vector<double>{1.0, 1.5, 2.0}));
}

TEST(Metrics, ImprovementPercentages) {
  EXPECT_NEAR(improvement_pct(0.0109, 0.0017), 84.4, 0.05);
  EXPECT_DOUBLE_EQ(improvement_pct(0.02, 0.01), 50.0);
  EXPECT_DOUBLE_EQ(improvement_pct(0.3, 0.3), 0.0);
}

TEST(Metrics, QuantilesInterpolate) {
  const std::vector<double> d{4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(quantile(d, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(d, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(std::vector<double>{0, 1}, 0.5), 0.5);
  const auto s = summarize(d);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.max, 5.0);
  EXPECT_EQ(s.mean, 3.0);
  EXPECT_EQ(s.count, 5u);
}

TEST(Evaluation, AlwaysCollidingPairHasRateOne) {
  EvaluationOptions o;
  o.episodes = 3;
  o.horizon = 25;
  const auto report = evaluate(stationary_pile_checkpoint(), o);
  ASSERT_EQ(report.episodes.size(), 3u);
  for (const auto& e : report.episodes) {
    EXPECT_EQ(e.collision_rate, 1.0);
    EXPECT_EQ(e.collision_steps, 25);
  }
  EXPECT_EQ(report.collision_rate.median, 1.0);
}

TEST(Evaluation, StationaryAgentsHaveZeroSpeed) {
  EvaluationOptions o;
  o.episodes = 2;
  o.horizon = 10;
  const auto report = evaluate(stationary_pile_checkpoint(), o);
  for (const auto& e : report.episodes) EXPECT_EQ(e.relative_average_speed, 0.0);
}

TEST(Evaluation, RecountFromTrajectoryMatchesReport) {
  const auto c = tiny_traffic_config(Variant::XpMarl);
  const auto trained = train_model(c, 2);
  std::vector<TrajectoryRow> rows;
  const auto report = evaluate(trained.checkpoint, eval_options(c), &rows);
  const auto recount = recount_metrics(rows, 1.0);
  ASSERT_EQ(recount.size(), report.episodes.size());
  for (std::size_t i = 0; i < recount.size(); ++i) {
    EXPECT_EQ(recount[i].steps, report.episodes[i].steps);
    EXPECT_EQ(recount[i].collision_steps, report.episodes[i].collision_steps);
    EXPECT_NEAR(recount[i].collision_rate, report.episodes[i].collision_rate, 1e-12);
    EXPECT_NEAR(recount[i].relative_average_speed, report.episodes[i].relative_average_speed, 1e-12);
  }
}

TEST(Evaluation, RejectsScenarioWithOtherObservationWidth) {
  const auto c = tiny_traffic_config(Variant::Vanilla);
  const auto trained = train_model(c, 0);
  auto o = eval_options(c);
  o.scenario = Scenario{NavGameScenario{}};
  o.num_agents = 2;
  EXPECT_THROW(evaluate(trained.checkpoint, o), ConfigError);
}

TEST(Evaluation, SameSeedGivesIdenticalFiles) {
  const auto dir = scratch_dir();
  const auto c = tiny_traffic_config(Variant::RandomPriority);
  const auto a = run_training(c, 9, dir / "a");
  const auto b = run_training(c, 9, dir / "b");
  EXPECT_EQ(read_bytes(dir / "a" / "curve.csv"), read_bytes(dir / "b" / "curve.csv"));
  EXPECT_EQ(read_bytes(dir / "a" / "checkpoint.json"), read_bytes(dir / "b" / "checkpoint.json"));
  run_evaluation(a.checkpoint, eval_options(c), dir / "a" / "eval");
  run_evaluation(b.checkpoint, eval_options(c), dir / "b" / "eval");
  const auto traj = read_bytes(dir / "a" / "eval" / "trajectory.csv");
  EXPECT_FALSE(traj.empty());
  EXPECT_EQ(traj, read_bytes(dir / "b" / "eval" / "trajectory.csv"));
  EXPECT_EQ(read_bytes(dir / "a" / "eval" / "metrics.csv"), read_bytes(dir / "b" / "eval" / "metrics.csv"));
  fs::remove_all(dir);
}

TEST(Checkpoint, RoundTripRestoresEvaluation) {
  const auto dir = scratch_dir();
  const auto c = tiny_traffic_config(Variant::XpMarl);
  const auto trained = train_model(c, 3);
  save_checkpoint(trained.checkpoint, dir / "cp.json");
  const auto loaded = load_checkpoint(dir / "cp.json");
  EXPECT_EQ(checkpoint_to_json(loaded), checkpoint_to_json(trained.checkpoint));
  std::vector<TrajectoryRow> ra;
  std::vector<TrajectoryRow> rb;
  const auto ma = evaluate(trained.checkpoint, eval_options(c), &ra);
  const auto mb = evaluate(loaded, eval_options(c), &rb);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].x, rb[i].x);
    EXPECT_EQ(ra[i].speed, rb[i].speed);
  }
  fs::remove_all(dir);
}

TEST(Checkpoint, RejectsTamperedDocuments) {
  const auto text = checkpoint_to_json(stationary_pile_checkpoint());
  EXPECT_THROW(checkpoint_from_json("{}"), ConfigError);
  std::string wrong_hash = text;
  const auto pos = wrong_hash.find("\"config_hash\":");
  ASSERT_NE(pos, std::string::npos);
  wrong_hash.insert(pos + 14, "1");
  EXPECT_THROW(checkpoint_from_json(wrong_hash), ConfigError);
}

TEST(TrajectoryLog, RoundTripsRows) {
  const auto dir = scratch_dir();
  std::vector<TrajectoryRow> rows(3);
  rows[0] = {0, 0, 1, 2, 0.1 + 0.2, {2, 3}, true, -1.25, 1e-17, 0.3333333333333333, false, -2.5};
  rows[1] = {0, 0, 2, 1, -0.0, {}, false, 0.5, 0.25, 1.0, true, -2.5};
  rows[2] = {1, 7, 1, 1, 3.0, {1}, false, 2.0, -2.0, 0.0, false, 0.75};
  {
    std::ofstream out(dir / "t.csv");
    out << kTrajectoryHeader << '\n';
    for (const auto& r : rows) write_trajectory_row(out, r);
  }
  const auto back = read_trajectory_csv(dir / "t.csv");
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].propagated_from, rows[i].propagated_from);
    EXPECT_EQ(back[i].score, rows[i].score);
    EXPECT_EQ(back[i].y, rows[i].y);
    EXPECT_EQ(back[i].speed, rows[i].speed);
    EXPECT_EQ(back[i].in_collision, rows[i].in_collision);
    EXPECT_EQ(back[i].noise_applied, rows[i].noise_applied);
  }
  fs::remove_all(dir);
}

TEST(Report, ComparesAgainstVanillaAndWritesFiles) {
  const auto dir = scratch_dir();
  const auto make = [](const std::string& name, std::vector<double> rates) {
    MetricsReport r;
    r.variant = name;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      EpisodeMetrics e;
      e.episode = static_cast<int>(i);
      e.collision_rate = rates[i];
      e.relative_average_speed = 0.9;
      r.episodes.push_back(e);
    }
    r.finalize();
    return r;
  };
  const auto cmp = emit_report({make("M1_xp", {0.01, 0.01, 0.02}), make("M2_vanilla", {0.02, 0.02, 0.03})}, dir);
  ASSERT_EQ(cmp.size(), 2u);
  EXPECT_DOUBLE_EQ(cmp[0].collision_improvement_pct, 50.0);
  EXPECT_DOUBLE_EQ(cmp[1].collision_improvement_pct, 0.0);
  for (const char* f : {"comparison.csv", "collision_rate.svg", "relative_speed.svg"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_NE(read_bytes(dir / "collision_rate.svg").find("<svg"), std::string::npos);
  const auto single = compare_to_baseline({make("M2_vanilla", {0.02})});
  EXPECT_DOUBLE_EQ(single[0].collision_improvement_pct, 0.0);
  fs::remove_all(dir);
}
