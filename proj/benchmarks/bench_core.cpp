#include <benchmark/benchmark.h>

#include <vector>

#include "xpmarl/envs/scenario.hpp"
#include "xpmarl/harness/experiment.hpp"
#include "xpmarl/learner/gae.hpp"
#include "xpmarl/learner/mlp.hpp"
#include "xpmarl/pipeline.hpp"
#include "xpmarl/prioritization.hpp"
#include "xpmarl/rng.hpp"

using namespace xpmarl;

namespace {

void BM_MlpForward(benchmark::State& state) {
  const Mlp mlp(MlpArchitecture{24, {64, 64}, 4});
  Rng rng(1);
  const Eigen::VectorXd params = mlp.initial_parameters(rng, 1.0);
  const Eigen::MatrixXd inputs = Eigen::MatrixXd::Random(24, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mlp.forward(params, inputs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(8)->Arg(500);

void BM_MlpBackward(benchmark::State& state) {
  const Mlp mlp(MlpArchitecture{24, {64, 64}, 4});
  Rng rng(2);
  const Eigen::VectorXd params = mlp.initial_parameters(rng, 1.0);
  const Eigen::MatrixXd inputs = Eigen::MatrixXd::Random(24, 500);
  const Eigen::MatrixXd grad_out = Eigen::MatrixXd::Ones(4, 500);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
  Mlp::Cache cache;
  for (auto _ : state) {
    mlp.forward(params, inputs, cache);
    mlp.backward(params, cache, grad_out, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_MlpBackward);

void BM_ArgsortDesc(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (auto& s : scores) s = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(argsort_desc(scores));
}
BENCHMARK(BM_ArgsortDesc)->Arg(4)->Arg(16);

void BM_Gae(benchmark::State& state) {
  const std::size_t n = 2000;
  Rng rng(4);
  std::vector<double> rewards(n), values(n);
  std::vector<bool> dones(n, false);
  for (std::size_t t = 0; t < n; ++t) {
    rewards[t] = rng.normal();
    values[t] = rng.normal();
    dones[t] = (t + 1) % 200 == 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(compute_gae(rewards, values, dones, 0.99, 0.95));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Gae);

void BM_TrafficEnvStep(benchmark::State& state) {
  const Scenario scenario = load_scenario(XPMARL_SOURCE_DIR "/scenarios/desk_traffic.json");
  auto env = make_env(scenario, static_cast<int>(state.range(0)), 1'000'000);
  env->reset(5);
  JointAction actions{std::vector<Vector>(static_cast<std::size_t>(state.range(0)), Vector{1.0, 0.0})};
  for (auto _ : state) {
    auto r = env->step(actions);
    if (r.done) env->reset(5);
    benchmark::DoNotOptimize(r.team_reward);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrafficEnvStep)->Arg(4)->Arg(8);

// A full evaluation step: priorities, sequential decisions, environment.
void BM_PipelineStep(benchmark::State& state) {
  ExperimentConfig config = load_config(XPMARL_SOURCE_DIR "/configs/grid_traffic.json");
  config.train_env_steps = config.decision_learner.rollout_steps;
  const Checkpoint cp = train_model(config, 0).checkpoint;
  const PipelineWiring wiring = cp.wiring();
  const PolicySet policies = cp.policies();
  auto env = make_env(config.scenario, config.eval_agents, 1'000'000, cp.layout.k_obs);
  StepStreams streams(7);
  JointObservation obs = env->reset(7);
  for (auto _ : state) {
    const StepDecision d =
        decide_step(wiring, obs, env->observable_sets(cp.layout.k_obs), policies, cp.layout, ActMode::Mean, streams);
    StepResult r = env->step(d.decision.joint_action);
    obs = r.done ? env->reset(7) : std::move(r.observation);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PipelineStep);

}  // namespace

BENCHMARK_MAIN();
