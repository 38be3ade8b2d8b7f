#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bcqq/agents.hpp"
#include "bcqq/data.hpp"
#include "bcqq/rng.hpp"

namespace bcqq::bcq {

// Actions whose behavior probability relative to the most likely action
// exceeds tau. Never empty: for tau = 1 the argmax set is returned.
// Throws std::invalid_argument on an invalid distribution or tau outside
// [0, 1].
std::vector<int> batch_constrained_actions(std::span<const double> probs, double tau);

// Argmax of q over `allowed`, ties broken by the smallest action index.
int constrained_argmax(std::span<const double> q, std::span<const int> allowed);

// Greedy batch-constrained policy: filter by the generative probabilities,
// then argmax of Q over the surviving actions.
int policy_action(const Agent& agent, const std::array<double, 4>& s, double tau);
int policy_action_sampled(const Agent& agent, const std::array<double, 4>& s, double tau,
                          int shots, Rng& rng);

// Regression targets with the double-DQN rule: a' is chosen by the online
// Q over the constrained set of s', evaluated by the target network.
// done == 1 cuts bootstrapping (target = r); truncation (done == 2)
// bootstraps.
std::vector<double> td_targets(const Agent& agent, std::span<const data::Transition> batch,
                               double gamma, double tau);

struct TrainConfig {
    AgentConfig agent;
    double gamma = 0.99;
    double tau = 0.3;
    int minibatch = 32;
    long max_updates = 25000;
    long target_period = 100;
    long eval_every = 100;
    bool early_stop = true;
    int eval_episodes = 10;
    int shots = 0; // validation readout; 0 = exact expectations
    std::uint64_t seed = 1;

    void validate() const;
};

struct EvalPoint {
    long update = 0;
    double mean_reward = 0.0;
    double td_loss = 0.0;
    double gen_loss = 0.0;
};

struct RunRecord {
    std::uint64_t seed = 0;
    std::vector<EvalPoint> points;
    long total_updates = 0;
    bool early_stopped = false;
    double best_mean_reward = 0.0;
    long best_update = 0;
    double final_mean_reward = 0.0;
    long q_evaluations = 0;
    long gen_evaluations = 0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    RunRecord record;
    std::unique_ptr<Agent> final_agent;
    std::unique_ptr<Agent> best_agent; // highest mean validation reward, earliest on ties
};

// Offline training per the batch-constrained algorithm: sample minibatch,
// compute targets, optimize the Q model, optimize the generative model,
// hard-sync the target every target_period updates. Evaluates on
// eval_episodes fixed seeded validation environments at update 0, every
// eval_every updates, and at the end; with early_stop, training halts once
// every validation episode reaches reward 500. Throws std::runtime_error
// when a loss turns non-finite and std::invalid_argument when the buffer's
// recorded normalization bounds disagree with the trainer's.
TrainResult train(const TrainConfig& cfg, const data::Buffer& buffer);

struct EvalResult {
    std::vector<double> rewards;
    double mean() const;
};

// Seeded validation episodes under the batch-constrained greedy policy.
// Episode i draws its environment stream from eval_base.fork(2i) and its
// readout-sampling stream from eval_base.fork(2i + 1); shots = 0 evaluates
// exact expectations.
EvalResult evaluate(const Agent& agent, double tau, int episodes, const Rng& eval_base,
                    int shots = 0);

// Steps survived per seed with the 500-step truncation lifted, capped at
// `cap`.
std::vector<long> globality_survival(const Agent& agent, double tau,
                                     std::span<const std::uint64_t> seeds,
                                     long cap = 100000);

struct ShotsPoint {
    int shots = 0; // 0 = exact
    std::vector<double> rewards;
    double mean_reward = 0.0;
};

// Evaluation sweep over shot counts with a shared seed, so the exact row
// (shots = 0) reproduces the training-time validation of the same seed.
std::vector<ShotsPoint> shots_study(const Agent& agent, double tau,
                                    std::span<const int> shot_counts, int episodes,
                                    std::uint64_t seed);

// RunRecord CSV rows are `update,mean_reward,td_loss,gen_loss,seed` after a
// `# spec_hash=...` comment line carrying the experiment identity.
void write_run_csv(const RunRecord& rec, const std::string& path,
                   const std::string& spec_hash);

} // namespace bcqq::bcq
