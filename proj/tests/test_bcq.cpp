#include "doctest.h"

#include <stdexcept>

#include <array>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bcqq/agents.hpp"
#include "bcqq/bcq.hpp"
#include "bcqq/bytesio.hpp"
#include "bcqq/data.hpp"
#include "bcqq/env.hpp"
#include "bcqq/rng.hpp"

using namespace bcqq;

namespace {

std::string tmp_file(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

// Table-driven agent: behavior is a pure function of the state, so target
// values can be computed by hand.
struct TableAgent final : bcq::Agent {
    using Fn = std::function<std::array<double, 2>(const std::array<double, 4>&)>;
    bcq::AgentConfig cfg{};
    Fn q_fn, target_fn, gen_fn;

    const bcq::AgentConfig& config() const override { return cfg; }
    int num_actions() const override { return 2; }
    std::size_t trainable_count() const override { return 0; }
    std::array<double, 2> q_values(const std::array<double, 4>& s) const override { return q_fn(s); }
    std::array<double, 2> q_values_target(const std::array<double, 4>& s) const override {
        return target_fn(s);
    }
    std::array<double, 2> gen_probs(const std::array<double, 4>& s) const override {
        return gen_fn(s);
    }
    bcq::UpdateResult update_q(std::span<const data::Transition>, std::span<const double>,
                               Rng&) override {
        return {};
    }
    bcq::UpdateResult update_gen(std::span<const data::Transition>, Rng&) override { return {}; }
    void sync_target() override {}
    void save(const std::string&) const override {}
    void export_models(const std::string&) const override {}
    std::unique_ptr<bcq::Agent> clone() const override { return nullptr; }
};

data::Buffer random_buffer(std::size_t count, std::uint64_t seed) {
    Rng env_rng = Rng(seed).substream("env");
    return data::collect_transitions(
        count, [](const std::array<double, 4>&, Rng& r) { return static_cast<int>(r.below(2)); },
        env_rng, {{"policy", "random"}, {"seed", std::to_string(seed)}});
}

bcq::TrainConfig small_train_config() {
    bcq::TrainConfig cfg;
    cfg.agent.kind = bcq::AgentKind::Quantum;
    cfg.agent.encoding = ansatz::Encoding::CyclicDru;
    cfg.agent.layers = 2;
    cfg.agent.grad = bcq::GradMethod::Spsa;
    cfg.agent.optimizer = optim::Kind::Amsgrad;
    cfg.agent.lr = 0.01;
    cfg.minibatch = 8;
    cfg.max_updates = 12;
    cfg.eval_every = 5;
    cfg.early_stop = false;
    cfg.eval_episodes = 2;
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST_SUITE("bcq") {

TEST_CASE("constraint set keeps actions above the relative threshold") {
    const std::vector<double> skewed{0.9, 0.1};
    CHECK(bcq::batch_constrained_actions(skewed, 0.3) == std::vector<int>{0});

    const std::vector<double> close{0.6, 0.4};
    CHECK(bcq::batch_constrained_actions(close, 0.3) == std::vector<int>{0, 1});

    // 0.1 / 0.9 > 0.05, so a loose threshold keeps both.
    CHECK(bcq::batch_constrained_actions(skewed, 0.05) == std::vector<int>{0, 1});
}

TEST_CASE("threshold one reduces to the argmax set") {
    const std::vector<double> tied{0.5, 0.5};
    CHECK(bcq::batch_constrained_actions(tied, 1.0) == std::vector<int>{0, 1});

    const std::vector<double> ordered{0.4, 0.6};
    CHECK(bcq::batch_constrained_actions(ordered, 1.0) == std::vector<int>{1});
}

TEST_CASE("threshold zero keeps the whole support") {
    const std::vector<double> with_zero{0.0, 1.0};
    CHECK(bcq::batch_constrained_actions(with_zero, 0.0) == std::vector<int>{1});

    const std::vector<double> tied{0.5, 0.5};
    CHECK(bcq::batch_constrained_actions(tied, 0.0) == std::vector<int>{0, 1});
}

TEST_CASE("constraint set rejects bad input") {
    CHECK_THROWS_AS(bcq::batch_constrained_actions(std::vector<double>{}, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(bcq::batch_constrained_actions(std::vector<double>{-0.1, 1.1}, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(bcq::batch_constrained_actions(std::vector<double>{0.3, 0.3}, 0.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(bcq::batch_constrained_actions(std::vector<double>{0.5, 0.5}, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(bcq::batch_constrained_actions(std::vector<double>{0.5, 0.5}, -0.1),
                    std::invalid_argument);
}

TEST_CASE("constrained argmax breaks ties toward the smaller action") {
    const std::vector<double> q{1.0, 1.0};
    const std::vector<int> both{0, 1};
    CHECK(bcq::constrained_argmax(q, both) == 0);

    const std::vector<int> reversed{1, 0};
    CHECK(bcq::constrained_argmax(q, reversed) == 0);

    const std::vector<double> q2{1.0, 2.0};
    const std::vector<int> only_zero{0};
    CHECK(bcq::constrained_argmax(q2, only_zero) == 0);
    CHECK(bcq::constrained_argmax(q2, both) == 1);

    CHECK_THROWS_AS(bcq::constrained_argmax(q, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("policy action filters by behavior probabilities before the argmax") {
    TableAgent agent;
    agent.q_fn = [](const std::array<double, 4>&) { return std::array<double, 2>{10.0, 0.0}; };
    agent.target_fn = agent.q_fn;
    agent.gen_fn = [](const std::array<double, 4>&) { return std::array<double, 2>{0.05, 0.95}; };

    const std::array<double, 4> s{0.0, 0.0, 0.0, 0.0};
    // 0.05 / 0.95 < 0.3 removes action 0, so its large Q value is ignored.
    CHECK(bcq::policy_action(agent, s, 0.3) == 1);
    // With the constraint off the argmax wins.
    CHECK(bcq::policy_action(agent, s, 0.0) == 0);

    // The default sampled readout falls back to exact values.
    Rng rng(4);
    CHECK(bcq::policy_action_sampled(agent, s, 0.3, 64, rng) == 1);
}

TEST_CASE("td targets follow the constrained double-estimator rule") {
    TableAgent agent;
    agent.gen_fn = [](const std::array<double, 4>&) { return std::array<double, 2>{0.9, 0.1}; };
    agent.q_fn = [](const std::array<double, 4>&) { return std::array<double, 2>{0.2, 5.0}; };
    agent.target_fn = [](const std::array<double, 4>&) { return std::array<double, 2>{0.7, 9.9}; };

    data::Transition step;
    step.reward = 1.0;
    step.sp = {0.1, 0.2, 0.3, 0.4};

    data::Transition terminal = step;
    terminal.reward = 2.5;
    terminal.done = 1;

    data::Transition truncated = step;
    truncated.done = 2;

    const std::vector<data::Transition> batch{step, terminal, truncated};

    // tau = 0.3 restricts s' to action 0: the online argmax never sees the
    // large Q of action 1, and the target net scores the survivor.
    const auto y = bcq::td_targets(agent, batch, 0.99, 0.3);
    REQUIRE(y.size() == 3);
    CHECK(y[0] == doctest::Approx(1.0 + 0.99 * 0.7).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(2.5).epsilon(1e-12));   // terminal: no bootstrap
    CHECK(y[2] == doctest::Approx(y[0]).epsilon(1e-12));  // truncation bootstraps

    // Without the constraint the online argmax picks action 1.
    const auto y_free = bcq::td_targets(agent, batch, 0.99, 0.0);
    CHECK(y_free[0] == doctest::Approx(1.0 + 0.99 * 9.9).epsilon(1e-12));

    // gamma = 1 keeps the raw bootstrap value.
    const auto y_undiscounted = bcq::td_targets(agent, batch, 1.0, 0.3);
    CHECK(y_undiscounted[0] == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("generative update concentrates on the observed action") {
    bcq::AgentConfig cfg;
    cfg.kind = bcq::AgentKind::Classical;
    cfg.hidden = 5;
    cfg.grad = bcq::GradMethod::Backprop;
    cfg.optimizer = optim::Kind::Adam;
    cfg.lr = 0.05;
    Rng init(3);
    auto agent = bcq::make_agent(cfg, init);

    data::Transition t;
    t.s = {0.1, 0.2, -0.1, 0.05};
    t.action = 1;
    const std::vector<data::Transition> batch{t};

    Rng grad_rng(9);
    for (int i = 0; i < 300; ++i) agent->update_gen(batch, grad_rng);
    const auto probs = agent->gen_probs(t.s);
    CHECK(probs[1] > 0.99);
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("target network stays fixed until the hard sync") {
    bcq::AgentConfig cfg;
    cfg.layers = 2;
    Rng init(11);
    auto agent = bcq::make_agent(cfg, init);

    const std::array<double, 4> probe{0.3, -0.2, 0.1, 0.6};
    const auto before = agent->q_values_target(probe);
    CHECK(before[0] == agent->q_values(probe)[0]);

    data::Transition t;
    t.s = probe;
    t.sp = probe;
    const std::vector<data::Transition> batch{t};
    const std::vector<double> targets{1.0};
    Rng grad_rng(2);
    for (int i = 0; i < 3; ++i) agent->update_q(batch, targets, grad_rng);

    const auto online = agent->q_values(probe);
    const auto stale = agent->q_values_target(probe);
    CHECK(stale[0] == before[0]);
    CHECK(stale[1] == before[1]);
    CHECK(online[0] != stale[0]);

    agent->sync_target();
    const auto synced = agent->q_values_target(probe);
    CHECK(synced[0] == online[0]);
    CHECK(synced[1] == online[1]);
}

TEST_CASE("training reports the scheduled evaluation points") {
    const bcq::TrainConfig cfg = small_train_config();
    const data::Buffer buffer = random_buffer(40, 7);
    const bcq::TrainResult result = bcq::train(cfg, buffer);

    REQUIRE(result.record.points.size() == 4);
    CHECK(result.record.points[0].update == 0);
    CHECK(result.record.points[1].update == 5);
    CHECK(result.record.points[2].update == 10);
    CHECK(result.record.points[3].update == 12);

    // Nothing has been optimized at update 0, so the losses read zero.
    CHECK(result.record.points[0].td_loss == 0.0);
    CHECK(result.record.points[0].gen_loss == 0.0);
    CHECK(result.record.points[1].td_loss > 0.0);

    CHECK(result.record.total_updates == 12);
    CHECK_FALSE(result.record.early_stopped);
    CHECK(result.record.seed == 5);
    CHECK(result.record.final_mean_reward == result.record.points.back().mean_reward);

    double best = 0.0;
    for (const auto& p : result.record.points) best = std::max(best, p.mean_reward);
    CHECK(result.record.best_mean_reward == best);
    CHECK(result.record.wall_seconds > 0.0);

    // Two loss probes per update for the simultaneous-perturbation estimate.
    CHECK(result.record.q_evaluations == 2 * 12);
    CHECK(result.record.gen_evaluations == 2 * 12);

    REQUIRE(result.final_agent != nullptr);
    REQUIRE(result.best_agent != nullptr);
}

TEST_CASE("training is a pure function of config and buffer") {
    const bcq::TrainConfig cfg = small_train_config();
    const data::Buffer buffer = random_buffer(40, 7);

    const bcq::TrainResult a = bcq::train(cfg, buffer);
    const bcq::TrainResult b = bcq::train(cfg, buffer);

    REQUIRE(a.record.points.size() == b.record.points.size());
    for (std::size_t i = 0; i < a.record.points.size(); ++i) {
        CHECK(a.record.points[i].update == b.record.points[i].update);
        CHECK(a.record.points[i].mean_reward == b.record.points[i].mean_reward);
        CHECK(a.record.points[i].td_loss == b.record.points[i].td_loss);
        CHECK(a.record.points[i].gen_loss == b.record.points[i].gen_loss);
    }

    const std::string pa = tmp_file("bcq_train_a.bcqa");
    const std::string pb = tmp_file("bcq_train_b.bcqa");
    a.final_agent->save(pa);
    b.final_agent->save(pb);
    CHECK(bytesio::read_file(pa) == bytesio::read_file(pb));
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}

TEST_CASE("training refuses a buffer with foreign normalization bounds") {
    const bcq::TrainConfig cfg = small_train_config();
    data::Buffer buffer = random_buffer(40, 7);
    buffer.metadata["norm_bounds"] = "1,1,1,1";
    CHECK_THROWS_WITH_AS(bcq::train(cfg, buffer),
                         doctest::Contains("normalization bounds"), std::invalid_argument);
}

TEST_CASE("training rejects an empty buffer and bad settings") {
    bcq::TrainConfig cfg = small_train_config();
    CHECK_THROWS_AS(bcq::train(cfg, data::Buffer{}), std::invalid_argument);

    const data::Buffer buffer = random_buffer(10, 1);
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(bcq::train(cfg, buffer), std::invalid_argument);
    cfg = small_train_config();
    cfg.tau = 1.5;
    CHECK_THROWS_AS(bcq::train(cfg, buffer), std::invalid_argument);
    cfg = small_train_config();
    cfg.minibatch = 0;
    CHECK_THROWS_AS(bcq::train(cfg, buffer), std::invalid_argument);
    cfg = small_train_config();
    cfg.shots = -1;
    CHECK_THROWS_AS(bcq::train(cfg, buffer), std::invalid_argument);
}

TEST_CASE("evaluation replays exactly under a fixed seed") {
    bcq::AgentConfig cfg;
    cfg.layers = 2;
    Rng init(21);
    const auto agent = bcq::make_agent(cfg, init);

    const bcq::EvalResult a = bcq::evaluate(*agent, 0.3, 5, Rng(9));
    const bcq::EvalResult b = bcq::evaluate(*agent, 0.3, 5, Rng(9));
    REQUIRE(a.rewards.size() == 5);
    CHECK(a.rewards == b.rewards);

    double sum = 0.0;
    for (const double r : a.rewards) {
        CHECK(r >= 1.0);
        CHECK(r <= 500.0);
        sum += r;
    }
    CHECK(a.mean() == doctest::Approx(sum / 5.0).epsilon(1e-12));

    const bcq::EvalResult c = bcq::evaluate(*agent, 0.3, 5, Rng(10));
    CHECK(a.rewards != c.rewards);
}

TEST_CASE("uncapped survival is seeded and bounded by the cap") {
    bcq::AgentConfig cfg;
    cfg.layers = 2;
    Rng init(13);
    const auto agent = bcq::make_agent(cfg, init);

    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const auto a = bcq::globality_survival(*agent, 0.3, seeds, 200);
    const auto b = bcq::globality_survival(*agent, 0.3, seeds, 200);
    REQUIRE(a.size() == 3);
    CHECK(a == b);
    for (const long steps : a) {
        CHECK(steps >= 1);
        CHECK(steps <= 200);
    }
}

TEST_CASE("shot sweep shares the evaluation stream with exact validation") {
    bcq::AgentConfig cfg;
    cfg.layers = 2;
    Rng init(17);
    const auto agent = bcq::make_agent(cfg, init);

    const std::vector<int> counts{0, 8};
    const auto sweep = bcq::shots_study(*agent, 0.3, counts, 2, 11);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].shots == 0);
    CHECK(sweep[1].shots == 8);

    const bcq::EvalResult exact = bcq::evaluate(*agent, 0.3, 2, Rng(11).substream("eval"), 0);
    CHECK(sweep[0].rewards == exact.rewards);
    CHECK(sweep[0].mean_reward == doctest::Approx(exact.mean()).epsilon(1e-12));
    REQUIRE(sweep[1].rewards.size() == 2);
}

TEST_CASE("run record serializes with the experiment hash up front") {
    bcq::RunRecord rec;
    rec.seed = 3;
    rec.points = {{0, 9.5, 0.0, 0.0}, {5, 10.0, 0.25, 0.125}};

    const std::string path = tmp_file("bcq_run.csv");
    bcq::write_run_csv(rec, path, "00ff00ff00ff00ff");
    const std::string text = bytesio::read_file(path);
    std::remove(path.c_str());

    CHECK(text ==
          "# spec_hash=00ff00ff00ff00ff\n"
          "update,mean_reward,td_loss,gen_loss,seed\n"
          "0,9.5,0,0,3\n"
          "5,10,0.25,0.125,3\n");
}

}  // TEST_SUITE
