#include "bcqq/bcq.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bcqq/env.hpp"

namespace bcqq::bcq {

std::vector<int> batch_constrained_actions(std::span<const double> probs, double tau) {
    if (probs.empty()) throw std::invalid_argument("empty probability vector");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("probabilities must sum to 1");
    const double pmax = *std::max_element(probs.begin(), probs.end());
    std::vector<int> allowed;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        const bool in = tau == 1.0 ? probs[a] == pmax : probs[a] / pmax > tau;
        if (in) allowed.push_back(static_cast<int>(a));
    }
    return allowed;
}

int constrained_argmax(std::span<const double> q, std::span<const int> allowed) {
    if (allowed.empty()) throw std::invalid_argument("empty action set");
    int best = allowed[0];
    for (int a : allowed) {
        const double qa = q[static_cast<std::size_t>(a)];
        const double qb = q[static_cast<std::size_t>(best)];
        if (qa > qb || (qa == qb && a < best)) best = a;
    }
    return best;
}

int policy_action(const Agent& agent, const std::array<double, 4>& s, double tau) {
    const auto probs = agent.gen_probs(s);
    const auto allowed = batch_constrained_actions(probs, tau);
    const auto q = agent.q_values(s);
    return constrained_argmax(q, allowed);
}

int policy_action_sampled(const Agent& agent, const std::array<double, 4>& s, double tau,
                          int shots, Rng& rng) {
    if (shots <= 0) return policy_action(agent, s, tau);
    const auto probs = agent.gen_probs_sampled(s, shots, rng);
    const auto allowed = batch_constrained_actions(probs, tau);
    const auto q = agent.q_values_sampled(s, shots, rng);
    return constrained_argmax(q, allowed);
}

std::vector<double> td_targets(const Agent& agent, std::span<const data::Transition> batch,
                               double gamma, double tau) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& t = batch[i];
        if (t.done == 1) {
            y[i] = t.reward;
            continue;
        }
        const auto probs = agent.gen_probs(t.sp);
        const auto allowed = batch_constrained_actions(probs, tau);
        const auto q_online = agent.q_values(t.sp);
        const int ap = constrained_argmax(q_online, allowed);
        const auto q_target = agent.q_values_target(t.sp);
        y[i] = t.reward + gamma * q_target[static_cast<std::size_t>(ap)];
    }
    return y;
}

void TrainConfig::validate() const {
    agent.validate();
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
    if (minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
    if (max_updates < 0) throw std::invalid_argument("max_updates must be >= 0");
    if (target_period < 1) throw std::invalid_argument("target_period must be >= 1");
    if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
    if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");
    if (shots < 0) throw std::invalid_argument("shots must be >= 0 (0 = exact)");
}

double EvalResult::mean() const {
    double acc = 0.0;
    for (double r : rewards) acc += r;
    return rewards.empty() ? 0.0 : acc / static_cast<double>(rewards.size());
}

EvalResult evaluate(const Agent& agent, double tau, int episodes, const Rng& eval_base,
                    int shots) {
    EvalResult out;
    out.rewards.reserve(static_cast<std::size_t>(episodes));
    for (int ep = 0; ep < episodes; ++ep) {
        Rng env_rng = eval_base.fork(2 * static_cast<std::uint64_t>(ep));
        Rng shot_rng = eval_base.fork(2 * static_cast<std::uint64_t>(ep) + 1);
        env::CartPole cart;
        env::State s = cart.reset(env_rng);
        double total = 0.0;
        while (true) {
            const auto ns = env::normalize(s);
            const int a = shots > 0 ? policy_action_sampled(agent, ns, tau, shots, shot_rng)
                                    : policy_action(agent, ns, tau);
            // Constraint instrumentation: the executed action must survive
            // the exact-probability filter used by td_targets.
            const auto allowed = batch_constrained_actions(agent.gen_probs(ns), tau);
            if (shots == 0 &&
                std::find(allowed.begin(), allowed.end(), a) == allowed.end())
                throw std::logic_error("policy chose an action outside the constrained set");
            const auto res = cart.step(a);
            total += res.reward;
            if (res.done()) break;
            s = res.state;
        }
        out.rewards.push_back(total);
    }
    return out;
}

TrainResult train(const TrainConfig& cfg, const data::Buffer& buffer) {
    cfg.validate();
    if (buffer.items.empty()) throw std::invalid_argument("training buffer is empty");
    const auto bounds = buffer.metadata.find("norm_bounds");
    if (bounds != buffer.metadata.end() && bounds->second != data::norm_bounds_csv())
        throw std::invalid_argument(
            "buffer normalization bounds '" + bounds->second +
            "' do not match the trainer's bounds '" + data::norm_bounds_csv() + "'");

    const auto t0 = std::chrono::steady_clock::now();
    const Rng root(cfg.seed);
    Rng init = root.substream("init");
    Rng sampling = root.substream("sampling");
    Rng grad_rng = root.substream("spsa");
    const Rng eval_base = root.substream("eval");

    TrainResult result;
    result.record.seed = cfg.seed;
    auto agent = make_agent(cfg.agent, init);

    double last_td = 0.0;
    double last_gen = 0.0;
    const auto run_eval = [&](long update) -> EvalResult {
        const EvalResult ev = evaluate(*agent, cfg.tau, cfg.eval_episodes, eval_base, cfg.shots);
        result.record.points.push_back({update, ev.mean(), last_td, last_gen});
        if (result.record.points.size() == 1 || ev.mean() > result.record.best_mean_reward) {
            result.record.best_mean_reward = ev.mean();
            result.record.best_update = update;
            result.best_agent = agent->clone();
        }
        return ev;
    };

    EvalResult ev = run_eval(0);
    const auto all_solved = [&](const EvalResult& e) {
        return std::all_of(e.rewards.begin(), e.rewards.end(),
                           [](double r) { return r >= 500.0; });
    };

    if (!(cfg.early_stop && all_solved(ev))) {
        for (long u = 1; u <= cfg.max_updates; ++u) {
            const auto idx =
                data::sample_indices(buffer.items.size(), static_cast<std::size_t>(cfg.minibatch),
                                     sampling);
            std::vector<data::Transition> batch(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) batch[i] = buffer.items[idx[i]];

            const auto targets = td_targets(*agent, batch, cfg.gamma, cfg.tau);
            const UpdateResult qr = agent->update_q(batch, targets, grad_rng);
            if (!std::isfinite(qr.loss))
                throw std::runtime_error("training diverged: TD loss not finite at update " +
                                         std::to_string(u));
            const UpdateResult gr = agent->update_gen(batch, grad_rng);
            if (!std::isfinite(gr.loss))
                throw std::runtime_error(
                    "training diverged: cross-entropy loss not finite at update " +
                    std::to_string(u));
            last_td = qr.loss;
            last_gen = gr.loss;
            result.record.q_evaluations += qr.evaluations;
            result.record.gen_evaluations += gr.evaluations;
            result.record.total_updates = u;

            if (u % cfg.target_period == 0) agent->sync_target();

            if (u % cfg.eval_every == 0 || u == cfg.max_updates) {
                ev = run_eval(u);
                if (cfg.early_stop && all_solved(ev)) {
                    result.record.early_stopped = true;
                    break;
                }
            }
        }
    }

    result.record.final_mean_reward = result.record.points.back().mean_reward;
    result.final_agent = std::move(agent);
    if (!result.best_agent) result.best_agent = result.final_agent->clone();
    result.record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<long> globality_survival(const Agent& agent, double tau,
                                     std::span<const std::uint64_t> seeds, long cap) {
    std::vector<long> survived;
    survived.reserve(seeds.size());
    for (const std::uint64_t seed : seeds) {
        Rng env_rng = Rng(seed).substream("env");
        env::CartPole cart(0); // truncation lifted
        env::State s = cart.reset(env_rng);
        long steps = 0;
        while (steps < cap) {
            const int a = policy_action(agent, env::normalize(s), tau);
            const auto res = cart.step(a);
            ++steps;
            if (res.terminated) break;
            s = res.state;
        }
        survived.push_back(steps);
    }
    return survived;
}

std::vector<ShotsPoint> shots_study(const Agent& agent, double tau,
                                    std::span<const int> shot_counts, int episodes,
                                    std::uint64_t seed) {
    const Rng eval_base = Rng(seed).substream("eval");
    std::vector<ShotsPoint> out;
    out.reserve(shot_counts.size());
    for (const int shots : shot_counts) {
        ShotsPoint pt;
        pt.shots = shots;
        const EvalResult ev = evaluate(agent, tau, episodes, eval_base, shots);
        pt.rewards = ev.rewards;
        pt.mean_reward = ev.mean();
        out.push_back(std::move(pt));
    }
    return out;
}

void write_run_csv(const RunRecord& rec, const std::string& path,
                   const std::string& spec_hash) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "# spec_hash=" << spec_hash << '\n';
    f << "update,mean_reward,td_loss,gen_loss,seed\n";
    for (const auto& p : rec.points) {
        f << p.update << ',' << data::format_double(p.mean_reward) << ','
          << data::format_double(p.td_loss) << ',' << data::format_double(p.gen_loss) << ','
          << rec.seed << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace bcqq::bcq
