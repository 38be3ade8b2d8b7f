#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bcqq/ansatz.hpp"
#include "bcqq/data.hpp"
#include "bcqq/mlp.hpp"
#include "bcqq/optim.hpp"
#include "bcqq/rng.hpp"

namespace bcqq::bcq {

enum class AgentKind { Quantum, Classical };
enum class GradMethod { Spsa, ParamShift, Backprop };

std::string agent_kind_name(AgentKind k);
AgentKind agent_kind_from_name(const std::string& name);
std::string grad_method_name(GradMethod g);
GradMethod grad_method_from_name(const std::string& name);

struct AgentConfig {
    AgentKind kind = AgentKind::Quantum;
    ansatz::Encoding encoding = ansatz::Encoding::CyclicDru; // quantum only
    int layers = 5;                                          // quantum only
    int hidden = 5;                                          // classical only
    GradMethod grad = GradMethod::Spsa;
    optim::Kind optimizer = optim::Kind::Amsgrad;
    double lr = 0.01;
    double spsa_c = 0.1;

    void validate() const;
};

struct UpdateResult {
    double loss = 0.0;
    long evaluations = 0; // loss evaluations (SPSA) or expectation estimations (shift rule)
};

// A Q network, its hard-copied target twin, and a generative behavior
// classifier, together with their optimizers. States are normalized
// observations. The output weights of quantum models are always updated
// with their analytic gradient, under SPSA too.
class Agent {
  public:
    virtual ~Agent() = default;

    virtual const AgentConfig& config() const = 0;
    virtual int num_actions() const = 0;
    // Trainables of one network (Q and generative counts are equal).
    virtual std::size_t trainable_count() const = 0;

    virtual std::array<double, 2> q_values(const std::array<double, 4>& s) const = 0;
    virtual std::array<double, 2> q_values_target(const std::array<double, 4>& s) const = 0;
    virtual std::array<double, 2> gen_probs(const std::array<double, 4>& s) const = 0;

    // Finite-shot readout (quantum); classical agents return the exact values.
    virtual std::array<double, 2> q_values_sampled(const std::array<double, 4>& s, int shots,
                                                   Rng& rng) const;
    virtual std::array<double, 2> gen_probs_sampled(const std::array<double, 4>& s, int shots,
                                                    Rng& rng) const;

    // One optimizer step on the squared TD error against fixed `targets`.
    virtual UpdateResult update_q(std::span<const data::Transition> batch,
                                  std::span<const double> targets, Rng& grad_rng) = 0;
    // One optimizer step on the behavior cross-entropy.
    virtual UpdateResult update_gen(std::span<const data::Transition> batch,
                                    Rng& grad_rng) = 0;

    virtual void sync_target() = 0;

    virtual void save(const std::string& path) const = 0;
    // Standalone model files next to the bundle: quantum agents write
    // `<prefix>q.bcqm` (+ `.txt`) and `<prefix>gen.bcqm` (+ `.txt`),
    // classical agents write `<prefix>q.bcqn` and `<prefix>gen.bcqn`.
    virtual void export_models(const std::string& prefix) const = 0;
    virtual std::unique_ptr<Agent> clone() const = 0;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, Rng& init_rng);

// Reads an agent bundle written by Agent::save: models, target parameters,
// and optimizer state, so training can resume exactly.
std::unique_ptr<Agent> load_agent(const std::string& path);

} // namespace bcqq::bcq
