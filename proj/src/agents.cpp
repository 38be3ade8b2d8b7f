#include "bcqq/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

#include "bcqq/bytesio.hpp"
#include "bcqq/grad.hpp"
#include "bcqq/qsim.hpp"

namespace bcqq::bcq {

std::string agent_kind_name(AgentKind k) {
    return k == AgentKind::Quantum ? "quantum" : "classical";
}

AgentKind agent_kind_from_name(const std::string& name) {
    if (name == "quantum") return AgentKind::Quantum;
    if (name == "classical") return AgentKind::Classical;
    throw std::invalid_argument("unknown agent kind: " + name);
}

std::string grad_method_name(GradMethod g) {
    switch (g) {
    case GradMethod::Spsa: return "spsa";
    case GradMethod::ParamShift: return "paramshift";
    case GradMethod::Backprop: return "backprop";
    }
    return "?";
}

GradMethod grad_method_from_name(const std::string& name) {
    if (name == "spsa") return GradMethod::Spsa;
    if (name == "paramshift") return GradMethod::ParamShift;
    if (name == "backprop") return GradMethod::Backprop;
    throw std::invalid_argument("unknown gradient method: " + name);
}

void AgentConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
    if (kind == AgentKind::Quantum) {
        if (grad == GradMethod::Backprop)
            throw std::invalid_argument("quantum agents use grad=spsa or grad=paramshift");
        if (layers < 1) throw std::invalid_argument("layers must be >= 1");
        if (grad == GradMethod::Spsa && !(spsa_c > 0.0))
            throw std::invalid_argument("spsa perturbation size must be positive");
    } else {
        if (grad != GradMethod::Backprop)
            throw std::invalid_argument("classical agents use grad=backprop");
        if (hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
    }
}

std::array<double, 2> Agent::q_values_sampled(const std::array<double, 4>& s, int,
                                              Rng&) const {
    return q_values(s);
}

std::array<double, 2> Agent::gen_probs_sampled(const std::array<double, 4>& s, int,
                                               Rng&) const {
    return gen_probs(s);
}

namespace {

using Outputs = std::vector<std::array<double, 2>>;

double td_value(const Outputs& out, const std::vector<int>& actions,
                std::span<const double> targets) {
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i][static_cast<std::size_t>(actions[i])] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(out.size());
}

Outputs td_grads(const Outputs& out, const std::vector<int>& actions,
                 std::span<const double> targets) {
    Outputs g(out.size(), {0.0, 0.0});
    const double inv = 1.0 / static_cast<double>(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto a = static_cast<std::size_t>(actions[i]);
        g[i][a] = 2.0 * (out[i][a] - targets[i]) * inv;
    }
    return g;
}

double ce_value(const Outputs& logits, const std::vector<int>& actions) {
    double acc = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double m = std::max(logits[i][0], logits[i][1]);
        const double lse = m + std::log(std::exp(logits[i][0] - m) + std::exp(logits[i][1] - m));
        acc -= logits[i][static_cast<std::size_t>(actions[i])] - lse;
    }
    return acc / static_cast<double>(logits.size());
}

Outputs ce_grads(const Outputs& logits, const std::vector<int>& actions) {
    Outputs g(logits.size());
    const double inv = 1.0 / static_cast<double>(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double m = std::max(logits[i][0], logits[i][1]);
        const double e0 = std::exp(logits[i][0] - m);
        const double e1 = std::exp(logits[i][1] - m);
        const double z = e0 + e1;
        g[i][0] = (e0 / z - (actions[i] == 0 ? 1.0 : 0.0)) * inv;
        g[i][1] = (e1 / z - (actions[i] == 1 ? 1.0 : 0.0)) * inv;
    }
    return g;
}

std::vector<std::array<double, 4>> batch_states(std::span<const data::Transition> batch) {
    std::vector<std::array<double, 4>> s(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) s[i] = batch[i].s;
    return s;
}

std::vector<int> batch_actions(std::span<const data::Transition> batch) {
    std::vector<int> a(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) a[i] = static_cast<int>(batch[i].action);
    return a;
}

std::array<double, 2> to2(const std::vector<double>& v) { return {v[0], v[1]}; }

// ---------------------------------------------------------------- quantum

class QuantumAgent final : public Agent {
  public:
    QuantumAgent(const AgentConfig& cfg, Rng& init)
        : cfg_(cfg),
          q_(ansatz::make_qmodel(cfg.encoding, cfg.layers, 4, init)),
          gen_(ansatz::make_qmodel(cfg.encoding, cfg.layers, 4, init)),
          target_(q_),
          opt_q_(cfg.optimizer, cfg.lr, static_cast<std::size_t>(q_.trainable_count())),
          opt_gen_(cfg.optimizer, cfg.lr, static_cast<std::size_t>(gen_.trainable_count())) {}

    const AgentConfig& config() const override { return cfg_; }
    int num_actions() const override { return q_.num_actions(); }
    std::size_t trainable_count() const override {
        return static_cast<std::size_t>(q_.trainable_count());
    }

    std::array<double, 2> q_values(const std::array<double, 4>& s) const override {
        return to2(ansatz::q_values(q_, s));
    }
    std::array<double, 2> q_values_target(const std::array<double, 4>& s) const override {
        return to2(ansatz::q_values(target_, s));
    }
    std::array<double, 2> gen_probs(const std::array<double, 4>& s) const override {
        return to2(ansatz::gen_probs(gen_, s));
    }

    std::array<double, 2> q_values_sampled(const std::array<double, 4>& s, int shots,
                                           Rng& rng) const override {
        const auto e = sampled_expectations(q_, s, shots, rng);
        return {q_.weights[0] * e[0], q_.weights[1] * e[1]};
    }

    std::array<double, 2> gen_probs_sampled(const std::array<double, 4>& s, int shots,
                                            Rng& rng) const override {
        const auto e = sampled_expectations(gen_, s, shots, rng);
        const std::vector<double> logits{gen_.weights[0] * e[0], gen_.weights[1] * e[1]};
        return to2(ansatz::softmax(logits));
    }

    UpdateResult update_q(std::span<const data::Transition> batch,
                          std::span<const double> targets, Rng& grad_rng) override {
        const auto actions = batch_actions(batch);
        const std::vector<double> y(targets.begin(), targets.end());
        grad::MinibatchLoss loss;
        loss.value = [actions, y](const Outputs& out) { return td_value(out, actions, y); };
        loss.grads = [actions, y](const Outputs& out) { return td_grads(out, actions, y); };
        return update_model(q_, opt_q_, batch, loss, grad_rng);
    }

    UpdateResult update_gen(std::span<const data::Transition> batch, Rng& grad_rng) override {
        const auto actions = batch_actions(batch);
        grad::MinibatchLoss loss;
        loss.value = [actions](const Outputs& out) { return ce_value(out, actions); };
        loss.grads = [actions](const Outputs& out) { return ce_grads(out, actions); };
        return update_model(gen_, opt_gen_, batch, loss, grad_rng);
    }

    void sync_target() override { target_ = q_; }

    void save(const std::string& path) const override;
    void export_models(const std::string& prefix) const override;
    std::unique_ptr<Agent> clone() const override {
        return std::make_unique<QuantumAgent>(*this);
    }

    ansatz::QModel& q_model() { return q_; }
    ansatz::QModel& gen_model() { return gen_; }
    ansatz::QModel& target_model() { return target_; }
    optim::Optimizer& opt_q() { return opt_q_; }
    optim::Optimizer& opt_gen() { return opt_gen_; }

  private:
    static std::array<double, 2> sampled_expectations(const ansatz::QModel& m,
                                                      const std::array<double, 4>& s,
                                                      int shots, Rng& rng) {
        const qsim::QubitState state = qsim::run_circuit(m.tmpl.circuit, s, m.theta);
        const auto counts = qsim::sample_counts(state, shots, rng);
        return {qsim::expectation_from_counts(counts, m.observables[0], shots),
                qsim::expectation_from_counts(counts, m.observables[1], shots)};
    }

    static Outputs outputs_at(const ansatz::QModel& m,
                              const std::vector<std::array<double, 4>>& states,
                              std::span<const double> theta) {
        Outputs out(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            const qsim::QubitState st = qsim::run_circuit(m.tmpl.circuit, states[i], theta);
            out[i] = {m.weights[0] * qsim::expectation(st, m.observables[0]),
                      m.weights[1] * qsim::expectation(st, m.observables[1])};
        }
        return out;
    }

    UpdateResult update_model(ansatz::QModel& model, optim::Optimizer& opt,
                              std::span<const data::Transition> batch,
                              const grad::MinibatchLoss& loss, Rng& grad_rng) {
        const auto states = batch_states(batch);
        UpdateResult res;
        std::vector<double> flat_grad;
        if (cfg_.grad == GradMethod::ParamShift) {
            const auto est = grad::loss_grad_exact(model, states, loss, &res.loss);
            flat_grad = est.d_theta;
            flat_grad.insert(flat_grad.end(), est.d_weights.begin(), est.d_weights.end());
            res.evaluations = est.evaluations_used;
        } else {
            // Unperturbed pass: reported loss plus the analytic output-weight
            // gradient, which rides along outside the SPSA perturbation.
            Outputs expv(states.size());
            Outputs out(states.size());
            for (std::size_t i = 0; i < states.size(); ++i) {
                const auto e = ansatz::expectations(model, states[i]);
                expv[i] = {e[0], e[1]};
                out[i] = {model.weights[0] * e[0], model.weights[1] * e[1]};
            }
            res.loss = loss.value(out);
            const auto go = loss.grads(out);
            std::array<double, 2> dw{0.0, 0.0};
            for (std::size_t i = 0; i < states.size(); ++i)
                for (std::size_t a = 0; a < 2; ++a) dw[a] += go[i][a] * expv[i][a];

            const grad::LossFn theta_loss = [&](std::span<const double> th) {
                return loss.value(outputs_at(model, states, th));
            };
            const auto sp = grad::spsa_grad(theta_loss, model.theta, cfg_.spsa_c, grad_rng);
            flat_grad = sp.grad;
            flat_grad.push_back(dw[0]);
            flat_grad.push_back(dw[1]);
            res.evaluations = sp.evaluations_used;
        }
        auto params = ansatz::get_params(model);
        opt.step(params, flat_grad);
        ansatz::set_params(model, params);
        return res;
    }

    AgentConfig cfg_;
    ansatz::QModel q_;
    ansatz::QModel gen_;
    ansatz::QModel target_;
    optim::Optimizer opt_q_;
    optim::Optimizer opt_gen_;
};

// -------------------------------------------------------------- classical

class ClassicalAgent final : public Agent {
  public:
    ClassicalAgent(const AgentConfig& cfg, Rng& init)
        : cfg_(cfg),
          q_(mlp::Mlp::glorot(4, cfg.hidden, 2, init)),
          gen_(mlp::Mlp::glorot(4, cfg.hidden, 2, init)),
          target_(q_),
          opt_q_(cfg.optimizer, cfg.lr, q_.param_count()),
          opt_gen_(cfg.optimizer, cfg.lr, gen_.param_count()) {}

    const AgentConfig& config() const override { return cfg_; }
    int num_actions() const override { return 2; }
    std::size_t trainable_count() const override { return q_.param_count(); }

    std::array<double, 2> q_values(const std::array<double, 4>& s) const override {
        return q_.forward2(s);
    }
    std::array<double, 2> q_values_target(const std::array<double, 4>& s) const override {
        return target_.forward2(s);
    }
    std::array<double, 2> gen_probs(const std::array<double, 4>& s) const override {
        const auto logits = gen_.forward2(s);
        return to2(ansatz::softmax(std::vector<double>{logits[0], logits[1]}));
    }

    UpdateResult update_q(std::span<const data::Transition> batch,
                          std::span<const double> targets, Rng&) override {
        const auto actions = batch_actions(batch);
        return update_net(q_, opt_q_, batch,
                          [&](const Outputs& out) { return td_value(out, actions, targets); },
                          [&](const Outputs& out) { return td_grads(out, actions, targets); });
    }

    UpdateResult update_gen(std::span<const data::Transition> batch, Rng&) override {
        const auto actions = batch_actions(batch);
        return update_net(gen_, opt_gen_, batch,
                          [&](const Outputs& out) { return ce_value(out, actions); },
                          [&](const Outputs& out) { return ce_grads(out, actions); });
    }

    void sync_target() override { target_ = q_; }

    void save(const std::string& path) const override;
    void export_models(const std::string& prefix) const override;
    std::unique_ptr<Agent> clone() const override {
        return std::make_unique<ClassicalAgent>(*this);
    }

    mlp::Mlp& q_net() { return q_; }
    mlp::Mlp& gen_net() { return gen_; }
    mlp::Mlp& target_net() { return target_; }
    optim::Optimizer& opt_q() { return opt_q_; }
    optim::Optimizer& opt_gen() { return opt_gen_; }

  private:
    template <typename ValueFn, typename GradsFn>
    UpdateResult update_net(mlp::Mlp& net, optim::Optimizer& opt,
                            std::span<const data::Transition> batch, ValueFn value,
                            GradsFn grads) {
        const auto states = batch_states(batch);
        Outputs out(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) out[i] = net.forward2(states[i]);
        UpdateResult res;
        res.loss = value(out);
        res.evaluations = static_cast<long>(states.size());
        const auto go = grads(out);
        std::vector<double> g(net.param_count(), 0.0);
        for (std::size_t i = 0; i < states.size(); ++i)
            net.accumulate_grad(states[i], go[i], g);
        opt.step(net.params(), g);
        return res;
    }

    AgentConfig cfg_;
    mlp::Mlp q_;
    mlp::Mlp gen_;
    mlp::Mlp target_;
    optim::Optimizer opt_q_;
    optim::Optimizer opt_gen_;
};

// ------------------------------------------------------------ checkpoints

constexpr char kAgentMagic[4] = {'B', 'C', 'Q', 'A'};
constexpr std::uint32_t kAgentVersion = 1;

std::string config_text(const AgentConfig& cfg) {
    std::string out;
    out += "kind=" + agent_kind_name(cfg.kind) + "\n";
    out += "encoding=" + ansatz::encoding_name(cfg.encoding) + "\n";
    out += "layers=" + std::to_string(cfg.layers) + "\n";
    out += "hidden=" + std::to_string(cfg.hidden) + "\n";
    out += "grad=" + grad_method_name(cfg.grad) + "\n";
    out += "optimizer=" + optim::kind_name(cfg.optimizer) + "\n";
    out += "lr=" + data::format_double(cfg.lr) + "\n";
    out += "spsa_c=" + data::format_double(cfg.spsa_c) + "\n";
    out += "w_update=analytic\n";
    return out;
}

AgentConfig config_from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) break;
        const std::string line = text.substr(start, nl - start);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("agent parse error: malformed config line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
        start = nl + 1;
    }
    AgentConfig cfg;
    cfg.kind = agent_kind_from_name(kv.at("kind"));
    cfg.encoding = ansatz::encoding_from_name(kv.at("encoding"));
    cfg.layers = std::stoi(kv.at("layers"));
    cfg.hidden = std::stoi(kv.at("hidden"));
    cfg.grad = grad_method_from_name(kv.at("grad"));
    cfg.optimizer = optim::kind_from_name(kv.at("optimizer"));
    cfg.lr = std::stod(kv.at("lr"));
    cfg.spsa_c = std::stod(kv.at("spsa_c"));
    return cfg;
}

void put_section(std::string& out, const std::string& name, std::span<const double> v) {
    bytesio::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    bytesio::put_u64(out, static_cast<std::uint64_t>(v.size()));
    for (double x : v) bytesio::put_f64(out, x);
}

std::map<std::string, std::vector<double>> read_sections(bytesio::Reader& r) {
    const std::uint32_t n = r.read_u32("section count");
    std::map<std::string, std::vector<double>> sections;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t name_len = r.read_u32("section name length");
        const std::string name = r.read_bytes(name_len, "section name");
        const std::uint64_t count = r.read_u64("section length");
        if (count > (r.buf.size() - r.pos) / 8)
            throw std::runtime_error("agent parse error: section '" + name +
                                     "' exceeds file size");
        std::vector<double> v(count);
        for (auto& x : v) x = r.read_f64("section data");
        sections[name] = std::move(v);
    }
    return sections;
}

std::string agent_header(const AgentConfig& cfg) {
    std::string out;
    out.append(kAgentMagic, 4);
    bytesio::put_u32(out, kAgentVersion);
    const std::string meta = config_text(cfg);
    bytesio::put_u32(out, static_cast<std::uint32_t>(meta.size()));
    out += meta;
    return out;
}

const std::vector<double>& section(const std::map<std::string, std::vector<double>>& s,
                                   const std::string& name) {
    const auto it = s.find(name);
    if (it == s.end())
        throw std::runtime_error("agent parse error: missing section '" + name + "'");
    return it->second;
}

void copy_exact(std::vector<double>& dst, const std::vector<double>& src,
                const std::string& name) {
    if (src.size() != dst.size())
        throw std::runtime_error("agent parse error: section '" + name + "' has " +
                                 std::to_string(src.size()) + " values, expected " +
                                 std::to_string(dst.size()));
    dst = src;
}

} // namespace

void QuantumAgent::save(const std::string& path) const {
    std::string out = agent_header(cfg_);
    bytesio::put_u32(out, 8);
    put_section(out, "q_theta", q_.theta);
    put_section(out, "q_w", q_.weights);
    put_section(out, "gen_theta", gen_.theta);
    put_section(out, "gen_w", gen_.weights);
    put_section(out, "tgt_theta", target_.theta);
    put_section(out, "tgt_w", target_.weights);
    put_section(out, "opt_q", opt_q_.state());
    put_section(out, "opt_gen", opt_gen_.state());
    bytesio::write_file(path, out);
}

void QuantumAgent::export_models(const std::string& prefix) const {
    ansatz::save_qmodel(q_, prefix + "q.bcqm");
    bytesio::write_file(prefix + "q.bcqm.txt", ansatz::qmodel_text(q_));
    ansatz::save_qmodel(gen_, prefix + "gen.bcqm");
    bytesio::write_file(prefix + "gen.bcqm.txt", ansatz::qmodel_text(gen_));
}

void ClassicalAgent::save(const std::string& path) const {
    std::string out = agent_header(cfg_);
    bytesio::put_u32(out, 5);
    put_section(out, "q_params", q_.params());
    put_section(out, "gen_params", gen_.params());
    put_section(out, "tgt_params", target_.params());
    put_section(out, "opt_q", opt_q_.state());
    put_section(out, "opt_gen", opt_gen_.state());
    bytesio::write_file(path, out);
}

void ClassicalAgent::export_models(const std::string& prefix) const {
    mlp::save_mlp(q_, prefix + "q.bcqn");
    mlp::save_mlp(gen_, prefix + "gen.bcqn");
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, Rng& init_rng) {
    cfg.validate();
    if (cfg.kind == AgentKind::Quantum) return std::make_unique<QuantumAgent>(cfg, init_rng);
    return std::make_unique<ClassicalAgent>(cfg, init_rng);
}

std::unique_ptr<Agent> load_agent(const std::string& path) {
    const std::string raw = bytesio::read_file(path);
    bytesio::Reader r{raw};
    if (r.read_bytes(4, "magic") != std::string(kAgentMagic, 4))
        throw std::runtime_error("agent parse error at offset 0: bad magic");
    const std::uint32_t version = r.read_u32("version");
    if (version != kAgentVersion)
        throw std::runtime_error("agent parse error at offset 4: unsupported version " +
                                 std::to_string(version));
    const std::uint32_t meta_len = r.read_u32("config length");
    const AgentConfig cfg = config_from_text(r.read_bytes(meta_len, "config"));
    cfg.validate();
    const auto sections = read_sections(r);
    if (r.pos != raw.size())
        throw std::runtime_error("agent parse error at offset " + std::to_string(r.pos) +
                                 ": trailing bytes");

    Rng scratch(0);
    if (cfg.kind == AgentKind::Quantum) {
        auto agent = std::make_unique<QuantumAgent>(cfg, scratch);
        copy_exact(agent->q_model().theta, section(sections, "q_theta"), "q_theta");
        copy_exact(agent->q_model().weights, section(sections, "q_w"), "q_w");
        copy_exact(agent->gen_model().theta, section(sections, "gen_theta"), "gen_theta");
        copy_exact(agent->gen_model().weights, section(sections, "gen_w"), "gen_w");
        copy_exact(agent->target_model().theta, section(sections, "tgt_theta"), "tgt_theta");
        copy_exact(agent->target_model().weights, section(sections, "tgt_w"), "tgt_w");
        agent->opt_q().restore_state(section(sections, "opt_q"));
        agent->opt_gen().restore_state(section(sections, "opt_gen"));
        return agent;
    }
    auto agent = std::make_unique<ClassicalAgent>(cfg, scratch);
    const auto load_net = [&](mlp::Mlp& net, const std::string& name) {
        const auto& v = section(sections, name);
        if (v.size() != net.param_count())
            throw std::runtime_error("agent parse error: section '" + name + "' has " +
                                     std::to_string(v.size()) + " values, expected " +
                                     std::to_string(net.param_count()));
        std::copy(v.begin(), v.end(), net.params().begin());
    };
    load_net(agent->q_net(), "q_params");
    load_net(agent->gen_net(), "gen_params");
    load_net(agent->target_net(), "tgt_params");
    agent->opt_q().restore_state(section(sections, "opt_q"));
    agent->opt_gen().restore_state(section(sections, "opt_gen"));
    return agent;
}

} // namespace bcqq::bcq
