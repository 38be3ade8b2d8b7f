#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcqq/agents.hpp"
#include "bcqq/analysis.hpp"
#include "bcqq/ansatz.hpp"
#include "bcqq/bcq.hpp"
#include "bcqq/config.hpp"
#include "bcqq/data.hpp"
#include "bcqq/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace bcqq;

namespace {

double now_seconds() {
    using clk = std::chrono::steady_clock;
    return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string fd(double v) { return data::format_double(v); }

// ------------------------------------------------------------- train setup

struct TrainCli {
    std::string config_path;
    std::string buffer_path;
    std::string out_dir;
    std::vector<std::uint64_t> seeds;
    std::string agent, encoding, grad, optimizer, early_stop, shots;
    double lr = 0;
    long max_updates = 0;
    int layers = 0;
    int hidden = 0;
    long eval_every = 0;
};

const std::map<std::string, int> kTrainKeys = {
    {"agent", 0},      {"encoding", 0},    {"layers", 0},     {"hidden", 0},
    {"grad", 0},       {"optimizer", 0},   {"lr", 0},         {"spsa_c", 0},
    {"gamma", 0},      {"tau", 0},         {"minibatch", 0},  {"max_updates", 0},
    {"target_period", 0}, {"eval_every", 0}, {"early_stop", 0}, {"eval_episodes", 0},
    {"shots", 0},      {"seed", 0},
};

int parse_shots(const std::string& text) {
    if (text == "exact") return 0;
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size() || v < 0)
        throw std::invalid_argument("shots: expected 'exact' or a non-negative count, got '" +
                                    text + "'");
    return v;
}

// Resolves config file plus command-line overrides into the trainer config
// and the canonical key-value map that the spec hash is computed from.
bcq::TrainConfig resolve_train(const TrainCli& cli, config::KvMap& resolved,
                               std::vector<std::uint64_t>& seeds) {
    config::KvMap kv;
    if (!cli.config_path.empty()) kv = config::parse_file(cli.config_path);
    config::require_known_keys(kv, kTrainKeys);

    auto override_str = [&kv](const std::string& key, const std::string& value) {
        if (!value.empty()) kv[key] = value;
    };
    override_str("agent", cli.agent);
    override_str("encoding", cli.encoding);
    override_str("grad", cli.grad);
    override_str("optimizer", cli.optimizer);
    override_str("early_stop", cli.early_stop);
    override_str("shots", cli.shots);
    if (cli.lr > 0) kv["lr"] = fd(cli.lr);
    if (cli.max_updates > 0) kv["max_updates"] = std::to_string(cli.max_updates);
    if (cli.layers > 0) kv["layers"] = std::to_string(cli.layers);
    if (cli.hidden > 0) kv["hidden"] = std::to_string(cli.hidden);
    if (cli.eval_every > 0) kv["eval_every"] = std::to_string(cli.eval_every);

    bcq::TrainConfig cfg;
    cfg.agent.kind = bcq::agent_kind_from_name(config::get_string(kv, "agent", "quantum"));
    cfg.agent.encoding = ansatz::encoding_from_name(config::get_string(kv, "encoding", "cyclic"));
    cfg.agent.layers = static_cast<int>(config::get_int(kv, "layers", 5));
    cfg.agent.hidden = static_cast<int>(config::get_int(kv, "hidden", 5));
    const std::string default_grad =
        cfg.agent.kind == bcq::AgentKind::Quantum ? "spsa" : "backprop";
    cfg.agent.grad = bcq::grad_method_from_name(config::get_string(kv, "grad", default_grad));
    cfg.agent.optimizer = optim::kind_from_name(config::get_string(kv, "optimizer", "amsgrad"));
    cfg.agent.lr = config::get_double(kv, "lr", 0.01);
    cfg.agent.spsa_c = config::get_double(kv, "spsa_c", 0.1);
    cfg.gamma = config::get_double(kv, "gamma", 0.99);
    cfg.tau = config::get_double(kv, "tau", 0.3);
    cfg.minibatch = static_cast<int>(config::get_int(kv, "minibatch", 32));
    cfg.max_updates = config::get_int(kv, "max_updates", 25000);
    cfg.target_period = config::get_int(kv, "target_period", 100);
    cfg.eval_every = config::get_int(kv, "eval_every", 100);
    cfg.early_stop = config::get_on_off(kv, "early_stop", true);
    cfg.eval_episodes = static_cast<int>(config::get_int(kv, "eval_episodes", 10));
    cfg.shots = parse_shots(config::get_string(kv, "shots", "exact"));
    cfg.agent.validate();
    cfg.seed = static_cast<std::uint64_t>(config::get_int(kv, "seed", 1));

    seeds = cli.seeds;
    if (seeds.empty()) seeds = {cfg.seed};

    // Canonical resolved settings: every effective key, written back in full.
    resolved.clear();
    resolved["command"] = "train";
    resolved["agent"] = bcq::agent_kind_name(cfg.agent.kind);
    if (cfg.agent.kind == bcq::AgentKind::Quantum) {
        resolved["encoding"] = ansatz::encoding_name(cfg.agent.encoding);
        resolved["layers"] = std::to_string(cfg.agent.layers);
        resolved["spsa_c"] = fd(cfg.agent.spsa_c);
    } else {
        resolved["hidden"] = std::to_string(cfg.agent.hidden);
    }
    resolved["grad"] = bcq::grad_method_name(cfg.agent.grad);
    resolved["optimizer"] = optim::kind_name(cfg.agent.optimizer);
    resolved["lr"] = fd(cfg.agent.lr);
    resolved["gamma"] = fd(cfg.gamma);
    resolved["tau"] = fd(cfg.tau);
    resolved["minibatch"] = std::to_string(cfg.minibatch);
    resolved["max_updates"] = std::to_string(cfg.max_updates);
    resolved["target_period"] = std::to_string(cfg.target_period);
    resolved["eval_every"] = std::to_string(cfg.eval_every);
    resolved["early_stop"] = cfg.early_stop ? "on" : "off";
    resolved["eval_episodes"] = std::to_string(cfg.eval_episodes);
    resolved["shots"] = cfg.shots == 0 ? "exact" : std::to_string(cfg.shots);
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) seed_list += ",";
        seed_list += std::to_string(seeds[i]);
    }
    resolved["seeds"] = seed_list;
    return cfg;
}

// Buffer identity enters the experiment hash through content metadata, not
// the file path, so moving a buffer does not change the experiment.
void hash_buffer_identity(const data::Buffer& buf, config::KvMap& resolved) {
    for (const std::string key : {"policy", "seed", "size", "eps", "norm_bounds"}) {
        const auto it = buf.metadata.find(key);
        if (it != buf.metadata.end()) resolved["buffer." + key] = it->second;
    }
}

int cmd_train(const TrainCli& cli) {
    config::KvMap resolved;
    std::vector<std::uint64_t> seeds;
    bcq::TrainConfig base = resolve_train(cli, resolved, seeds);
    const data::Buffer buffer = data::load_buffer(cli.buffer_path);
    hash_buffer_identity(buffer, resolved);
    const std::string hash = config::spec_hash(resolved);

    fs::create_directories(cli.out_dir);
    write_text_file(fs::path(cli.out_dir) / "resolved.cfg", config::canonical_text(resolved));

    json top;
    top["command"] = "train";
    top["spec_hash"] = hash;
    top["config"] = config::canonical_text(resolved);
    json per_seed = json::array();

    for (const std::uint64_t seed : seeds) {
        bcq::TrainConfig cfg = base;
        cfg.seed = seed;
        const fs::path dir = fs::path(cli.out_dir) / ("seed_" + std::to_string(seed));
        fs::create_directories(dir);

        const double t0 = now_seconds();
        bcq::TrainResult res = bcq::train(cfg, buffer);
        res.record.wall_seconds = now_seconds() - t0;

        bcq::write_run_csv(res.record, (dir / "run.csv").string(), hash);
        res.final_agent->save((dir / "checkpoint_final.bcqa").string());
        res.best_agent->save((dir / "checkpoint_best.bcqa").string());
        res.best_agent->export_models((dir / "model_").string());

        json s;
        s["seed"] = seed;
        s["spec_hash"] = hash;
        s["total_updates"] = res.record.total_updates;
        s["early_stopped"] = res.record.early_stopped;
        s["best_mean_reward"] = res.record.best_mean_reward;
        s["best_update"] = res.record.best_update;
        s["final_mean_reward"] = res.record.final_mean_reward;
        s["q_evaluations"] = res.record.q_evaluations;
        s["gen_evaluations"] = res.record.gen_evaluations;
        s["wall_seconds"] = res.record.wall_seconds;
        s["w_update"] = "analytic";
        write_text_file(dir / "summary.json", s.dump(2) + "\n");
        per_seed.push_back(s);
        std::cerr << "seed " << seed << ": best " << res.record.best_mean_reward << " at update "
                  << res.record.best_update << ", final " << res.record.final_mean_reward
                  << ", updates " << res.record.total_updates << "\n";
    }
    top["seeds"] = per_seed;
    write_text_file(fs::path(cli.out_dir) / "summary.json", top.dump(2) + "\n");
    std::cout << top.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- collect

int cmd_collect(const std::string& policy, long n, double eps, std::uint64_t seed,
                const std::string& expert_path, double tau, const std::string& out_path,
                const std::string& csv_path) {
    if (n <= 0) throw std::invalid_argument("collect: transition count must be positive");
    config::KvMap resolved;
    resolved["command"] = "collect";
    resolved["policy"] = policy;
    resolved["size"] = std::to_string(n);
    resolved["seed"] = std::to_string(seed);

    std::map<std::string, std::string> meta;
    meta["policy"] = policy;
    meta["seed"] = std::to_string(seed);

    data::PolicyFn fn;
    std::unique_ptr<bcq::Agent> expert;
    if (policy == "random") {
        fn = [](const std::array<double, 4>&, Rng& r) { return static_cast<int>(r.below(2)); };
    } else if (policy == "noisy-expert") {
        if (expert_path.empty())
            throw std::invalid_argument("collect noisy-expert: --expert checkpoint is required");
        expert = bcq::load_agent(expert_path);
        meta["eps"] = fd(eps);
        resolved["eps"] = fd(eps);
        resolved["tau"] = fd(tau);
        bcq::Agent* raw = expert.get();
        fn = [raw, eps, tau](const std::array<double, 4>& s, Rng& r) {
            if (r.uniform() < eps) return static_cast<int>(r.below(2));
            return bcq::policy_action(*raw, s, tau);
        };
    } else {
        throw std::invalid_argument("collect: unknown policy '" + policy +
                                    "' (expected random|noisy-expert)");
    }

    const std::string hash = config::spec_hash(resolved);
    Rng root(seed);
    Rng env_rng = root.substream("env");
    data::Buffer buf = data::collect_transitions(static_cast<std::size_t>(n), fn, env_rng, meta);
    buf.metadata["spec_hash"] = hash;
    fs::create_directories(fs::path(out_path).parent_path().empty()
                               ? fs::path(".")
                               : fs::path(out_path).parent_path());
    data::save_buffer(buf, out_path);
    if (!csv_path.empty()) data::export_buffer_csv(buf, csv_path);

    json s;
    s["command"] = "collect";
    s["spec_hash"] = hash;
    s["policy"] = policy;
    s["transitions"] = buf.items.size();
    s["out"] = out_path;
    for (const auto& [k, v] : buf.metadata) s["metadata"][k] = v;
    std::cout << s.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------- eval

int cmd_eval(const std::string& checkpoint, int episodes, std::uint64_t seed, double tau,
             const std::string& shots_text, const std::string& out_dir) {
    const std::unique_ptr<bcq::Agent> agent = bcq::load_agent(checkpoint);
    const int shots = parse_shots(shots_text);
    config::KvMap resolved;
    resolved["command"] = "eval";
    resolved["episodes"] = std::to_string(episodes);
    resolved["seed"] = std::to_string(seed);
    resolved["tau"] = fd(tau);
    resolved["shots"] = shots == 0 ? "exact" : std::to_string(shots);
    const std::string hash = config::spec_hash(resolved);

    const Rng eval_base = Rng(seed).substream("eval");
    const bcq::EvalResult res = bcq::evaluate(*agent, tau, episodes, eval_base, shots);

    json s;
    s["command"] = "eval";
    s["spec_hash"] = hash;
    s["rewards"] = res.rewards;
    s["mean_reward"] = res.mean();
    s["shots"] = resolved["shots"];
    std::cout << s.dump(2) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "eval.json", s.dump(2) + "\n");
        std::string csv = "# spec_hash=" + hash + "\nepisode,reward\n";
        for (std::size_t i = 0; i < res.rewards.size(); ++i)
            csv += std::to_string(i) + "," + fd(res.rewards[i]) + "\n";
        write_text_file(fs::path(out_dir) / "eval.csv", csv);
    }
    return 0;
}

// -------------------------------------------------------------- globality

int cmd_globality(const std::string& checkpoint, std::vector<std::uint64_t> seeds, long cap,
                  double tau, const std::string& out_dir) {
    const std::unique_ptr<bcq::Agent> agent = bcq::load_agent(checkpoint);
    if (seeds.empty()) seeds = {1, 2, 3, 4, 5};
    config::KvMap resolved;
    resolved["command"] = "globality";
    resolved["cap"] = std::to_string(cap);
    resolved["tau"] = fd(tau);
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        seed_list += (i ? "," : "") + std::to_string(seeds[i]);
    resolved["seeds"] = seed_list;
    const std::string hash = config::spec_hash(resolved);

    const std::vector<long> steps = bcq::globality_survival(*agent, tau, seeds, cap);
    std::vector<long> sorted = steps;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 ? static_cast<double>(sorted[m / 2])
                                : 0.5 * static_cast<double>(sorted[m / 2 - 1] + sorted[m / 2]);

    json s;
    s["command"] = "globality";
    s["spec_hash"] = hash;
    s["cap"] = cap;
    s["seeds"] = seeds;
    s["steps"] = steps;
    s["median_steps"] = median;
    std::cout << s.dump(2) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "globality.json", s.dump(2) + "\n");
        std::string csv = "# spec_hash=" + hash + "\nseed,steps\n";
        for (std::size_t i = 0; i < seeds.size(); ++i)
            csv += std::to_string(seeds[i]) + "," + std::to_string(steps[i]) + "\n";
        write_text_file(fs::path(out_dir) / "globality.csv", csv);
    }
    return 0;
}

// ------------------------------------------------------------ shots-study

int cmd_shots(const std::string& checkpoint, std::vector<int> shot_counts, int episodes,
              std::uint64_t seed, double tau, const std::string& out_dir) {
    const std::unique_ptr<bcq::Agent> agent = bcq::load_agent(checkpoint);
    if (shot_counts.empty()) shot_counts = {32, 64, 128, 256, 1024};
    config::KvMap resolved;
    resolved["command"] = "shots-study";
    resolved["episodes"] = std::to_string(episodes);
    resolved["seed"] = std::to_string(seed);
    resolved["tau"] = fd(tau);
    std::string shot_list = "exact";
    for (const int c : shot_counts) shot_list += "," + std::to_string(c);
    resolved["shots"] = shot_list;
    const std::string hash = config::spec_hash(resolved);

    // Exact baseline first, then each finite shot count.
    std::vector<int> counts{0};
    counts.insert(counts.end(), shot_counts.begin(), shot_counts.end());
    const std::vector<bcq::ShotsPoint> points =
        bcq::shots_study(*agent, tau, counts, episodes, seed);

    std::string csv = "# spec_hash=" + hash + "\nshots,mean_reward\n";
    json rows = json::array();
    for (const auto& p : points) {
        const std::string label = p.shots == 0 ? "exact" : std::to_string(p.shots);
        csv += label + "," + fd(p.mean_reward) + "\n";
        json r;
        r["shots"] = label;
        r["mean_reward"] = p.mean_reward;
        r["rewards"] = p.rewards;
        rows.push_back(r);
    }
    json s;
    s["command"] = "shots-study";
    s["spec_hash"] = hash;
    s["points"] = rows;
    std::cout << s.dump(2) << "\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file(fs::path(out_dir) / "shots.csv", csv);
        write_text_file(fs::path(out_dir) / "shots.json", s.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------- analyze

struct ModelSpec {
    bool quantum = true;
    ansatz::Encoding encoding = ansatz::Encoding::CyclicDru;
    int layers = 5;
    int hidden = 5;
    std::string token;
};

ModelSpec parse_model_spec(const std::string& token, int layers) {
    ModelSpec m;
    m.token = token;
    m.layers = layers;
    if (token.rfind("classical:", 0) == 0) {
        m.quantum = false;
        m.hidden = std::stoi(token.substr(10));
        if (m.hidden < 1) throw std::invalid_argument("analyze: hidden size must be positive");
        return m;
    }
    m.encoding = ansatz::encoding_from_name(token);
    return m;
}

std::string safe_name(std::string token) {
    for (char& c : token)
        if (c == ':') c = '_';
    return token;
}

int cmd_analyze(std::vector<std::string> models, int states, int theta_samples,
                std::vector<double> n_values, int layers, int bins, int grid,
                std::uint64_t seed, const std::string& out_dir) {
    if (models.empty()) models = {"baseline", "dru", "cyclic"};
    analysis::FimStudyConfig cfg;
    cfg.num_states = states;
    cfg.num_theta = theta_samples;
    if (!n_values.empty()) cfg.n_values = n_values;
    cfg.hist_bins = bins;
    cfg.seed = seed;

    config::KvMap resolved;
    resolved["command"] = "analyze";
    resolved["states"] = std::to_string(states);
    resolved["theta_samples"] = std::to_string(theta_samples);
    resolved["layers"] = std::to_string(layers);
    resolved["bins"] = std::to_string(bins);
    resolved["grid"] = std::to_string(grid);
    resolved["seed"] = std::to_string(seed);
    std::string model_list;
    for (std::size_t i = 0; i < models.size(); ++i) model_list += (i ? "," : "") + models[i];
    resolved["models"] = model_list;
    std::string n_list;
    for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
        n_list += (i ? "," : "") + fd(cfg.n_values[i]);
    resolved["n_values"] = n_list;
    const std::string hash = config::spec_hash(resolved);

    fs::create_directories(out_dir);
    json top;
    top["command"] = "analyze";
    top["spec_hash"] = hash;
    json per_model = json::array();

    for (const std::string& token : models) {
        const ModelSpec m = parse_model_spec(token, layers);
        const fs::path dir = fs::path(out_dir) / safe_name(token);
        fs::create_directories(dir);

        const analysis::FimStudyResult res =
            m.quantum ? analysis::fim_study_quantum(m.encoding, m.layers, cfg)
                      : analysis::fim_study_classical(m.hidden, cfg);

        std::string deff = "# spec_hash=" + hash + "\nn,d_eff\n";
        for (std::size_t i = 0; i < res.n_values.size(); ++i)
            deff += fd(res.n_values[i]) + "," + fd(res.d_eff[i]) + "\n";
        write_text_file(dir / "deff.csv", deff);

        std::string hist = "# spec_hash=" + hash + "\nbin_lo,bin_hi,density\n";
        for (std::size_t i = 0; i < res.spectrum.density.size(); ++i)
            hist += fd(res.spectrum.bin_lo[i]) + "," + fd(res.spectrum.bin_hi[i]) + "," +
                    fd(res.spectrum.density[i]) + "\n";
        write_text_file(dir / "eighist.csv", hist);

        json mj;
        mj["model"] = token;
        mj["trainables"] = res.dim;
        mj["mean_trace"] = res.mean_trace;
        mj["n_values"] = res.n_values;
        mj["d_eff"] = res.d_eff;

        if (m.quantum) {
            // Fourier content of each observable output along each feature,
            // with the other features held at their sweep base of zero.
            Rng theta_rng = Rng(seed).substream("fourier");
            ansatz::QModel model = ansatz::make_qmodel(m.encoding, m.layers, 4, theta_rng);
            std::string four = "# spec_hash=" + hash + "\nfeature,omega,power\n";
            const int cutoff =
                m.encoding == ansatz::Encoding::Baseline ? 1 : m.layers;
            json ratios = json::array();
            for (int feature = 0; feature < 4; ++feature) {
                const analysis::FourierSpectrum spec =
                    analysis::fourier_spectrum(model, feature, grid, {0, 0, 0, 0});
                for (std::size_t w = 0; w < spec.power.size(); ++w)
                    four += std::to_string(feature) + "," + std::to_string(w) + "," +
                            fd(spec.power[w]) + "\n";
                ratios.push_back(analysis::out_of_band_ratio(spec, cutoff));
            }
            write_text_file(dir / "fourier.csv", four);
            mj["fourier_cutoff"] = cutoff;
            mj["out_of_band_ratio"] = ratios;
        }
        per_model.push_back(mj);
        std::cerr << "analyzed " << token << ": d_eff";
        for (const double d : res.d_eff) std::cerr << " " << d;
        std::cerr << "\n";
    }
    top["models"] = per_model;
    write_text_file(fs::path(out_dir) / "summary.json", top.dump(2) + "\n");
    std::cout << top.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch-constrained Q-learning laboratory: quantum and classical agents "
                 "trained offline on fixed CartPole buffers, with evaluation, globality, "
                 "shot-count, and model-capacity studies."};
    app.require_subcommand(1);

    // collect
    std::string c_policy, c_out = "buffer.bcqb", c_csv, c_expert;
    long c_n = 0;
    double c_eps = 0.1, c_tau = 0.3;
    std::uint64_t c_seed = 1;
    CLI::App* collect = app.add_subcommand("collect", "Record transitions into a buffer file");
    collect->add_option("policy", c_policy, "Behavior policy: random|noisy-expert")->required();
    collect->add_option("n", c_n, "Number of transitions")->required();
    collect->add_option("--eps", c_eps, "Random-action probability of the noisy expert");
    collect->add_option("--seed", c_seed, "Root seed");
    collect->add_option("--expert", c_expert, "Agent checkpoint acting as the expert");
    collect->add_option("--tau", c_tau, "Constraint threshold used by the expert policy");
    collect->add_option("--out", c_out, "Buffer file to write");
    collect->add_option("--csv", c_csv, "Also export the buffer as CSV");

    // train
    TrainCli t;
    CLI::App* train = app.add_subcommand("train", "Train an agent offline on a buffer");
    train->add_option("--config", t.config_path, "key=value experiment spec file");
    train->add_option("--buffer", t.buffer_path, "Transition buffer file")->required();
    train->add_option("--out", t.out_dir, "Output directory")->required();
    train->add_option("--agent", t.agent, "quantum|classical");
    train->add_option("--encoding", t.encoding, "baseline|dru|cyclic");
    train->add_option("--grad", t.grad, "spsa|paramshift|backprop");
    train->add_option("--optimizer", t.optimizer, "adam|amsgrad");
    train->add_option("--lr", t.lr, "Learning rate");
    train->add_option("--layers", t.layers, "Circuit layers (quantum)");
    train->add_option("--hidden", t.hidden, "Hidden width (classical)");
    train->add_option("--max-updates", t.max_updates, "Update budget");
    train->add_option("--eval-every", t.eval_every, "Updates between validations");
    train->add_option("--early-stop", t.early_stop, "on|off");
    train->add_option("--shots", t.shots, "Validation readout: exact or a shot count");
    train->add_option("--seed", t.seeds, "Seed list; one output directory per seed");

    // eval
    std::string e_ckpt, e_shots = "exact", e_out;
    int e_episodes = 10;
    std::uint64_t e_seed = 1;
    double e_tau = 0.3;
    CLI::App* evalc = app.add_subcommand("eval", "Run seeded validation episodes");
    evalc->add_option("--checkpoint", e_ckpt, "Agent bundle to evaluate")->required();
    evalc->add_option("--episodes", e_episodes, "Episode count");
    evalc->add_option("--seed", e_seed, "Evaluation seed");
    evalc->add_option("--tau", e_tau, "Constraint threshold");
    evalc->add_option("--shots", e_shots, "exact or a shot count");
    evalc->add_option("--out", e_out, "Directory for eval.json / eval.csv");

    // globality
    std::string g_ckpt, g_out;
    std::vector<std::uint64_t> g_seeds;
    long g_cap = 100000;
    double g_tau = 0.3;
    CLI::App* glob = app.add_subcommand("globality", "Uncapped survival study");
    glob->add_option("--checkpoint", g_ckpt, "Agent bundle")->required();
    glob->add_option("--seed", g_seeds, "Seed list (default 1..5)");
    glob->add_option("--cap", g_cap, "Step cap per seed");
    glob->add_option("--tau", g_tau, "Constraint threshold");
    glob->add_option("--out", g_out, "Directory for globality.csv / globality.json");

    // shots-study
    std::string s_ckpt, s_out;
    std::vector<int> s_shots;
    int s_episodes = 10;
    std::uint64_t s_seed = 1;
    double s_tau = 0.3;
    CLI::App* shots = app.add_subcommand("shots-study", "Mean reward vs readout shots");
    shots->add_option("--checkpoint", s_ckpt, "Agent bundle")->required();
    shots->add_option("--shots", s_shots, "Shot counts (default 32 64 128 256 1024)");
    shots->add_option("--episodes", s_episodes, "Episodes per shot count");
    shots->add_option("--seed", s_seed, "Evaluation seed");
    shots->add_option("--tau", s_tau, "Constraint threshold");
    shots->add_option("--out", s_out, "Directory for shots.csv / shots.json");

    // analyze
    std::vector<std::string> a_models;
    std::vector<double> a_n;
    int a_states = 500, a_theta = 100, a_layers = 5, a_bins = 50, a_grid = 64;
    std::uint64_t a_seed = 1;
    std::string a_out = "analysis";
    CLI::App* an = app.add_subcommand(
        "analyze", "Fisher-information, effective-dimension, and Fourier reports");
    an->add_option("--model", a_models,
                   "Model tokens: baseline|dru|cyclic|classical:<hidden> (repeatable)");
    an->add_option("--states", a_states, "Visitation states per study");
    an->add_option("--theta-samples", a_theta, "Parameter draws per study");
    an->add_option("--n", a_n, "Effective-dimension data sizes");
    an->add_option("--layers", a_layers, "Quantum circuit layers");
    an->add_option("--bins", a_bins, "Eigenvalue histogram bins");
    an->add_option("--grid", a_grid, "Fourier sweep grid points");
    an->add_option("--seed", a_seed, "Study seed");
    an->add_option("--out", a_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (collect->parsed())
            return cmd_collect(c_policy, c_n, c_eps, c_seed, c_expert, c_tau, c_out, c_csv);
        if (train->parsed()) return cmd_train(t);
        if (evalc->parsed()) return cmd_eval(e_ckpt, e_episodes, e_seed, e_tau, e_shots, e_out);
        if (glob->parsed()) return cmd_globality(g_ckpt, g_seeds, g_cap, g_tau, g_out);
        if (shots->parsed()) return cmd_shots(s_ckpt, s_shots, s_episodes, s_seed, s_tau, s_out);
        if (an->parsed())
            return cmd_analyze(a_models, a_states, a_theta, a_n, a_layers, a_bins, a_grid,
                               a_seed, a_out);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cout << err.dump() << "\n";
        return 1;
    }
    return 2;
}
