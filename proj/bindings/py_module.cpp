#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>
#include <vector>

#include "bcqq/agents.hpp"
#include "bcqq/analysis.hpp"
#include "bcqq/ansatz.hpp"
#include "bcqq/bcq.hpp"
#include "bcqq/data.hpp"
#include "bcqq/env.hpp"
#include "bcqq/qsim.hpp"
#include "bcqq/rng.hpp"

namespace py = pybind11;
using namespace bcqq;

namespace {

ansatz::QModel make_model(const std::string& encoding, int layers, std::uint64_t seed) {
    Rng rng = Rng(seed).substream("init");
    return ansatz::make_qmodel(ansatz::encoding_from_name(encoding), layers, 4, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Offline batch-constrained Q-learning on CartPole with quantum and classical "
              "function approximators";

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("substream", &Rng::substream, py::arg("name"))
        .def("fork", &Rng::fork, py::arg("index"))
        .def("uniform", py::overload_cast<>(&Rng::uniform))
        .def("below", &Rng::below, py::arg("n"));

    py::class_<ansatz::QModel>(m, "QModel")
        .def_property_readonly("trainable_count", &ansatz::QModel::trainable_count)
        .def_property_readonly("num_actions", &ansatz::QModel::num_actions)
        .def_readonly("theta", &ansatz::QModel::theta)
        .def_readonly("weights", &ansatz::QModel::weights);

    m.def("make_qmodel", &make_model, py::arg("encoding") = "cyclic", py::arg("layers") = 5,
          py::arg("seed") = 1);
    m.def(
        "expectations",
        [](const ansatz::QModel& model, const std::array<double, 4>& s) {
            return ansatz::expectations(model, s);
        },
        py::arg("model"), py::arg("obs"));
    m.def(
        "q_values",
        [](const ansatz::QModel& model, const std::array<double, 4>& s) {
            return ansatz::q_values(model, s);
        },
        py::arg("model"), py::arg("obs"));
    m.def(
        "gen_probs",
        [](const ansatz::QModel& model, const std::array<double, 4>& s) {
            return ansatz::gen_probs(model, s);
        },
        py::arg("model"), py::arg("obs"));

    py::class_<env::State>(m, "CartPoleState")
        .def_readonly("x", &env::State::x)
        .def_readonly("x_dot", &env::State::x_dot)
        .def_readonly("theta", &env::State::theta)
        .def_readonly("theta_dot", &env::State::theta_dot)
        .def("as_array", &env::State::as_array);

    py::class_<env::StepResult>(m, "StepResult")
        .def_readonly("state", &env::StepResult::state)
        .def_readonly("reward", &env::StepResult::reward)
        .def_readonly("terminated", &env::StepResult::terminated)
        .def_readonly("truncated", &env::StepResult::truncated);

    py::class_<env::CartPole>(m, "CartPole")
        .def(py::init<int>(), py::arg("max_steps") = env::CartPole::kMaxSteps)
        .def("reset", py::overload_cast<Rng&>(&env::CartPole::reset), py::arg("rng"))
        .def("reset_to", py::overload_cast<const env::State&>(&env::CartPole::reset),
             py::arg("state"))
        .def("step", &env::CartPole::step, py::arg("action"));
    m.def("normalize", py::overload_cast<const env::State&>(&env::normalize), py::arg("state"));

    py::class_<data::Transition>(m, "Transition")
        .def_readonly("s", &data::Transition::s)
        .def_readonly("action", &data::Transition::action)
        .def_readonly("reward", &data::Transition::reward)
        .def_readonly("sp", &data::Transition::sp)
        .def_readonly("done", &data::Transition::done);

    py::class_<data::Buffer>(m, "Buffer")
        .def_readonly("metadata", &data::Buffer::metadata)
        .def_readonly("items", &data::Buffer::items)
        .def("__len__", [](const data::Buffer& b) { return b.items.size(); });
    m.def("load_buffer", &data::load_buffer, py::arg("path"));
    m.def("save_buffer", &data::save_buffer, py::arg("buffer"), py::arg("path"));
    m.def(
        "collect_random",
        [](std::size_t count, std::uint64_t seed) {
            Rng env_rng = Rng(seed).substream("env");
            return data::collect_transitions(
                count,
                [](const std::array<double, 4>&, Rng& r) { return static_cast<int>(r.below(2)); },
                env_rng, {{"policy", "random"}, {"seed", std::to_string(seed)}});
        },
        py::arg("count"), py::arg("seed") = 1);

    py::class_<bcq::Agent, std::unique_ptr<bcq::Agent>>(m, "Agent")
        .def_property_readonly("trainable_count", &bcq::Agent::trainable_count)
        .def("q_values", &bcq::Agent::q_values, py::arg("obs"))
        .def("gen_probs", &bcq::Agent::gen_probs, py::arg("obs"))
        .def("save", &bcq::Agent::save, py::arg("path"));
    m.def("load_agent", &bcq::load_agent, py::arg("path"));
    m.def(
        "make_agent",
        [](const std::string& kind, const std::string& encoding, int layers, int hidden,
           const std::string& grad, const std::string& optimizer, double lr,
           std::uint64_t seed) {
            bcq::AgentConfig cfg;
            cfg.kind = bcq::agent_kind_from_name(kind);
            cfg.encoding = ansatz::encoding_from_name(encoding);
            cfg.layers = layers;
            cfg.hidden = hidden;
            cfg.grad = bcq::grad_method_from_name(grad);
            cfg.optimizer = optim::kind_from_name(optimizer);
            cfg.lr = lr;
            Rng init = Rng(seed).substream("init");
            return bcq::make_agent(cfg, init);
        },
        py::arg("kind") = "quantum", py::arg("encoding") = "cyclic", py::arg("layers") = 5,
        py::arg("hidden") = 5, py::arg("grad") = "spsa", py::arg("optimizer") = "amsgrad",
        py::arg("lr") = 0.01, py::arg("seed") = 1);

    py::class_<bcq::EvalPoint>(m, "EvalPoint")
        .def_readonly("update", &bcq::EvalPoint::update)
        .def_readonly("mean_reward", &bcq::EvalPoint::mean_reward)
        .def_readonly("td_loss", &bcq::EvalPoint::td_loss)
        .def_readonly("gen_loss", &bcq::EvalPoint::gen_loss);

    py::class_<bcq::RunRecord>(m, "RunRecord")
        .def_readonly("seed", &bcq::RunRecord::seed)
        .def_readonly("points", &bcq::RunRecord::points)
        .def_readonly("total_updates", &bcq::RunRecord::total_updates)
        .def_readonly("early_stopped", &bcq::RunRecord::early_stopped)
        .def_readonly("best_mean_reward", &bcq::RunRecord::best_mean_reward)
        .def_readonly("final_mean_reward", &bcq::RunRecord::final_mean_reward);

    m.def(
        "train",
        [](const data::Buffer& buffer, const std::string& kind, const std::string& encoding,
           const std::string& grad, const std::string& optimizer, double lr, int hidden,
           long max_updates, long eval_every, bool early_stop, std::uint64_t seed) {
            bcq::TrainConfig cfg;
            cfg.agent.kind = bcq::agent_kind_from_name(kind);
            cfg.agent.encoding = ansatz::encoding_from_name(encoding);
            cfg.agent.hidden = hidden;
            cfg.agent.grad = bcq::grad_method_from_name(grad);
            cfg.agent.optimizer = optim::kind_from_name(optimizer);
            cfg.agent.lr = lr;
            cfg.max_updates = max_updates;
            cfg.eval_every = eval_every;
            cfg.early_stop = early_stop;
            cfg.seed = seed;
            bcq::TrainResult res = bcq::train(cfg, buffer);
            return py::make_tuple(res.record, std::move(res.best_agent));
        },
        py::arg("buffer"), py::arg("kind") = "quantum", py::arg("encoding") = "cyclic",
        py::arg("grad") = "spsa", py::arg("optimizer") = "amsgrad", py::arg("lr") = 0.01,
        py::arg("hidden") = 5, py::arg("max_updates") = 25000, py::arg("eval_every") = 100,
        py::arg("early_stop") = true, py::arg("seed") = 1,
        "Offline batch-constrained training; returns (record, best_agent)");

    m.def(
        "evaluate",
        [](const bcq::Agent& agent, double tau, int episodes, std::uint64_t seed, int shots) {
            const Rng base = Rng(seed).substream("eval");
            return bcq::evaluate(agent, tau, episodes, base, shots).rewards;
        },
        py::arg("agent"), py::arg("tau") = 0.3, py::arg("episodes") = 10, py::arg("seed") = 1,
        py::arg("shots") = 0);

    m.def(
        "effective_dimension_study",
        [](const std::string& model, int layers, int hidden, int states, int theta_samples,
           std::vector<double> n_values, std::uint64_t seed) {
            analysis::FimStudyConfig cfg;
            cfg.num_states = states;
            cfg.num_theta = theta_samples;
            if (!n_values.empty()) cfg.n_values = std::move(n_values);
            cfg.seed = seed;
            const analysis::FimStudyResult res =
                model == "classical"
                    ? analysis::fim_study_classical(hidden, cfg)
                    : analysis::fim_study_quantum(ansatz::encoding_from_name(model), layers, cfg);
            return py::make_tuple(res.n_values, res.d_eff);
        },
        py::arg("model") = "cyclic", py::arg("layers") = 5, py::arg("hidden") = 5,
        py::arg("states") = 10, py::arg("theta_samples") = 5,
        py::arg("n_values") = std::vector<double>{}, py::arg("seed") = 1);

    m.def(
        "fourier_power",
        [](const ansatz::QModel& model, int feature, int grid) {
            return analysis::fourier_spectrum(model, feature, grid, {0, 0, 0, 0}).power;
        },
        py::arg("model"), py::arg("feature") = 0, py::arg("grid") = 64);
}
