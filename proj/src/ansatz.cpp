#include "bcqq/ansatz.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "bcqq/bytesio.hpp"

namespace bcqq::ansatz {

using qsim::AngleSource;
using qsim::Gate;

std::string encoding_name(Encoding e) {
    switch (e) {
        case Encoding::Baseline: return "baseline";
        case Encoding::Dru: return "dru";
        case Encoding::CyclicDru: return "cyclic";
    }
    return "?";
}

Encoding encoding_from_name(const std::string& name) {
    if (name == "baseline") return Encoding::Baseline;
    if (name == "dru") return Encoding::Dru;
    if (name == "cyclic" || name == "cyclic-dru") return Encoding::CyclicDru;
    throw std::invalid_argument("unknown encoding '" + name + "'");
}

Template build_template(Encoding strategy, int layers, int qubits) {
    if (layers < 1) throw std::invalid_argument("layers must be >= 1");
    if (qubits < 2) throw std::invalid_argument("qubits must be >= 2");

    Template t;
    t.encoding = strategy;
    t.layers = layers;
    t.circuit.num_qubits = qubits;
    t.circuit.num_features = qubits;
    t.circuit.num_params = 2 * qubits * layers;

    auto& gates = t.circuit.gates;
    int param = 0;
    for (int layer = 0; layer < layers; ++layer) {
        const bool encode = (layer == 0) || strategy != Encoding::Baseline;
        if (encode) {
            const int shift = (strategy == Encoding::CyclicDru) ? layer : 0;
            for (int q = 0; q < qubits; ++q)
                gates.push_back(Gate::rx(q, AngleSource::input((q + shift) % qubits)));
        }
        for (int q = 0; q < qubits; ++q)
            gates.push_back(Gate::ry(q, AngleSource::param(param++)));
        for (int q = 0; q < qubits; ++q)
            gates.push_back(Gate::rz(q, AngleSource::param(param++)));
        for (int q = 0; q + 1 < qubits; ++q) gates.push_back(Gate::cz(q, q + 1));
    }
    return t;
}

QModel make_qmodel(Encoding strategy, int layers, int qubits, Rng& rng) {
    if (qubits < 4)
        throw std::invalid_argument("two-action model needs at least 4 qubits");
    QModel m;
    m.tmpl = build_template(strategy, layers, qubits);
    m.theta.resize(m.tmpl.num_params());
    constexpr double pi = std::numbers::pi;
    for (double& th : m.theta) th = rng.uniform(-pi, pi);
    m.weights = {1.0, 1.0};
    m.observables = {qsim::Observable::zz(0, 1), qsim::Observable::zz(2, 3)};
    return m;
}

namespace {

constexpr char kModelMagic[4] = {'B', 'C', 'Q', 'M'};
constexpr std::uint32_t kModelVersion = 1;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void save_qmodel(const QModel& model, const std::string& path) {
    std::string out;
    out.append(kModelMagic, 4);
    bytesio::put_u32(out, kModelVersion);
    out.push_back(static_cast<char>(model.tmpl.encoding));
    bytesio::put_u32(out, static_cast<std::uint32_t>(model.tmpl.layers));
    bytesio::put_u32(out, static_cast<std::uint32_t>(model.tmpl.num_qubits()));
    bytesio::put_u32(out, static_cast<std::uint32_t>(model.theta.size()));
    bytesio::put_u32(out, static_cast<std::uint32_t>(model.weights.size()));
    for (double v : model.theta) bytesio::put_f64(out, v);
    for (double v : model.weights) bytesio::put_f64(out, v);
    bytesio::write_file(path, out);
}

QModel load_qmodel(const std::string& path) {
    const std::string raw = bytesio::read_file(path);
    bytesio::Reader r{raw};
    if (r.read_bytes(4, "magic") != std::string(kModelMagic, 4))
        throw std::runtime_error("model parse error at offset 0: bad magic");
    const std::uint32_t version = r.read_u32("version");
    if (version != kModelVersion)
        throw std::runtime_error("model parse error at offset 4: unsupported version " +
                                 std::to_string(version));
    const std::uint8_t tag = r.read_u8("strategy tag");
    if (tag > 2) throw std::runtime_error("model parse error: unknown strategy tag");
    const auto layers = static_cast<int>(r.read_u32("layer count"));
    const auto qubits = static_cast<int>(r.read_u32("qubit count"));
    const std::uint32_t np = r.read_u32("theta count");
    const std::uint32_t nw = r.read_u32("weight count");

    QModel m;
    m.tmpl = build_template(static_cast<Encoding>(tag), layers, qubits);
    if (np != static_cast<std::uint32_t>(m.tmpl.num_params()))
        throw std::runtime_error("model parse error: theta count does not match template");
    if (nw != 2) throw std::runtime_error("model parse error: expected 2 output weights");
    m.theta.resize(np);
    for (auto& v : m.theta) v = r.read_f64("theta");
    m.weights.resize(nw);
    for (auto& v : m.weights) v = r.read_f64("weight");
    m.observables = {qsim::Observable::zz(0, 1), qsim::Observable::zz(2, 3)};
    if (r.pos != raw.size())
        throw std::runtime_error("model parse error at offset " + std::to_string(r.pos) +
                                 ": trailing bytes");
    return m;
}

std::string qmodel_text(const QModel& model) {
    std::string out;
    out += "strategy=" + encoding_name(model.tmpl.encoding) + "\n";
    out += "layers=" + std::to_string(model.tmpl.layers) + "\n";
    out += "qubits=" + std::to_string(model.tmpl.num_qubits()) + "\n";
    for (std::size_t j = 0; j < model.theta.size(); ++j)
        out += "theta[" + std::to_string(j) + "]=" + fmt(model.theta[j]) + "\n";
    for (std::size_t a = 0; a < model.weights.size(); ++a)
        out += "w[" + std::to_string(a) + "]=" + fmt(model.weights[a]) + "\n";
    return out;
}

std::vector<double> expectations(const QModel& model, std::span<const double> s_norm) {
    const qsim::QubitState state = qsim::run_circuit(model.tmpl.circuit, s_norm, model.theta);
    std::vector<double> out(model.observables.size());
    for (std::size_t a = 0; a < model.observables.size(); ++a)
        out[a] = qsim::expectation(state, model.observables[a]);
    return out;
}

std::vector<double> q_values(const QModel& model, std::span<const double> s_norm) {
    std::vector<double> out = expectations(model, s_norm);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] *= model.weights[a];
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

std::vector<double> gen_probs(const QModel& model, std::span<const double> s_norm) {
    return softmax(q_values(model, s_norm));
}

std::vector<double> get_params(const QModel& model) {
    std::vector<double> flat = model.theta;
    flat.insert(flat.end(), model.weights.begin(), model.weights.end());
    return flat;
}

void set_params(QModel& model, std::span<const double> flat) {
    if (flat.size() != model.theta.size() + model.weights.size())
        throw std::invalid_argument("parameter vector length mismatch");
    std::copy(flat.begin(), flat.begin() + model.theta.size(), model.theta.begin());
    std::copy(flat.begin() + model.theta.size(), flat.end(), model.weights.begin());
}

} // namespace bcqq::ansatz
