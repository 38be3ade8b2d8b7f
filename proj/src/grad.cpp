#include "bcqq/grad.hpp"

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bcqq/qsim.hpp"

namespace bcqq::grad {

namespace {

double resolve_angle(const qsim::AngleSource& a, std::span<const double> s_norm,
                     std::span<const double> theta) {
    switch (a.kind) {
    case qsim::AngleSource::Kind::InputFeature:
        return s_norm[static_cast<std::size_t>(a.index)];
    case qsim::AngleSource::Kind::TrainableParam:
        return theta[static_cast<std::size_t>(a.index)];
    case qsim::AngleSource::Kind::Constant:
        return a.value;
    }
    throw std::invalid_argument("invalid angle source");
}

} // namespace

ExpectationGrads param_shift_expectation_grads(const ansatz::QModel& model,
                                               std::span<const double> s_norm) {
    const auto& circ = model.tmpl.circuit;
    if (static_cast<int>(s_norm.size()) != circ.num_features)
        throw std::invalid_argument("binding error: expected " +
                                    std::to_string(circ.num_features) + " inputs, got " +
                                    std::to_string(s_norm.size()));
    const int P = circ.num_params;
    const int A = static_cast<int>(model.observables.size());
    const int G = static_cast<int>(circ.gates.size());

    std::vector<int> gate_of(static_cast<std::size_t>(P), -1);
    for (int g = 0; g < G; ++g) {
        const auto& a = circ.gates[static_cast<std::size_t>(g)].angle;
        if (a.kind != qsim::AngleSource::Kind::TrainableParam) continue;
        if (a.index < 0 || a.index >= P)
            throw std::invalid_argument("binding error: parameter index out of range");
        if (gate_of[static_cast<std::size_t>(a.index)] != -1)
            throw std::invalid_argument(
                "parameter shift requires each parameter bound to at most one gate");
        gate_of[static_cast<std::size_t>(a.index)] = g;
    }

    // One forward walk records the state just before every trainable gate;
    // the prefix does not depend on the shifted parameter, so only the
    // suffix is recomputed per shift.
    std::vector<std::pair<int, qsim::QubitState>> prefixes;
    prefixes.reserve(static_cast<std::size_t>(P));
    qsim::QubitState state = qsim::QubitState::zero(circ.num_qubits);
    for (int g = 0; g < G; ++g) {
        const auto& gate = circ.gates[static_cast<std::size_t>(g)];
        if (gate.angle.kind == qsim::AngleSource::Kind::TrainableParam)
            prefixes.emplace_back(g, state);
        qsim::apply_gate(state, gate, resolve_angle(gate.angle, s_norm, model.theta));
    }

    ExpectationGrads out;
    out.num_actions = A;
    out.num_params = P;
    out.d.assign(static_cast<std::size_t>(A) * static_cast<std::size_t>(P), 0.0);

    constexpr double shift = std::numbers::pi / 2.0;
    qsim::QubitState work = qsim::QubitState::zero(circ.num_qubits);
    for (const auto& [g, before] : prefixes) {
        const auto& gate = circ.gates[static_cast<std::size_t>(g)];
        const int j = gate.angle.index;
        const double base = model.theta[static_cast<std::size_t>(j)];
        for (int sign = 0; sign < 2; ++sign) {
            const double shifted = sign == 0 ? base + shift : base - shift;
            work = before;
            qsim::apply_gate(work, gate, shifted);
            for (int k = g + 1; k < G; ++k) {
                const auto& rest = circ.gates[static_cast<std::size_t>(k)];
                qsim::apply_gate(work, rest, resolve_angle(rest.angle, s_norm, model.theta));
            }
            const double scale = sign == 0 ? 0.5 : -0.5;
            for (int a = 0; a < A; ++a)
                out.d[static_cast<std::size_t>(a) * P + j] +=
                    scale * qsim::expectation(work, model.observables[static_cast<std::size_t>(a)]);
        }
    }
    return out;
}

GradEstimate loss_grad_exact(const ansatz::QModel& model,
                             std::span<const std::array<double, 4>> states,
                             const MinibatchLoss& loss, double* loss_value) {
    const int P = model.tmpl.circuit.num_params;
    const int A = static_cast<int>(model.observables.size());
    const std::size_t B = states.size();

    std::vector<std::array<double, 2>> expvals(B);
    std::vector<std::array<double, 2>> outputs(B);
    std::vector<ExpectationGrads> inner;
    inner.reserve(B);
    for (std::size_t i = 0; i < B; ++i) {
        const std::span<const double> s(states[i].data(), states[i].size());
        const auto e = ansatz::expectations(model, s);
        for (int a = 0; a < A; ++a) {
            expvals[i][static_cast<std::size_t>(a)] = e[static_cast<std::size_t>(a)];
            outputs[i][static_cast<std::size_t>(a)] =
                model.weights[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(a)];
        }
        inner.push_back(param_shift_expectation_grads(model, s));
    }

    if (loss_value != nullptr) *loss_value = loss.value(outputs);
    const auto go = loss.grads(outputs);
    if (go.size() != B)
        throw std::invalid_argument("loss gradient batch size mismatch");

    GradEstimate est;
    est.d_theta.assign(static_cast<std::size_t>(P), 0.0);
    est.d_weights.assign(static_cast<std::size_t>(A), 0.0);
    for (std::size_t i = 0; i < B; ++i) {
        for (int a = 0; a < A; ++a) {
            const double g = go[i][static_cast<std::size_t>(a)];
            if (g == 0.0) continue;
            const double wg = g * model.weights[static_cast<std::size_t>(a)];
            for (int j = 0; j < P; ++j)
                est.d_theta[static_cast<std::size_t>(j)] += wg * inner[i].at(a, j);
            est.d_weights[static_cast<std::size_t>(a)] += g * expvals[i][static_cast<std::size_t>(a)];
        }
    }
    est.evaluations_used = static_cast<long>(B) * 2L * P * A;
    return est;
}

SpsaEstimate spsa_grad(const LossFn& loss, std::span<const double> params, double c,
                       Rng& rng) {
    if (!(c > 0.0)) throw std::invalid_argument("spsa perturbation size must be positive");
    const std::size_t n = params.size();
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = rng.rademacher();

    std::vector<double> plus(params.begin(), params.end());
    std::vector<double> minus(params.begin(), params.end());
    for (std::size_t i = 0; i < n; ++i) {
        plus[i] += c * delta[i];
        minus[i] -= c * delta[i];
    }
    const double lp = loss(plus);
    const double lm = loss(minus);

    SpsaEstimate est;
    est.grad.resize(n);
    const double num = lp - lm;
    for (std::size_t i = 0; i < n; ++i) est.grad[i] = num * delta[i] / (2.0 * c);
    est.evaluations_used = 2;
    return est;
}

std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
    std::vector<double> p(params.begin(), params.end());
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double lp = loss(p);
        p[i] = orig - h;
        const double lm = loss(p);
        p[i] = orig;
        g[i] = (lp - lm) / (2.0 * h);
    }
    return g;
}

} // namespace bcqq::grad
