#include "bcqq/qsim.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcqq::qsim {

namespace {

void check_qubit(const QubitState& state, int q, const char* what) {
    if (q < 0 || q >= state.num_qubits)
        throw std::invalid_argument(std::string("invalid gate: ") + what + " qubit " +
                                    std::to_string(q) + " out of range for " +
                                    std::to_string(state.num_qubits) + " qubits");
}

// One-qubit rotation as an in-place update over index pairs (i, i | bit).
// u00..u11 is the 2x2 matrix in the {|0>, |1>} basis of the target qubit.
void apply_1q(QubitState& state, int target, cplx u00, cplx u01, cplx u10, cplx u11) {
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t dim = state.dim();
    cplx* a = state.amps.data();
    for (std::size_t base = 0; base < dim; base += 2 * bit) {
        for (std::size_t lo = base; lo < base + bit; ++lo) {
            const std::size_t hi = lo | bit;
            const cplx a0 = a[lo];
            const cplx a1 = a[hi];
            a[lo] = u00 * a0 + u01 * a1;
            a[hi] = u10 * a0 + u11 * a1;
        }
    }
}

} // namespace

QubitState QubitState::zero(int num_qubits) {
    if (num_qubits < 1 || num_qubits > 12)
        throw std::invalid_argument("qubit count must be in [1, 12]");
    QubitState s;
    s.num_qubits = num_qubits;
    s.amps.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
    s.amps[0] = cplx{1.0, 0.0};
    return s;
}

double QubitState::norm() const {
    double n2 = 0.0;
    for (const cplx& a : amps) n2 += std::norm(a);
    return std::sqrt(n2);
}

void apply_gate(QubitState& state, const Gate& gate, double angle) {
    check_qubit(state, gate.target, "target");
    if (gate.kind == GateKind::CZ) {
        check_qubit(state, gate.control, "control");
        if (gate.control == gate.target)
            throw std::invalid_argument("invalid gate: CZ control equals target");
        const std::size_t mask =
            (std::size_t{1} << gate.control) | (std::size_t{1} << gate.target);
        for (std::size_t i = 0; i < state.dim(); ++i)
            if ((i & mask) == mask) state.amps[i] = -state.amps[i];
        return;
    }
    if (!std::isfinite(angle)) throw std::invalid_argument("invalid gate: non-finite angle");

    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    switch (gate.kind) {
        case GateKind::RX:
            apply_1q(state, gate.target, {c, 0}, {0, -s}, {0, -s}, {c, 0});
            break;
        case GateKind::RY:
            apply_1q(state, gate.target, {c, 0}, {-s, 0}, {s, 0}, {c, 0});
            break;
        case GateKind::RZ:
            apply_1q(state, gate.target, {c, -s}, {0, 0}, {0, 0}, {c, s});
            break;
        case GateKind::CZ:
            break; // handled above
    }
}

void run_circuit_into(QubitState& state, const CircuitTemplate& tmpl,
                      std::span<const double> inputs, std::span<const double> params) {
    if (static_cast<int>(inputs.size()) != tmpl.num_features)
        throw std::invalid_argument("binding error: expected " +
                                    std::to_string(tmpl.num_features) + " inputs, got " +
                                    std::to_string(inputs.size()));
    if (static_cast<int>(params.size()) != tmpl.num_params)
        throw std::invalid_argument("binding error: expected " +
                                    std::to_string(tmpl.num_params) + " params, got " +
                                    std::to_string(params.size()));

    const std::size_t dim = std::size_t{1} << tmpl.num_qubits;
    state.num_qubits = tmpl.num_qubits;
    state.amps.assign(dim, cplx{0.0, 0.0});
    state.amps[0] = cplx{1.0, 0.0};

    for (const Gate& g : tmpl.gates) {
        double angle = 0.0;
        if (g.kind != GateKind::CZ) {
            switch (g.angle.kind) {
                case AngleSource::Kind::InputFeature: angle = inputs[g.angle.index]; break;
                case AngleSource::Kind::TrainableParam: angle = params[g.angle.index]; break;
                case AngleSource::Kind::Constant: angle = g.angle.value; break;
            }
        }
        apply_gate(state, g, angle);
    }
}

QubitState run_circuit(const CircuitTemplate& tmpl, std::span<const double> inputs,
                       std::span<const double> params) {
    QubitState state;
    run_circuit_into(state, tmpl, inputs, params);
    return state;
}

double expectation(const QubitState& state, const Observable& obs) {
    double total = 0.0;
    for (const PauliTerm& term : obs.terms) {
        double acc = 0.0;
        for (std::size_t i = 0; i < state.dim(); ++i) {
            const double p = std::norm(state.amps[i]);
            const bool odd = std::popcount(static_cast<std::uint32_t>(i) & term.z_mask) & 1;
            acc += odd ? -p : p;
        }
        total += term.coeff * acc;
    }
    return total;
}

std::vector<long> sample_counts(const QubitState& state, int shots, Rng& rng) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    const std::size_t dim = state.dim();
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }
    std::vector<long> counts(dim, 0);
    for (int s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        std::size_t lo = 0, hi = dim - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        ++counts[lo];
    }
    return counts;
}

double expectation_from_counts(std::span<const long> counts, const Observable& obs,
                               long shots) {
    double total = 0.0;
    for (const PauliTerm& term : obs.terms) {
        double acc = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) continue;
            const bool odd = std::popcount(static_cast<std::uint32_t>(i) & term.z_mask) & 1;
            acc += (odd ? -1.0 : 1.0) * static_cast<double>(counts[i]);
        }
        total += term.coeff * acc;
    }
    return total / static_cast<double>(shots);
}

double sample_expectation(const QubitState& state, const Observable& obs, int shots,
                          Rng& rng) {
    const std::vector<long> counts = sample_counts(state, shots, rng);
    return expectation_from_counts(counts, obs, shots);
}

} // namespace bcqq::qsim
