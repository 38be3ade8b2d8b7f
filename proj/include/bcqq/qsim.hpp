#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bcqq/rng.hpp"

namespace bcqq::qsim {

using cplx = std::complex<double>;

// Dense statevector of an n-qubit register. Basis index bit i is qubit i
// (qubit 0 is the least significant bit).
struct QubitState {
    int num_qubits = 0;
    std::vector<cplx> amps;

    static QubitState zero(int num_qubits);

    std::size_t dim() const { return amps.size(); }
    double norm() const;
};

enum class GateKind { RX, RY, RZ, CZ };

// Where a rotation gate takes its angle from when a circuit is run.
struct AngleSource {
    enum class Kind { InputFeature, TrainableParam, Constant };
    Kind kind = Kind::Constant;
    int index = 0;      // feature or parameter slot
    double value = 0.0; // Constant only

    static AngleSource input(int i) { return {Kind::InputFeature, i, 0.0}; }
    static AngleSource param(int j) { return {Kind::TrainableParam, j, 0.0}; }
    static AngleSource constant(double v) { return {Kind::Constant, 0, v}; }
};

struct Gate {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1; // CZ only
    AngleSource angle; // rotation gates only

    static Gate rx(int q, AngleSource a) { return {GateKind::RX, q, -1, a}; }
    static Gate ry(int q, AngleSource a) { return {GateKind::RY, q, -1, a}; }
    static Gate rz(int q, AngleSource a) { return {GateKind::RZ, q, -1, a}; }
    static Gate cz(int control, int target) { return {GateKind::CZ, target, control, {}}; }
};

// Weighted sum of diagonal Pauli strings. Bit i of z_mask marks a Z factor
// on qubit i; clear bits are identity. Diagonality keeps expectation values
// a single pass over basis-state probabilities.
struct PauliTerm {
    std::uint32_t z_mask = 0;
    double coeff = 1.0;
};

struct Observable {
    std::vector<PauliTerm> terms;

    static Observable zz(int q1, int q2) {
        return Observable{{PauliTerm{(1u << q1) | (1u << q2), 1.0}}};
    }
};

// Ordered gate list with symbolic angle bindings. num_features /
// num_params are the sizes run_circuit expects for inputs / params.
struct CircuitTemplate {
    int num_qubits = 0;
    int num_features = 0;
    int num_params = 0;
    std::vector<Gate> gates;
};

// In-place gate application. Rotations follow exp(-i * angle * P / 2);
// CZ is diag(1, 1, 1, -1). Throws std::invalid_argument on bad qubit
// indices or a non-finite angle.
void apply_gate(QubitState& state, const Gate& gate, double angle);

// Applies the template's gates to |0...0> with angle sources resolved
// against `inputs` and `params`. Throws std::invalid_argument when the
// vector lengths do not match the template.
QubitState run_circuit(const CircuitTemplate& tmpl, std::span<const double> inputs,
                       std::span<const double> params);

// Same contract, but reuses `state` as the output buffer.
void run_circuit_into(QubitState& state, const CircuitTemplate& tmpl,
                      std::span<const double> inputs, std::span<const double> params);

// <state|obs|state> for a diagonal observable: sum over basis states of
// |amplitude|^2 times the Pauli-string eigenvalue.
double expectation(const QubitState& state, const Observable& obs);

// Finite-shot estimate: draws `shots` computational-basis samples from
// |amplitudes|^2 and averages the observable eigenvalues. Unbiased for
// `expectation`. Throws std::invalid_argument when shots < 1.
double sample_expectation(const QubitState& state, const Observable& obs, int shots,
                          Rng& rng);

// Basis-state histogram of `shots` samples, for callers that evaluate
// several observables on one set of draws.
std::vector<long> sample_counts(const QubitState& state, int shots, Rng& rng);

double expectation_from_counts(std::span<const long> counts, const Observable& obs,
                               long shots);

} // namespace bcqq::qsim
