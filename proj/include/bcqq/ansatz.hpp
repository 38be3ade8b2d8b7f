#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "bcqq/qsim.hpp"
#include "bcqq/rng.hpp"

namespace bcqq::ansatz {

// Input-encoding strategy of the circuit template.
//   Baseline:  one RX encoding block, then L variational layers.
//   Dru:       the encoding block repeats before every layer, feature i
//              always on qubit i.
//   CyclicDru: like Dru, but block l places feature ((i + l) mod n) on
//              qubit i, so every qubit sees every feature as depth grows.
enum class Encoding { Baseline, Dru, CyclicDru };

std::string encoding_name(Encoding e);
Encoding encoding_from_name(const std::string& name);

struct Template {
    qsim::CircuitTemplate circuit;
    Encoding encoding = Encoding::Baseline;
    int layers = 0;

    int num_qubits() const { return circuit.num_qubits; }
    int num_features() const { return circuit.num_features; }
    int num_params() const { return circuit.num_params; }
};

// Gate order per layer: [encoding block] [RY x n] [RZ x n] [CZ ladder
// (0,1)..(n-2,n-1)]. Baseline emits the encoding block only for layer 0.
// Trainable angles are numbered in construction order, 2n per layer.
// Throws std::invalid_argument when layers < 1 or qubits < 2.
Template build_template(Encoding strategy, int layers, int qubits);

// Function approximator: circuit template, trainable angles theta, one
// diagonal observable per action, and a classical output weight per action.
// Action a reads w[a] * <O_a>.
struct QModel {
    Template tmpl;
    std::vector<double> theta;
    std::vector<double> weights;
    std::vector<qsim::Observable> observables;

    int num_actions() const { return static_cast<int>(observables.size()); }
    // All trainables: theta then output weights.
    int trainable_count() const {
        return static_cast<int>(theta.size() + weights.size());
    }
};

// Two-action model with O_0 = Z0 Z1 and O_1 = Z2 Z3. theta is drawn
// uniformly from [-pi, pi]; output weights start at 1.
QModel make_qmodel(Encoding strategy, int layers, int qubits, Rng& rng);

// Checkpoint: "BCQM" magic, version, strategy tag, layer/qubit counts, then
// theta and w as little-endian doubles. The text form is for inspection.
void save_qmodel(const QModel& model, const std::string& path);
QModel load_qmodel(const std::string& path);
std::string qmodel_text(const QModel& model);

// Raw observable expectations <O_a> at the model's parameters.
std::vector<double> expectations(const QModel& model, std::span<const double> s_norm);

// Q_a = w_a * <O_a>.
std::vector<double> q_values(const QModel& model, std::span<const double> s_norm);

// Softmax over the scaled expectations; components sum to one.
std::vector<double> gen_probs(const QModel& model, std::span<const double> s_norm);

std::vector<double> softmax(std::span<const double> logits);

// Flat trainable vector [theta; weights] used by optimizers and checkpoints.
std::vector<double> get_params(const QModel& model);
void set_params(QModel& model, std::span<const double> flat);

} // namespace bcqq::ansatz
