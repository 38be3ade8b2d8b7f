#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bcqq/ansatz.hpp"
#include "bcqq/rng.hpp"

namespace bcqq::grad {

// Scalar loss as a function of a flat parameter vector.
using LossFn = std::function<double(std::span<const double>)>;

// Gradient of a scalar loss with respect to a model's trainables.
// evaluations_used counts loss evaluations for SPSA and shifted
// expectation-value estimations (2 per parameter per action per input)
// for parameter-shift.
struct GradEstimate {
    std::vector<double> d_theta;
    std::vector<double> d_weights;
    long evaluations_used = 0;
};

// Exact expectation gradients for half-angle Pauli rotations: entry (a, j)
// is (<O_a>(theta_j + pi/2) - <O_a>(theta_j - pi/2)) / 2. Each trainable
// parameter must be bound to at most one gate.
struct ExpectationGrads {
    int num_actions = 0;
    int num_params = 0;
    std::vector<double> d; // row-major [action][param]

    double at(int a, int j) const { return d[static_cast<std::size_t>(a) * num_params + j]; }
};

ExpectationGrads param_shift_expectation_grads(const ansatz::QModel& model,
                                               std::span<const double> s_norm);

// Differentiable scalar functional of the per-element, per-action model
// outputs (w_a * <O_a>). `grads` returns d loss / d output.
struct MinibatchLoss {
    std::function<double(const std::vector<std::array<double, 2>>&)> value;
    std::function<std::vector<std::array<double, 2>>(
        const std::vector<std::array<double, 2>>&)>
        grads;
};

// Exact loss gradient over (theta, weights): parameter-shift inner
// gradients chained with the loss's output gradients; d out_a / d w_a is
// the raw expectation. Optionally reports the loss value at the
// unperturbed parameters.
GradEstimate loss_grad_exact(const ansatz::QModel& model,
                             std::span<const std::array<double, 4>> states,
                             const MinibatchLoss& loss, double* loss_value = nullptr);

// Simultaneous-perturbation estimate with Rademacher directions:
// g_i = (L(p + c d) - L(p - c d)) / (2 c d_i). Exactly two loss
// evaluations. Throws std::invalid_argument when c <= 0.
struct SpsaEstimate {
    std::vector<double> grad;
    long evaluations_used = 0;
};

SpsaEstimate spsa_grad(const LossFn& loss, std::span<const double> params, double c,
                       Rng& rng);

// Central finite differences, the test oracle for both exact paths.
std::vector<double> finite_diff_grad(const LossFn& loss, std::span<const double> params,
                                     double h);

} // namespace bcqq::grad
