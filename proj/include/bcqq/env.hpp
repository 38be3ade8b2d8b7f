#pragma once

#include <array>
#include <numbers>

#include "bcqq/rng.hpp"

namespace bcqq::env {

struct State {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;

    std::array<double, 4> as_array() const { return {x, x_dot, theta, theta_dot}; }
};

struct StepResult {
    State state;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;

    bool done() const { return terminated || truncated; }
};

// Cart-pole balancing with explicit Euler integration. The episode ends by
// termination when the cart or pole leaves its bounds and by truncation
// after max_steps (0 disables truncation); every step pays reward 1,
// terminal steps included.
class CartPole {
  public:
    explicit CartPole(int max_steps = kMaxSteps) : max_steps_(max_steps) {}

    static constexpr double kGravity = 9.8;
    static constexpr double kMassCart = 1.0;
    static constexpr double kMassPole = 0.1;
    static constexpr double kTotalMass = kMassCart + kMassPole;
    static constexpr double kLength = 0.5; // half the pole length
    static constexpr double kPoleMassLength = kMassPole * kLength;
    static constexpr double kForceMag = 10.0;
    static constexpr double kTau = 0.02;
    static constexpr double kXThreshold = 2.4;
    static constexpr double kThetaThreshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
    static constexpr int kMaxSteps = 500;

    State reset(Rng& rng);
    // Deterministic restart from a chosen state.
    State reset(const State& s0);
    StepResult step(int action);

    const State& state() const { return s_; }
    int steps() const { return steps_; }

  private:
    State s_;
    int max_steps_ = kMaxSteps;
    int steps_ = 0;
    bool started_ = false;
    bool finished_ = false;
};

// Clips each component to its bound and maps it linearly onto [-pi, pi].
// Bounds: |x| <= 2.4, |x_dot| <= 3, |theta| <= theta threshold,
// |theta_dot| <= 3.
std::array<double, 4> normalize(const State& s);
std::array<double, 4> normalize(const std::array<double, 4>& s);

} // namespace bcqq::env
