#include "bcqq/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcqq::env {

State CartPole::reset(Rng& rng) {
    s_.x = rng.uniform(-0.05, 0.05);
    s_.x_dot = rng.uniform(-0.05, 0.05);
    s_.theta = rng.uniform(-0.05, 0.05);
    s_.theta_dot = rng.uniform(-0.05, 0.05);
    steps_ = 0;
    started_ = true;
    finished_ = false;
    return s_;
}

State CartPole::reset(const State& s0) {
    s_ = s0;
    steps_ = 0;
    started_ = true;
    finished_ = false;
    return s_;
}

StepResult CartPole::step(int action) {
    if (!started_) throw std::logic_error("step before reset");
    if (finished_) throw std::logic_error("step after episode end");
    if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");

    const double force = action == 1 ? kForceMag : -kForceMag;
    const double costh = std::cos(s_.theta);
    const double sinth = std::sin(s_.theta);

    const double temp =
        (force + kPoleMassLength * s_.theta_dot * s_.theta_dot * sinth) / kTotalMass;
    const double theta_acc = (kGravity * sinth - costh * temp) /
                             (kLength * (4.0 / 3.0 - kMassPole * costh * costh / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * costh / kTotalMass;

    s_.x += kTau * s_.x_dot;
    s_.x_dot += kTau * x_acc;
    s_.theta += kTau * s_.theta_dot;
    s_.theta_dot += kTau * theta_acc;
    ++steps_;

    StepResult r;
    r.state = s_;
    r.reward = 1.0;
    r.terminated = s_.x < -kXThreshold || s_.x > kXThreshold ||
                   s_.theta < -kThetaThreshold || s_.theta > kThetaThreshold;
    r.truncated = !r.terminated && max_steps_ > 0 && steps_ >= max_steps_;
    finished_ = r.terminated || r.truncated;
    return r;
}

namespace {

double to_angle(double v, double bound) {
    const double c = std::clamp(v, -bound, bound);
    return c / bound * std::numbers::pi;
}

} // namespace

std::array<double, 4> normalize(const State& s) { return normalize(s.as_array()); }

std::array<double, 4> normalize(const std::array<double, 4>& s) {
    return {to_angle(s[0], CartPole::kXThreshold), to_angle(s[1], 3.0),
            to_angle(s[2], CartPole::kThetaThreshold), to_angle(s[3], 3.0)};
}

} // namespace bcqq::env
