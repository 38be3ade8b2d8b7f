#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "bcqq/env.hpp"
#include "bcqq/rng.hpp"

using namespace bcqq;
using env::CartPole;
using env::State;

TEST_SUITE("env") {

TEST_CASE("one step from rest under a rightward push") {
    CartPole cart;
    cart.reset(State{0.0, 0.0, 0.0, 0.0});
    const env::StepResult r = cart.step(1);
    const double temp = 10.0 / 1.1;
    const double theta_acc = -temp / (0.5 * (4.0 / 3.0 - 0.1 / 1.1));
    const double x_acc = temp - 0.05 * theta_acc / 1.1;
    CHECK(r.state.x == 0.0);
    CHECK(r.state.theta == 0.0);
    CHECK(r.state.x_dot == doctest::Approx(0.02 * x_acc).epsilon(1e-15));
    CHECK(r.state.theta_dot == doctest::Approx(0.02 * theta_acc).epsilon(1e-15));
    CHECK(r.state.x_dot == doctest::Approx(0.19512194).epsilon(1e-7));
    CHECK(r.state.theta_dot == doctest::Approx(-0.29268292).epsilon(1e-7));
    CHECK(r.reward == 1.0);
    CHECK_FALSE(r.terminated);
    CHECK_FALSE(r.truncated);
}

TEST_CASE("angular acceleration uses the pre-update velocities") {
    CartPole cart;
    cart.reset(State{0.1, 1.0, 0.05, -0.5});
    const State before = cart.state();
    const env::StepResult r = cart.step(0);

    const double force = -10.0;
    const double costh = std::cos(before.theta);
    const double sinth = std::sin(before.theta);
    const double temp =
        (force + 0.05 * before.theta_dot * before.theta_dot * sinth) / 1.1;
    const double theta_acc =
        (9.8 * sinth - costh * temp) / (0.5 * (4.0 / 3.0 - 0.1 * costh * costh / 1.1));
    const double x_acc = temp - 0.05 * theta_acc * costh / 1.1;

    CHECK(r.state.x == doctest::Approx(before.x + 0.02 * before.x_dot).epsilon(1e-15));
    CHECK(r.state.x_dot == doctest::Approx(before.x_dot + 0.02 * x_acc).epsilon(1e-15));
    CHECK(r.state.theta ==
          doctest::Approx(before.theta + 0.02 * before.theta_dot).epsilon(1e-15));
    CHECK(r.state.theta_dot ==
          doctest::Approx(before.theta_dot + 0.02 * theta_acc).epsilon(1e-15));
}

TEST_CASE("position bound is strict") {
    CartPole still;
    still.reset(State{2.4, 0.0, 0.0, 0.0});
    CHECK_FALSE(still.step(1).terminated);

    CartPole moving;
    moving.reset(State{2.4, 0.1, 0.0, 0.0});
    CHECK(moving.step(1).terminated);
}

TEST_CASE("angle bound is strict") {
    const double limit = CartPole::kThetaThreshold;
    CartPole inside;
    inside.reset(State{0.0, 0.0, limit, 0.0});
    CHECK_FALSE(inside.step(1).terminated);

    CartPole outside;
    outside.reset(State{0.0, 0.0, limit, 0.2});
    CHECK(outside.step(1).terminated);
}

TEST_CASE("terminal steps still pay full reward") {
    CartPole cart;
    cart.reset(State{2.4, 0.5, 0.0, 0.0});
    const env::StepResult r = cart.step(1);
    CHECK(r.terminated);
    CHECK(r.reward == 1.0);
}

TEST_CASE("truncation fires at the step cap and only there") {
    CartPole capped(3);
    CartPole uncapped(0);
    capped.reset(State{0.0, 0.0, 0.0, 0.0});
    uncapped.reset(State{0.0, 0.0, 0.0, 0.0});
    for (int i = 0; i < 2; ++i) {
        CHECK_FALSE(capped.step(i % 2).truncated);
        uncapped.step(i % 2);
    }
    const env::StepResult rc = capped.step(0);
    const env::StepResult ru = uncapped.step(0);
    CHECK(rc.truncated);
    CHECK_FALSE(rc.terminated);
    CHECK_FALSE(ru.truncated);
    CHECK(rc.state.x == ru.state.x);
}

TEST_CASE("stepping outside an episode is an error") {
    CartPole cart;
    CHECK_THROWS_AS(cart.step(0), std::logic_error);
    cart.reset(State{2.4, 0.5, 0.0, 0.0});
    cart.step(1);
    CHECK_THROWS_AS(cart.step(1), std::logic_error);
    cart.reset(State{0, 0, 0, 0});
    CHECK_THROWS_AS(cart.step(2), std::invalid_argument);
    CHECK_THROWS_AS(cart.step(-1), std::invalid_argument);
}

TEST_CASE("reset draws every component from its small interval") {
    Rng rng(123);
    CartPole cart;
    double lo = 1.0, hi = -1.0;
    for (int i = 0; i < 500; ++i) {
        const State s = cart.reset(rng);
        for (const double v : s.as_array()) {
            CHECK(v >= -0.05);
            CHECK(v <= 0.05);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    CHECK(lo < -0.04);
    CHECK(hi > 0.04);
}

TEST_CASE("random policy survives a couple dozen steps on average") {
    Rng rng(7);
    double total = 0.0;
    const int episodes = 300;
    for (int e = 0; e < episodes; ++e) {
        CartPole cart;
        cart.reset(rng);
        int steps = 0;
        while (true) {
            ++steps;
            if (cart.step(static_cast<int>(rng.below(2))).done()) break;
        }
        total += steps;
    }
    const double mean = total / episodes;
    CHECK(mean > 15.0);
    CHECK(mean < 35.0);
}

TEST_CASE("normalization maps bounds onto the angle interval") {
    const auto mid = env::normalize(State{0, 0, 0, 0});
    for (const double v : mid) CHECK(v == 0.0);

    const auto hix = env::normalize(State{2.4, 0, 0, 0});
    CHECK(hix[0] == doctest::Approx(std::numbers::pi));
    const auto lox = env::normalize(State{-2.4, 0, 0, 0});
    CHECK(lox[0] == doctest::Approx(-std::numbers::pi));

    const auto theta = env::normalize(State{0, 0, CartPole::kThetaThreshold / 2, 0});
    CHECK(theta[2] == doctest::Approx(std::numbers::pi / 2));

    const auto vel = env::normalize(State{0, 1.5, 0, -3.0});
    CHECK(vel[1] == doctest::Approx(std::numbers::pi / 2));
    CHECK(vel[3] == doctest::Approx(-std::numbers::pi));
}

TEST_CASE("normalization clips out-of-range values") {
    const auto clipped = env::normalize(State{100.0, -50.0, 1.0, 9.0});
    CHECK(clipped[0] == doctest::Approx(std::numbers::pi));
    CHECK(clipped[1] == doctest::Approx(-std::numbers::pi));
    CHECK(clipped[2] == doctest::Approx(std::numbers::pi));
    CHECK(clipped[3] == doctest::Approx(std::numbers::pi));
    for (const double v : clipped) CHECK(std::abs(v) <= std::numbers::pi + 1e-15);
}

}
