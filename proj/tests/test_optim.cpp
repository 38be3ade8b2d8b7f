#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bcqq/optim.hpp"

using bcqq::optim::Kind;
using bcqq::optim::Optimizer;

TEST_SUITE("optim") {

TEST_CASE("zero gradient leaves parameters untouched") {
    for (const Kind kind : {Kind::Adam, Kind::Amsgrad}) {
        Optimizer opt(kind, 0.1, 3);
        std::vector<double> p{1.0, -2.0, 0.5};
        const std::vector<double> zero(3, 0.0);
        opt.step(p, zero);
        opt.step(p, zero);
        CHECK(p == std::vector<double>{1.0, -2.0, 0.5});
        CHECK(opt.t() == 2);
    }
}

TEST_CASE("first step moves by nearly the learning rate against the sign") {
    for (const Kind kind : {Kind::Adam, Kind::Amsgrad}) {
        Optimizer opt(kind, 0.01, 2);
        std::vector<double> p{0.0, 0.0};
        opt.step(p, std::vector<double>{0.5, -3.0});
        // m-hat = g and v-hat = g^2 after bias correction, so the step is
        // lr * g / (|g| + eps)
        CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
        CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-6));
    }
}

TEST_CASE("both optimizers settle a quadratic bowl") {
    for (const Kind kind : {Kind::Adam, Kind::Amsgrad}) {
        Optimizer opt(kind, 0.1, 1);
        std::vector<double> p{-4.0};
        for (int i = 0; i < 800; ++i) {
            const std::vector<double> g{2.0 * (p[0] - 3.0)};
            opt.step(p, g);
        }
        CHECK(std::abs(p[0] - 3.0) < 1e-2);
    }
}

TEST_CASE("spiky gradients shrink amsgrad steps but not adam steps") {
    Optimizer adam(Kind::Adam, 0.1, 1);
    Optimizer ams(Kind::Amsgrad, 0.1, 1);
    std::vector<double> pa{0.0}, pm{0.0};
    // one huge gradient, then a train of small ones
    adam.step(pa, std::vector<double>{100.0});
    ams.step(pm, std::vector<double>{100.0});
    for (int i = 0; i < 50; ++i) {
        adam.step(pa, std::vector<double>{0.01});
        ams.step(pm, std::vector<double>{0.01});
    }
    // the retained second-moment maximum keeps amsgrad cautious
    CHECK(std::abs(pm[0]) < std::abs(pa[0]));
}

TEST_CASE("amsgrad second-moment maximum never decreases") {
    Optimizer opt(Kind::Amsgrad, 0.05, 2);
    std::vector<double> p{1.0, 1.0};
    std::vector<double> prev_vhat{0.0, 0.0};
    const std::vector<std::vector<double>> grads{
        {5.0, 0.1}, {0.1, 0.1}, {0.01, 4.0}, {0.0, 0.0}, {1.0, 1.0}};
    for (const auto& g : grads) {
        opt.step(p, g);
        const std::vector<double> st = opt.state();
        // layout: t, m[0..1], v[0..1], vhat[0..1]
        REQUIRE(st.size() == 7);
        CHECK(st[5] >= prev_vhat[0]);
        CHECK(st[6] >= prev_vhat[1]);
        prev_vhat = {st[5], st[6]};
    }
}

TEST_CASE("state restore resumes the exact trajectory") {
    for (const Kind kind : {Kind::Adam, Kind::Amsgrad}) {
        Optimizer a(kind, 0.02, 2);
        std::vector<double> pa{0.3, -0.6};
        const std::vector<std::vector<double>> grads{
            {0.4, -1.0}, {-0.2, 2.0}, {1.5, 0.3}, {-0.7, -0.7}};
        a.step(pa, grads[0]);
        a.step(pa, grads[1]);

        Optimizer b(kind, 0.02, 2);
        b.restore_state(a.state());
        std::vector<double> pb = pa;

        a.step(pa, grads[2]);
        a.step(pa, grads[3]);
        b.step(pb, grads[2]);
        b.step(pb, grads[3]);
        CHECK(pa == pb);
        CHECK(a.state() == b.state());
    }
}

TEST_CASE("adam state has no maximum section") {
    Optimizer opt(Kind::Adam, 0.1, 3);
    std::vector<double> p{0, 0, 0};
    opt.step(p, std::vector<double>{1, 2, 3});
    CHECK(opt.state().size() == 1 + 3 + 3);
}

TEST_CASE("restore rejects a wrong-sized blob") {
    Optimizer opt(Kind::Amsgrad, 0.1, 2);
    CHECK_THROWS_AS(opt.restore_state(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
    CHECK(bcqq::optim::kind_from_name(bcqq::optim::kind_name(Kind::Adam)) == Kind::Adam);
    CHECK(bcqq::optim::kind_from_name(bcqq::optim::kind_name(Kind::Amsgrad)) == Kind::Amsgrad);
    CHECK_THROWS_AS(bcqq::optim::kind_from_name("sgd"), std::invalid_argument);
}

}
