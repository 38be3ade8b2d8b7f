#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bcqq/rng.hpp"

using bcqq::Rng;

TEST_SUITE("rng") {

TEST_CASE("same seed replays the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("output is a pure function of key and counter") {
    Rng a(7);
    a.next_u64();
    a.next_u64();
    Rng b(7, 2);
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
    CHECK(equal == 0);
}

TEST_CASE("substream depends on the name, not on draw position") {
    Rng root(9);
    Rng before = root.substream("env");
    root.next_u64();
    root.next_u64();
    Rng after = root.substream("env");
    CHECK(before.key() == after.key());
    CHECK(root.substream("env").key() != root.substream("init").key());
}

TEST_CASE("forks are distinct and reproducible") {
    Rng root(17);
    CHECK(root.fork(0).key() == root.fork(0).key());
    CHECK(root.fork(0).key() != root.fork(1).key());
    CHECK(root.fork(3).next_u64() == root.fork(3).next_u64());
}

TEST_CASE("uniform stays in the half-open unit interval") {
    Rng r(3);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform mean near one half") {
    Rng r(11);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += r.uniform();
    // standard error is about 0.0009; allow five of them
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("below covers all residues roughly evenly") {
    Rng r(5);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[r.below(7)];
    for (const int c : counts) {
        CHECK(c > 9000);
        CHECK(c < 11000);
    }
}

TEST_CASE("rademacher is a fair sign") {
    Rng r(13);
    int plus = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) plus += r.rademacher() == 1;
    CHECK(plus > n / 2 - 800);
    CHECK(plus < n / 2 + 800);
    Rng s(13);
    const int v = s.rademacher();
    CHECK((v == 1 || v == -1));
}

TEST_CASE("bounded uniform respects its interval") {
    Rng r(19);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform(-3.0, 3.0);
        CHECK(u >= -3.0);
        CHECK(u < 3.0);
    }
}

}
