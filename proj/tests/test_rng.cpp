#include "doctest.h"

#include <cmath>
#include <vector>

#include "netbench/rng.hpp"

using namespace netbench;

// Golden values frozen from the first run. mt19937_64 output is pinned by
// the standard and every transform is hand-rolled, so these must hold on
// any conforming platform.
TEST_CASE("mt19937_64 stream for seed 42") {
    Rng r(42);
    CHECK(r.next_u64() == 13930160852258120406ull);
    CHECK(r.next_u64() == 11788048577503494824ull);
    CHECK(r.next_u64() == 13874630024467741450ull);
}

TEST_CASE("uniform01 golden stream") {
    Rng r(42);
    CHECK(r.uniform01() == 0.75515553295453897);
    CHECK(r.uniform01() == 0.63903139385469743);
    CHECK(r.uniform01() == 0.7521452007480266);
}

TEST_CASE("exponential golden stream") {
    Rng r(7);
    CHECK(r.exponential(2.0) == 0.7019956239940589);
    CHECK(r.exponential(2.0) == 1.4909265471798188);
}

TEST_CASE("normal golden stream") {
    Rng r(7);
    CHECK(r.normal() == 1.5913998756469563);
    CHECK(r.normal() == 0.38890323470535709);
}

TEST_CASE("lognormal golden value") {
    Rng r(123);
    CHECK(r.lognormal(1.0, 0.5) == 1.8096089897192145);
}

TEST_CASE("same seed, same stream; different seed, different stream") {
    Rng a(99), b(99), c(100);
    bool diverged = false;
    for (int i = 0; i < 64; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        if (x != c.next_u64()) diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("uniform01 stays in [0,1)") {
    Rng r(5);
    for (int i = 0; i < 10000; ++i) {
        double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("exponential mean approaches 1/rate") {
    Rng r(17);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += r.exponential(4.0);
    CHECK(std::abs(sum / n - 0.25) < 0.25 * 0.02);
}

TEST_CASE("normal moments approach 0 and 1") {
    Rng r(23);
    double sum = 0, sq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("pick_cumulative lands in proportion to weights") {
    Rng r(31);
    std::vector<double> cum{1.0, 3.0, 4.0};  // weights 1, 2, 1
    int counts[3] = {0, 0, 0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[r.pick_cumulative(cum)]++;
    CHECK(std::abs(counts[0] / double(n) - 0.25) < 0.01);
    CHECK(std::abs(counts[1] / double(n) - 0.50) < 0.01);
    CHECK(std::abs(counts[2] / double(n) - 0.25) < 0.01);
}

TEST_CASE("pick_cumulative boundary cases") {
    Rng r(1);
    std::vector<double> single{2.0};
    for (int i = 0; i < 100; ++i) CHECK(r.pick_cumulative(single) == 0);
}
