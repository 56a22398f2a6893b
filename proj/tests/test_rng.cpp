#include "wbn/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

using wbn::Rng;

TEST_CASE("same seed gives the same stream")
{
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
}

TEST_CASE("uniform stays in [0, 1) and has mean near 1/2")
{
    Rng rng(7);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("below hits every value of a small range and nothing outside")
{
    Rng rng(3);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto k = rng.below(7);
        REQUIRE(k < 7);
        ++hits[k];
    }
    for (int h : hits) {
        CHECK(h > 800);
        CHECK(h < 1200);
    }
    CHECK(rng.below(1) == 0);
}

TEST_CASE("normal draws have zero mean and unit variance")
{
    Rng rng(11);
    const int n = 200000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        ss += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(ss / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shuffle is a permutation")
{
    Rng rng(5);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) {
        CHECK(sorted[i] == i);
    }
    CHECK_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST_CASE("derived seeds are distinct across streams and parents")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (std::uint64_t stream : {0ull, 1ull, 100ull, 1000ull, 1001ull}) {
            seen.insert(wbn::derive_seed(seed, stream));
        }
    }
    CHECK(seen.size() == 100);
    CHECK(wbn::derive_seed(9, 4) == wbn::derive_seed(9, 4));
}
