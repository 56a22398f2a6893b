#include "support.hpp"

#include "wbn/weighting.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using wbn::ErrorCode;

namespace {

std::vector<std::size_t> labels_for(const std::vector<std::size_t>& counts)
{
    std::vector<std::size_t> labels;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        labels.insert(labels.end(), counts[k], k);
    }
    return labels;
}

} // namespace

TEST_CASE("class counts")
{
    const auto labels = labels_for({5923, 45});
    const auto c = wbn::class_counts(labels, 2);
    CHECK(c.counts == std::vector<std::size_t>{5923, 45});
    CHECK(c.total == 5968);

    const auto data = wbn::make_dataset(wbn::Matrix(3, 1), std::vector<std::size_t>{0, 1, 1}, {0, 1});
    const auto d = wbn::class_counts(data);
    CHECK(d.counts == std::vector<std::size_t>{1, 2});
    CHECK(d.total == 3);

    CHECK_WBN_ERROR(wbn::class_counts(std::vector<std::size_t>{0}, 2), ErrorCode::EmptyClass);
}

TEST_CASE("inverse frequency weights on experiment (i) counts")
{
    const auto labels = labels_for({5923, 45});
    const auto w = wbn::inverse_frequency_weights(wbn::class_counts(labels, 2), labels);
    CHECK(w.weights.front() == doctest::Approx(5968.0 / 5923.0).epsilon(1e-15));
    CHECK(w.weights.back() == doctest::Approx(5968.0 / 45.0).epsilon(1e-15));
    CHECK(w.weights.front() == doctest::Approx(1.0076).epsilon(1e-4));
    CHECK(w.weights.back() == doctest::Approx(132.62).epsilon(1e-4));

    const auto eff = wbn::effective_class_sizes(w.weights, labels, 2);
    CHECK(std::abs(eff[0] - 5968.0) / 5968.0 < 1e-9);
    CHECK(std::abs(eff[1] - 5968.0) / 5968.0 < 1e-9);
    CHECK(w.total == doctest::Approx(2 * 5968.0));
}

TEST_CASE("inverse frequency under balance and with one class")
{
    const auto labels = labels_for({50, 50});
    const auto w = wbn::inverse_frequency_weights(wbn::class_counts(labels, 2), labels);
    for (double x : w.weights) {
        CHECK(x == 2.0);
    }
    const auto single = labels_for({3});
    for (double x : wbn::inverse_frequency_weights(wbn::class_counts(single, 1), single).weights) {
        CHECK(x == 1.0);
    }
}

TEST_CASE("class-balanced weights")
{
    const auto labels = labels_for({100, 1, 7});
    const auto counts = wbn::class_counts(labels, 3);

    for (double x : wbn::class_balanced_weights(counts, labels, {0.0}).weights) {
        CHECK(x == 1.0);
    }

    const auto w = wbn::class_balanced_weights(counts, labels, {0.999});
    const double oracle = 0.001 / (1.0 - std::pow(0.999, 100));
    CHECK(w.weights.front() == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(w.weights.front() == doctest::Approx(0.010503).epsilon(1e-4));
    // alpha = 1 gives exactly 1 for any beta.
    CHECK(w.weights[100] == doctest::Approx(1.0).epsilon(1e-14));
    for (double beta : {0.1, 0.5, 0.9999}) {
        CHECK(wbn::class_balanced_weights(counts, labels, {beta}).weights[100] == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_WBN_ERROR(wbn::class_balanced_weights(counts, labels, {1.0}), ErrorCode::InvalidArgument);
    CHECK_WBN_ERROR(wbn::class_balanced_weights(counts, labels, {-0.1}), ErrorCode::InvalidArgument);
}

TEST_CASE("class-balanced weights approach 1/alpha as beta -> 1")
{
    for (std::size_t alpha : {1u, 2u, 45u, 1000u, 5923u, 10000u}) {
        const auto labels = labels_for({alpha});
        const auto w = wbn::class_balanced_weights(wbn::class_counts(labels, 1), labels, {1.0 - 1e-6});
        const double scaled = w.weights.front() * static_cast<double>(alpha);
        CHECK(scaled >= 0.999);
        CHECK(scaled <= 1.01);
    }
}

TEST_CASE("class-balanced weights decrease with class size")
{
    std::vector<std::size_t> counts;
    for (std::size_t a = 1; a <= 60; ++a) {
        counts.push_back(a);
    }
    const auto labels = labels_for(counts);
    for (double beta : {0.5, 0.9, 0.99}) {
        const auto w = wbn::class_balanced_weights(wbn::class_counts(labels, counts.size()), labels, {beta});
        std::size_t pos = 0;
        double prev = 2.0;
        for (std::size_t a : counts) {
            CHECK(w.weights[pos] <= prev);
            prev = w.weights[pos];
            pos += a;
        }
    }
}

TEST_CASE("effective class sizes")
{
    const std::vector<std::size_t> labels{0, 1, 1};
    CHECK(wbn::effective_class_sizes(std::vector<double>{2, 2, 2}, labels, 2) == std::vector<double>{2, 4});
    CHECK(wbn::effective_class_sizes(std::vector<double>{1, 1, 1}, labels, 2) == std::vector<double>{1, 2});
    CHECK_WBN_ERROR(wbn::effective_class_sizes(std::vector<double>{1, 1}, labels, 2), ErrorCode::ShapeMismatch);
}

TEST_CASE("weight vector helpers")
{
    const auto u = wbn::WeightVector::uniform(4, 2.5);
    CHECK(u.weights.size() == 4);
    CHECK(u.total == 10.0);
    CHECK(wbn::WeightVector::from({1, 2, 3}).total == 6.0);
}
