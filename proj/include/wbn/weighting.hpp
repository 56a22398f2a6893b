#pragma once

#include "wbn/dataset.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace wbn {

// Per-class sample counts N_k and their total N.
struct ClassCounts {
    std::vector<std::size_t> counts;
    std::size_t total = 0;
};

// Per-sample loss weights w_mu and their sum Z.
struct WeightVector {
    std::vector<double> weights;
    double total = 0.0;

    static WeightVector uniform(std::size_t n, double value = 1.0);
    static WeightVector from(std::vector<double> weights);
};

struct BalanceParams {
    double beta = 0.0; // in [0, 1)
};

// Throws EmptyClass if some class has no samples.
ClassCounts class_counts(const Dataset& dataset);
ClassCounts class_counts(std::span<const std::size_t> labels, std::size_t num_classes);

// w_mu = N / N_k(mu). Each class then carries total weight N.
WeightVector inverse_frequency_weights(const ClassCounts& counts, std::span<const std::size_t> labels);

// w_mu = (1 - beta) / (1 - beta^alpha_mu) with alpha_mu = N_k(mu).
WeightVector class_balanced_weights(const ClassCounts& counts, std::span<const std::size_t> labels,
                                    BalanceParams params);

// Entry k is the total weight carried by class k.
std::vector<double> effective_class_sizes(std::span<const double> weights,
                                          std::span<const std::size_t> labels, std::size_t num_classes);

} // namespace wbn
