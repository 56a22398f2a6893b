#pragma once

#include "wbn/matrix.hpp"
#include "wbn/net.hpp"
#include "wbn/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wbn {

// Uniform(-a, a) entries with a = sqrt(6 / (fan_in + fan_out)); fan_out x fan_in.
Matrix xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Xavier weights for every dense layer; biases reset to 0 and gamma to 1.
void xavier_initialize(Network& net, Rng& rng);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::uint64_t step_count = 0;
};

// One bias-corrected Adam update over every parameter block. Moments are
// allocated on the first call; block shapes must not change afterwards.
void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state);

void adam_step(Network& net, const Gradients& grads, AdamState& state);

} // namespace wbn
