#pragma once

#include "wbn/net.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wbn {

inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kGradCheckTolerance = 1e-4;

using LossFunction = std::function<double(std::span<const double>)>;

// Central differences (L(p + h e_i) - L(p - h e_i)) / 2h for every coordinate.
// Throws NonDeterministicLoss if two evaluations at `params` disagree.
std::vector<double> finite_difference_gradient(const LossFunction& loss, std::span<const double> params,
                                               double step = kGradCheckStep);

// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double a, double b);

struct BlockError {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
};

struct GradCheckReport {
    std::vector<BlockError> blocks;
    double max_rel_error = 0.0;
    std::string worst_block;
    std::size_t worst_index = 0;
    double tolerance = kGradCheckTolerance;
    bool pass = false;
};

struct GradCheckOptions {
    double step = kGradCheckStep;
    double tolerance = kGradCheckTolerance;
    // Applied to the analytic gradient before comparison (fault injection).
    std::function<void(Gradients&)> tamper;
};

// Per-batch loss of `net` on (inputs, targets) with sample weights `weights`
// (empty = all ones), normalised by their sum.
double batch_loss(const Network& net, const Matrix& inputs, const Matrix& targets, std::span<const double> weights);

GradCheckReport check_gradients(const Network& net, const Matrix& inputs, const Matrix& targets,
                                std::span<const double> weights, const GradCheckOptions& options = {});

// True if some ReLU argument b + u_hat lies within `margin` of zero.
bool near_relu_kink(const Network& net, const Matrix& inputs, std::span<const double> weights, double margin);

struct GradCheckInstance {
    Network net;
    Matrix inputs;
    Matrix targets;
    std::vector<double> weights;
};

struct InstanceShape {
    std::vector<std::size_t> widths{6, 5, 2};
    std::size_t batch = 4;
    // Weights drawn from {1, heavy} instead of Uniform(0.5, 2).
    bool skewed = false;
    double heavy = 5968.0 / 45.0;
};

// Random parameters and batch; inputs are redrawn until every ReLU argument
// sits at least 10 * step away from its kink and every hidden unit is off for
// at least one sample (otherwise its bias gradient is identically zero).
GradCheckInstance random_instance(std::uint64_t seed, BnMode mode, const InstanceShape& shape = {},
                                  double step = kGradCheckStep);

} // namespace wbn
