#include "wbn/optim.hpp"

#include "wbn/error.hpp"

#include <cmath>
#include <string>

namespace wbn {

Matrix xavier_init(std::size_t fan_in, std::size_t fan_out, Rng& rng)
{
    if (fan_in == 0 || fan_out == 0) {
        fail(ErrorCode::InvalidArgument, "fan_in and fan_out must be positive");
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& x : w.values()) {
        // uniform() is in [0, 1); redraw the single point that would land on -bound.
        double u = rng.uniform();
        while (u == 0.0) {
            u = rng.uniform();
        }
        x = bound * (2.0 * u - 1.0);
    }
    return w;
}

void xavier_initialize(Network& net, Rng& rng)
{
    for (Layer& layer : net.layers()) {
        const Matrix& w = layer.dense.weights;
        layer.dense.weights = xavier_init(w.cols(), w.rows(), rng);
        std::fill(layer.dense.bias.begin(), layer.dense.bias.end(), 0.0);
        std::fill(layer.bn.gamma.begin(), layer.bn.gamma.end(), 1.0);
    }
}

void adam_step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
               AdamState& state)
{
    if (params.size() != grads.size()) {
        fail(ErrorCode::ShapeMismatch, std::to_string(params.size()) + " parameter blocks, " +
                                           std::to_string(grads.size()) + " gradient blocks");
    }
    if (state.first_moment.empty() && state.step_count == 0) {
        for (const auto& block : params) {
            state.first_moment.emplace_back(block.size(), 0.0);
            state.second_moment.emplace_back(block.size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) {
        fail(ErrorCode::ShapeMismatch, "optimizer state was built for a different parameter set");
    }
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size() || state.first_moment[b].size() != params[b].size()) {
            fail(ErrorCode::ShapeMismatch, "block " + std::to_string(b) + " size mismatch");
        }
    }

    const AdamConfig& c = state.config;
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);

    for (std::size_t b = 0; b < params.size(); ++b) {
        auto& m = state.first_moment[b];
        auto& v = state.second_moment[b];
        const auto g = grads[b];
        auto p = params[b];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

void adam_step(Network& net, const Gradients& grads, AdamState& state)
{
    std::vector<std::span<double>> params;
    for (const auto& block : net.parameters()) {
        params.push_back(block.values);
    }
    const auto grad_blocks = grads.blocks();
    adam_step(params, grad_blocks, state);
}

} // namespace wbn
