#pragma once

#include "oracle.hpp"

#include "wbn/net.hpp"
#include "wbn/optim.hpp"
#include "wbn/rng.hpp"

#include <vector>

namespace support {

inline wbn::Matrix random_matrix(std::size_t rows, std::size_t cols, wbn::Rng& rng, double lo = -1.0, double hi = 1.0)
{
    wbn::Matrix m(rows, cols);
    for (double& x : m.values()) {
        x = rng.uniform(lo, hi);
    }
    return m;
}

// Network with Xavier weights and randomised bias/gamma so that no
// parameter sits at a special value.
inline wbn::Network random_network(const std::vector<std::size_t>& widths, wbn::BnMode mode, wbn::Rng& rng)
{
    wbn::Network net(widths, mode);
    wbn::xavier_initialize(net, rng);
    for (auto& layer : net.layers()) {
        for (double& b : layer.dense.bias) {
            b = rng.uniform(-0.3, 0.3);
        }
        for (double& g : layer.bn.gamma) {
            g = rng.uniform(0.5, 1.5);
        }
    }
    return net;
}

inline wbn::Matrix one_hot_targets(const std::vector<std::size_t>& labels, std::size_t k)
{
    wbn::Matrix t(labels.size(), k);
    for (std::size_t mu = 0; mu < labels.size(); ++mu) {
        t(mu, labels[mu]) = 1.0;
    }
    return t;
}

inline oracle::Mat to_rows(const wbn::Matrix& m)
{
    oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[r][c] = m(r, c);
        }
    }
    return out;
}

inline std::vector<oracle::Layer> to_oracle(const wbn::Network& net)
{
    std::vector<oracle::Layer> out;
    for (const auto& layer : net.layers()) {
        out.push_back({to_rows(layer.dense.weights), layer.dense.bias, layer.bn.gamma,
                       layer.activation == wbn::Activation::Softmax});
    }
    return out;
}

// Library gradients flattened in the oracle's W, b, gamma order.
inline oracle::Vec flatten(const wbn::Gradients& g)
{
    oracle::Vec out;
    for (const auto& l : g.layers) {
        out.insert(out.end(), l.weights.values().begin(), l.weights.values().end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
        out.insert(out.end(), l.gamma.begin(), l.gamma.end());
    }
    return out;
}

inline oracle::Vec flatten(const wbn::Network& net)
{
    oracle::Vec out;
    for (const auto& block : net.parameters()) {
        out.insert(out.end(), block.values.begin(), block.values.end());
    }
    return out;
}

} // namespace support
