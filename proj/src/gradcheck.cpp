#include "wbn/gradcheck.hpp"

#include "wbn/error.hpp"
#include "wbn/optim.hpp"
#include "wbn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wbn {

namespace {

std::vector<double> flatten(const Network& net)
{
    std::vector<double> flat;
    flat.reserve(net.parameter_count());
    for (const auto& block : net.parameters()) {
        flat.insert(flat.end(), block.values.begin(), block.values.end());
    }
    return flat;
}

void unflatten(std::span<const double> flat, Network& net)
{
    std::size_t offset = 0;
    for (auto& block : net.parameters()) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), block.values.size(), block.values.begin());
        offset += block.values.size();
    }
}

} // namespace

std::vector<double> finite_difference_gradient(const LossFunction& loss, std::span<const double> params,
                                               double step)
{
    if (!(step > 0.0)) {
        fail(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    }
    std::vector<double> point(params.begin(), params.end());
    if (loss(point) != loss(point)) {
        fail(ErrorCode::NonDeterministicLoss, "loss differs between two evaluations at the same point");
    }
    std::vector<double> grad(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + step;
        const double up = loss(point);
        point[i] = saved - step;
        const double down = loss(point);
        point[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double relative_error(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

double batch_loss(const Network& net, const Matrix& inputs, const Matrix& targets, std::span<const double> weights)
{
    const Matrix probs = network_forward_train(net, inputs, weights);
    if (weights.empty()) {
        const std::vector<double> ones(inputs.rows(), 1.0);
        return weighted_cross_entropy(probs, targets, ones, static_cast<double>(inputs.rows()));
    }
    return weighted_cross_entropy(probs, targets, weights, std::accumulate(weights.begin(), weights.end(), 0.0));
}

GradCheckReport check_gradients(const Network& net, const Matrix& inputs, const Matrix& targets,
                                std::span<const double> weights, const GradCheckOptions& options)
{
    ForwardCache cache;
    network_forward_train(net, inputs, weights, &cache);
    Gradients analytic = network_backward(net, cache, targets, weights);
    if (options.tamper) {
        options.tamper(analytic);
    }

    Network scratch = net;
    const LossFunction loss = [&](std::span<const double> flat) {
        unflatten(flat, scratch);
        return batch_loss(scratch, inputs, targets, weights);
    };
    const std::vector<double> numeric = finite_difference_gradient(loss, flatten(net), options.step);

    GradCheckReport report;
    report.tolerance = options.tolerance;
    const auto names = net.parameters();
    const auto blocks = std::as_const(analytic).blocks();
    std::size_t offset = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        BlockError err{names[b].name, 0.0, 0};
        for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            const double e = relative_error(blocks[b][i], numeric[offset + i]);
            if (e > err.max_rel_error || std::isnan(e)) {
                err.max_rel_error = e;
                err.worst_index = i;
            }
        }
        offset += blocks[b].size();
        if (report.blocks.empty() || err.max_rel_error > report.max_rel_error || std::isnan(err.max_rel_error)) {
            report.max_rel_error = err.max_rel_error;
            report.worst_block = err.name;
            report.worst_index = err.worst_index;
        }
        report.blocks.push_back(std::move(err));
    }
    report.pass = report.max_rel_error < options.tolerance;
    return report;
}

bool near_relu_kink(const Network& net, const Matrix& inputs, std::span<const double> weights, double margin)
{
    ForwardCache cache;
    network_forward_train(net, inputs, weights, &cache);
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        const Layer& layer = net.layers()[l];
        if (layer.activation != Activation::Relu) {
            continue;
        }
        const LayerCache& lc = cache.layers[l];
        for (std::size_t mu = 0; mu < lc.normalized.rows(); ++mu) {
            for (std::size_t j = 0; j < lc.normalized.cols(); ++j) {
                const double arg = layer.dense.bias[j] + layer.bn.gamma[j] * lc.normalized(mu, j);
                if (std::abs(arg) < margin) {
                    return true;
                }
            }
        }
    }
    return false;
}

namespace {

// True if some hidden ReLU unit is active on every sample. The next layer's
// BN then absorbs that unit's bias completely, so its exact gradient is zero
// and the finite difference sees only roundoff.
bool has_always_active_unit(const Network& net, const Matrix& inputs, std::span<const double> weights)
{
    ForwardCache cache;
    network_forward_train(net, inputs, weights, &cache);
    for (std::size_t l = 0; l + 1 < net.layers().size(); ++l) {
        const Matrix& z = cache.layers[l].output;
        for (std::size_t j = 0; j < z.cols(); ++j) {
            bool all_active = true;
            for (std::size_t mu = 0; mu < z.rows() && all_active; ++mu) {
                all_active = z(mu, j) > 0.0;
            }
            if (all_active) {
                return true;
            }
        }
    }
    return false;
}

} // namespace

GradCheckInstance random_instance(std::uint64_t seed, BnMode mode, const InstanceShape& shape, double step)
{
    Rng rng(seed);
    GradCheckInstance inst;
    inst.net = Network(shape.widths, mode);
    xavier_initialize(inst.net, rng);
    for (Layer& layer : inst.net.layers()) {
        for (double& b : layer.dense.bias) {
            b = rng.uniform(-0.5, 0.5);
        }
        for (double& g : layer.bn.gamma) {
            g = rng.uniform(0.5, 1.5);
        }
    }

    const std::size_t n = shape.batch;
    const std::size_t k = shape.widths.back();
    inst.weights.resize(n);
    for (double& w : inst.weights) {
        w = shape.skewed ? (rng.below(2) == 0 ? 1.0 : shape.heavy) : rng.uniform(0.5, 2.0);
    }
    if (shape.skewed && n >= 2) {
        // Make sure both weight levels are present.
        inst.weights[0] = 1.0;
        inst.weights[1] = shape.heavy;
    }
    std::vector<std::size_t> labels(n);
    for (std::size_t mu = 0; mu < n; ++mu) {
        labels[mu] = rng.below(k);
    }
    inst.targets = Matrix(n, k);
    for (std::size_t mu = 0; mu < n; ++mu) {
        inst.targets(mu, labels[mu]) = 1.0;
    }

    inst.inputs = Matrix(n, shape.widths.front());
    for (int attempt = 0;; ++attempt) {
        for (double& x : inst.inputs.values()) {
            x = rng.normal();
        }
        if (!near_relu_kink(inst.net, inst.inputs, inst.weights, 10.0 * step) &&
            !has_always_active_unit(inst.net, inst.inputs, inst.weights)) {
            break;
        }
        if (attempt > 10000) {
            fail(ErrorCode::InvalidArgument, "could not draw a usable batch for this network");
        }
    }
    return inst;
}

} // namespace wbn
