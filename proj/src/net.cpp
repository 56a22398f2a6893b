#include "wbn/net.hpp"

#include "wbn/error.hpp"
#include "wbn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wbn {

namespace {

std::string shape(const Matrix& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Mean and variance with per-row weights; `weights` empty means all ones.
BatchStats moments(const Matrix& lambda, std::span<const double> weights, double mass)
{
    const std::size_t n = lambda.rows();
    const std::size_t h = lambda.cols();
    const auto& k = kernels::active();

    BatchStats stats;
    stats.mass = mass;
    stats.mean.assign(h, 0.0);
    stats.variance.assign(h, 0.0);

    // Accumulate deviations from the first row: a constant column then gets
    // exactly its value as mean and exactly zero variance.
    const auto origin = lambda.row(0);
    std::vector<double> sq(h);
    for (std::size_t mu = 1; mu < n; ++mu) {
        const double w = weights.empty() ? 1.0 : weights[mu];
        const auto row = lambda.row(mu);
        for (std::size_t j = 0; j < h; ++j) {
            sq[j] = row[j] - origin[j];
        }
        k.axpy(w, sq.data(), stats.mean.data(), h);
    }
    for (std::size_t j = 0; j < h; ++j) {
        stats.mean[j] = origin[j] + stats.mean[j] / mass;
    }

    for (std::size_t mu = 0; mu < n; ++mu) {
        const double w = weights.empty() ? 1.0 : weights[mu];
        const auto row = lambda.row(mu);
        for (std::size_t j = 0; j < h; ++j) {
            const double d = row[j] - stats.mean[j];
            sq[j] = d * d;
        }
        k.axpy(w, sq.data(), stats.variance.data(), h);
    }
    for (double& v : stats.variance) {
        v /= mass - 1.0;
    }
    return stats;
}

Matrix normalize(const Matrix& lambda, std::span<const double> mean, std::span<const double> variance,
                 double epsilon)
{
    const std::size_t h = lambda.cols();
    if (mean.size() != h || variance.size() != h) {
        fail(ErrorCode::ShapeMismatch, "statistics of width " + std::to_string(mean.size()) +
                                           " for signal " + shape(lambda));
    }
    std::vector<double> inv_std(h);
    for (std::size_t j = 0; j < h; ++j) {
        inv_std[j] = 1.0 / std::sqrt(variance[j] + epsilon);
    }
    Matrix out(lambda.rows(), h);
    for (std::size_t mu = 0; mu < lambda.rows(); ++mu) {
        const auto src = lambda.row(mu);
        auto dst = out.row(mu);
        for (std::size_t j = 0; j < h; ++j) {
            dst[j] = (src[j] - mean[j]) * inv_std[j];
        }
    }
    return out;
}

Matrix scale_columns(const Matrix& m, std::span<const double> gamma)
{
    Matrix out(m.rows(), m.cols());
    for (std::size_t mu = 0; mu < m.rows(); ++mu) {
        const auto src = m.row(mu);
        auto dst = out.row(mu);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            dst[j] = gamma[j] * src[j];
        }
    }
    return out;
}

void check_weights(std::span<const double> weights, std::size_t rows)
{
    if (weights.size() != rows) {
        fail(ErrorCode::ShapeMismatch, std::to_string(weights.size()) + " weights for a batch of " +
                                           std::to_string(rows));
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            fail(ErrorCode::InvalidArgument, "sample weights must be finite and positive");
        }
    }
}

} // namespace

std::string to_string(BnMode mode)
{
    return mode == BnMode::Standard ? "standard" : "weighted";
}

Network::Network(std::span<const std::size_t> widths, BnMode mode, double epsilon)
{
    if (widths.size() < 2) {
        fail(ErrorCode::InvalidArgument, "a network needs an input and an output width");
    }
    if (!(epsilon > 0.0)) {
        fail(ErrorCode::InvalidArgument, "BN epsilon must be positive");
    }
    for (std::size_t w : widths) {
        if (w == 0) {
            fail(ErrorCode::InvalidArgument, "layer widths must be positive");
        }
    }
    for (std::size_t l = 1; l < widths.size(); ++l) {
        Layer layer;
        layer.dense.weights = Matrix(widths[l], widths[l - 1]);
        layer.dense.bias.assign(widths[l], 0.0);
        layer.bn.gamma.assign(widths[l], 1.0);
        layer.bn.epsilon = epsilon;
        layer.bn.mode = mode;
        layer.activation = (l + 1 == widths.size()) ? Activation::Softmax : Activation::Relu;
        layers_.push_back(std::move(layer));
    }
}

Network Network::with_mode(BnMode mode) const
{
    Network copy = *this;
    for (Layer& layer : copy.layers_) {
        layer.bn.mode = mode;
    }
    return copy;
}

std::size_t Network::input_width() const
{
    return layers_.empty() ? 0 : layers_.front().dense.weights.cols();
}

std::size_t Network::output_width() const
{
    return layers_.empty() ? 0 : layers_.back().dense.weights.rows();
}

BnMode Network::mode() const
{
    return layers_.empty() ? BnMode::Standard : layers_.front().bn.mode;
}

std::vector<ParameterBlock> Network::parameters()
{
    std::vector<ParameterBlock> out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        out.push_back({prefix + "W", layers_[l].dense.weights.values()});
        out.push_back({prefix + "b", layers_[l].dense.bias});
        out.push_back({prefix + "gamma", layers_[l].bn.gamma});
    }
    return out;
}

std::vector<ConstParameterBlock> Network::parameters() const
{
    std::vector<ConstParameterBlock> out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        out.push_back({prefix + "W", layers_[l].dense.weights.values()});
        out.push_back({prefix + "b", layers_[l].dense.bias});
        out.push_back({prefix + "gamma", layers_[l].bn.gamma});
    }
    return out;
}

std::size_t Network::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& block : parameters()) {
        n += block.values.size();
    }
    return n;
}

bool Network::inference_ready() const
{
    return !layers_.empty() && std::all_of(layers_.begin(), layers_.end(),
                                           [](const Layer& l) { return l.bn.stat_count > 0; });
}

std::vector<std::span<double>> Gradients::blocks()
{
    std::vector<std::span<double>> out;
    for (auto& layer : layers) {
        out.emplace_back(layer.weights.values());
        out.emplace_back(layer.bias);
        out.emplace_back(layer.gamma);
    }
    return out;
}

std::vector<std::span<const double>> Gradients::blocks() const
{
    std::vector<std::span<const double>> out;
    for (const auto& layer : layers) {
        out.emplace_back(layer.weights.values());
        out.emplace_back(layer.bias);
        out.emplace_back(layer.gamma);
    }
    return out;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& z_prev)
{
    if (z_prev.cols() != layer.weights.cols()) {
        fail(ErrorCode::ShapeMismatch, "dense layer " + shape(layer.weights) + " applied to batch " + shape(z_prev));
    }
    return matmul_nt(z_prev, layer.weights);
}

BatchStats bn_statistics_standard(const Matrix& lambda)
{
    if (lambda.rows() < 2) {
        fail(ErrorCode::BatchTooSmall, "batch of " + std::to_string(lambda.rows()) + " rows");
    }
    return moments(lambda, {}, static_cast<double>(lambda.rows()));
}

BatchStats bn_statistics_weighted(const Matrix& lambda, std::span<const double> weights)
{
    check_weights(weights, lambda.rows());
    const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(mass > 1.0)) {
        fail(ErrorCode::DegenerateWeightMass, "batch weight mass " + std::to_string(mass) + " <= 1");
    }
    return moments(lambda, weights, mass);
}

Matrix bn_transform(const Matrix& lambda, std::span<const double> mean, std::span<const double> variance,
                    std::span<const double> gamma, double epsilon)
{
    if (gamma.size() != lambda.cols()) {
        fail(ErrorCode::ShapeMismatch, "gamma width " + std::to_string(gamma.size()) + " for signal " + shape(lambda));
    }
    return scale_columns(normalize(lambda, mean, variance, epsilon), gamma);
}

Matrix activation_forward(const Matrix& u_hat, std::span<const double> bias, Activation kind)
{
    const std::size_t h = u_hat.cols();
    if (bias.size() != h) {
        fail(ErrorCode::ShapeMismatch, "bias width " + std::to_string(bias.size()) + " for signal " + shape(u_hat));
    }
    Matrix out(u_hat.rows(), h);
    for (std::size_t mu = 0; mu < u_hat.rows(); ++mu) {
        const auto src = u_hat.row(mu);
        auto dst = out.row(mu);
        if (kind == Activation::Relu) {
            for (std::size_t j = 0; j < h; ++j) {
                dst[j] = std::max(0.0, bias[j] + src[j]);
            }
            continue;
        }
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < h; ++j) {
            dst[j] = bias[j] + src[j];
            top = std::max(top, dst[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < h; ++j) {
            dst[j] = std::exp(dst[j] - top);
            sum += dst[j];
        }
        for (std::size_t j = 0; j < h; ++j) {
            dst[j] /= sum;
        }
    }
    return out;
}

double weighted_cross_entropy(const Matrix& probs, const Matrix& targets, std::span<const double> weights,
                              double mass)
{
    if (probs.rows() != targets.rows() || probs.cols() != targets.cols()) {
        fail(ErrorCode::ShapeMismatch, "probs " + shape(probs) + " vs targets " + shape(targets));
    }
    if (weights.size() != probs.rows()) {
        fail(ErrorCode::ShapeMismatch, "weights length " + std::to_string(weights.size()));
    }
    double total = 0.0;
    for (std::size_t mu = 0; mu < probs.rows(); ++mu) {
        double f = 0.0;
        for (std::size_t k = 0; k < probs.cols(); ++k) {
            if (targets(mu, k) != 0.0) {
                f -= targets(mu, k) * std::log(std::max(probs(mu, k), kLogFloor));
            }
        }
        total += weights[mu] * f;
    }
    return total / mass;
}

Matrix network_forward_train(const Network& net, const Matrix& inputs, std::span<const double> weights,
                             ForwardCache* cache)
{
    if (inputs.rows() < 2) {
        fail(ErrorCode::BatchTooSmall, "training batch of " + std::to_string(inputs.rows()) + " rows");
    }
    const bool any_weighted = std::any_of(net.layers().begin(), net.layers().end(),
                                          [](const Layer& l) { return l.bn.mode == BnMode::Weighted; });
    if (any_weighted || !weights.empty()) {
        check_weights(weights, inputs.rows());
    }
    if (cache != nullptr) {
        cache->layers.clear();
        cache->stat_weights.assign(weights.begin(), weights.end());
    }

    Matrix z = inputs;
    for (const Layer& layer : net.layers()) {
        Matrix lambda = dense_forward(layer.dense, z);
        BatchStats stats = layer.bn.mode == BnMode::Weighted ? bn_statistics_weighted(lambda, weights)
                                                             : bn_statistics_standard(lambda);
        Matrix normalized = normalize(lambda, stats.mean, stats.variance, layer.bn.epsilon);
        Matrix out = activation_forward(scale_columns(normalized, layer.bn.gamma), layer.dense.bias,
                                        layer.activation);
        if (cache != nullptr) {
            cache->layers.push_back({std::move(z), std::move(lambda), std::move(stats), std::move(normalized), out});
        }
        z = std::move(out);
    }
    return z;
}

Gradients network_backward(const Network& net, const ForwardCache& cache, const Matrix& targets,
                           std::span<const double> loss_weights)
{
    const auto& layers = net.layers();
    if (cache.layers.size() != layers.size() || layers.empty()) {
        fail(ErrorCode::CacheMismatch, "cache holds " + std::to_string(cache.layers.size()) + " layers, network has " +
                                           std::to_string(layers.size()));
    }
    const std::size_t n = cache.layers.front().input.rows();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerCache& lc = cache.layers[l];
        if (lc.lambda.rows() != n || lc.lambda.cols() != layers[l].dense.weights.rows() ||
            lc.input.cols() != layers[l].dense.weights.cols()) {
            fail(ErrorCode::CacheMismatch, "layer " + std::to_string(l) + " cache shapes do not match the network");
        }
        if (layers[l].bn.mode == BnMode::Weighted && cache.stat_weights.size() != n) {
            fail(ErrorCode::CacheMismatch, "weighted layer without cached weights");
        }
    }
    if (targets.rows() != n || targets.cols() != net.output_width()) {
        fail(ErrorCode::ShapeMismatch, "targets " + shape(targets) + " for a batch of " + std::to_string(n));
    }
    if (!loss_weights.empty() && loss_weights.size() != n) {
        fail(ErrorCode::ShapeMismatch, std::to_string(loss_weights.size()) + " loss weights for a batch of " +
                                           std::to_string(n));
    }

    const double loss_mass = loss_weights.empty()
                                 ? static_cast<double>(n)
                                 : std::accumulate(loss_weights.begin(), loss_weights.end(), 0.0);

    // Error signal w.r.t. the softmax argument b + u_hat.
    const Matrix& probs = cache.layers.back().output;
    Matrix delta(n, net.output_width());
    for (std::size_t mu = 0; mu < n; ++mu) {
        const double scale = (loss_weights.empty() ? 1.0 : loss_weights[mu]) / loss_mass;
        for (std::size_t k = 0; k < delta.cols(); ++k) {
            delta(mu, k) = scale * (probs(mu, k) - targets(mu, k));
        }
    }

    Gradients grads;
    grads.layers.resize(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const Layer& layer = layers[l];
        const LayerCache& lc = cache.layers[l];
        const std::size_t h = layer.dense.weights.rows();
        LayerGradients& g = grads.layers[l];

        if (layer.activation == Activation::Relu) {
            for (std::size_t mu = 0; mu < n; ++mu) {
                for (std::size_t j = 0; j < h; ++j) {
                    if (!(lc.output(mu, j) > 0.0)) {
                        delta(mu, j) = 0.0;
                    }
                }
            }
        }

        // delta is now dL/du_hat (= dL/db summed over the batch).
        g.bias.assign(h, 0.0);
        g.gamma.assign(h, 0.0);
        std::vector<double> sum_gx(h, 0.0);
        std::vector<double> sum_gx_xhat(h, 0.0);
        for (std::size_t mu = 0; mu < n; ++mu) {
            for (std::size_t j = 0; j < h; ++j) {
                const double d = delta(mu, j);
                g.bias[j] += d;
                g.gamma[j] += d * lc.normalized(mu, j);
                const double gx = layer.bn.gamma[j] * d;
                delta(mu, j) = gx;
                sum_gx[j] += gx;
                sum_gx_xhat[j] += gx * lc.normalized(mu, j);
            }
        }

        // Through the normalisation, with mean and variance as functions of
        // every lambda in the batch:
        //   dlambda = (gx - (w/Z) sum(gx) - w xhat sum(gx xhat) / (Z - 1)) / sqrt(v + eps)
        const bool weighted = layer.bn.mode == BnMode::Weighted;
        const double mass = lc.stats.mass;
        for (std::size_t j = 0; j < h; ++j) {
            sum_gx[j] /= mass;
            sum_gx_xhat[j] /= mass - 1.0;
        }
        std::vector<double> inv_std(h);
        for (std::size_t j = 0; j < h; ++j) {
            inv_std[j] = 1.0 / std::sqrt(lc.stats.variance[j] + layer.bn.epsilon);
        }
        for (std::size_t mu = 0; mu < n; ++mu) {
            const double w = weighted ? cache.stat_weights[mu] : 1.0;
            for (std::size_t j = 0; j < h; ++j) {
                delta(mu, j) = (delta(mu, j) - w * sum_gx[j] - w * lc.normalized(mu, j) * sum_gx_xhat[j]) *
                               inv_std[j];
            }
        }

        g.weights = Matrix(h, layer.dense.weights.cols());
        matmul_tn_accumulate(delta, lc.input, g.weights);
        if (l > 0) {
            delta = matmul_nn(delta, layer.dense.weights);
        }
    }
    return grads;
}

Matrix network_forward_infer(const Network& net, const Matrix& inputs)
{
    if (!net.inference_ready()) {
        fail(ErrorCode::StatsUnpopulated, "inference statistics have not been accumulated");
    }
    Matrix z = inputs;
    for (const Layer& layer : net.layers()) {
        const Matrix lambda = dense_forward(layer.dense, z);
        const Matrix u_hat = bn_transform(lambda, layer.bn.inference_mean, layer.bn.inference_var, layer.bn.gamma,
                                          layer.bn.epsilon);
        z = activation_forward(u_hat, layer.dense.bias, layer.activation);
    }
    return z;
}

void accumulate_inference_stats(BatchNormLayer& layer, std::span<const BatchStats> per_batch)
{
    if (per_batch.empty()) {
        fail(ErrorCode::NoStats, "no batch statistics to average");
    }
    const std::size_t h = layer.gamma.size();
    std::vector<double> mean(h, 0.0);
    std::vector<double> var(h, 0.0);
    for (const BatchStats& s : per_batch) {
        if (s.mean.size() != h || s.variance.size() != h) {
            fail(ErrorCode::ShapeMismatch, "batch statistics width does not match the layer");
        }
        for (std::size_t j = 0; j < h; ++j) {
            mean[j] += s.mean[j];
            var[j] += s.variance[j];
        }
    }
    const double r = static_cast<double>(per_batch.size());
    for (std::size_t j = 0; j < h; ++j) {
        mean[j] /= r;
        var[j] /= r;
    }
    layer.inference_mean = std::move(mean);
    layer.inference_var = std::move(var);
    layer.stat_count = per_batch.size();
}

} // namespace wbn
