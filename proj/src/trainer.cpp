#include "wbn/trainer.hpp"

#include "wbn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wbn {

namespace {

constexpr std::uint64_t kInitStream = 100;
constexpr std::uint64_t kEpochStreamBase = 1000;
constexpr std::size_t kInferenceChunk = 512;

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> indices)
{
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) {
        out.push_back(values[idx]);
    }
    return out;
}

BnMode bn_mode_for(Method method)
{
    return method == Method::WlfPbn ? BnMode::Weighted : BnMode::Standard;
}

} // namespace

std::string_view method_name(Method method)
{
    switch (method) {
    case Method::LfSbn: return "lf_sbn";
    case Method::WlfSbn: return "wlf_sbn";
    case Method::WlfPbn: return "wlf_pbn";
    }
    return "?";
}

std::string_view method_label(Method method)
{
    switch (method) {
    case Method::LfSbn: return "LF+sBN";
    case Method::WlfSbn: return "WLF+sBN";
    case Method::WlfPbn: return "WLF+pBN";
    }
    return "?";
}

std::string_view method_letter(Method method)
{
    switch (method) {
    case Method::LfSbn: return "a";
    case Method::WlfSbn: return "b";
    case Method::WlfPbn: return "c";
    }
    return "?";
}

Method parse_method(std::string_view text)
{
    for (Method m : {Method::LfSbn, Method::WlfSbn, Method::WlfPbn}) {
        if (text == method_name(m) || text == method_label(m) || text == method_letter(m)) {
            return m;
        }
    }
    fail(ErrorCode::InvalidConfig, "unknown method '" + std::string(text) + "'");
}

void validate(const TrainConfig& config)
{
    if (config.batch_size < 2) {
        fail(ErrorCode::BatchTooSmall, "batch_size must be at least 2");
    }
    if (config.epochs < 1) {
        fail(ErrorCode::InvalidConfig, "epochs must be at least 1");
    }
    if (config.hidden_width < 1) {
        fail(ErrorCode::InvalidConfig, "hidden_width must be positive");
    }
    if (!(config.bn_epsilon > 0.0)) {
        fail(ErrorCode::InvalidConfig, "bn_epsilon must be positive");
    }
    const AdamConfig& a = config.adam;
    if (!(a.learning_rate > 0.0) || !(a.beta1 >= 0.0 && a.beta1 < 1.0) || !(a.beta2 >= 0.0 && a.beta2 < 1.0) ||
        !(a.epsilon > 0.0)) {
        fail(ErrorCode::InvalidConfig, "invalid Adam hyperparameters");
    }
    if (config.beta && !(*config.beta >= 0.0 && *config.beta < 1.0)) {
        fail(ErrorCode::InvalidConfig, "beta must lie in [0, 1)");
    }
}

WeightVector training_weights(const TrainConfig& config, const Dataset& data)
{
    const ClassCounts counts = class_counts(data);
    if (config.method == Method::LfSbn) {
        return WeightVector::uniform(data.size());
    }
    if (config.beta) {
        return class_balanced_weights(counts, data.labels, BalanceParams{*config.beta});
    }
    return inverse_frequency_weights(counts, data.labels);
}

Network initial_network(const TrainConfig& config, std::size_t input_width, std::size_t num_classes)
{
    const std::size_t widths[] = {input_width, config.hidden_width, num_classes};
    Network net(widths, bn_mode_for(config.method), config.bn_epsilon);
    Rng rng(derive_seed(config.seed, kInitStream));
    xavier_initialize(net, rng);
    return net;
}

BatchPartition epoch_partition(const TrainConfig& config, std::size_t n, std::size_t epoch)
{
    Rng rng(derive_seed(config.seed, kEpochStreamBase + epoch));
    return partition_batches(n, config.batch_size, rng);
}

void populate_inference_stats(Network& net, const Dataset& data, const BatchPartition& partition,
                              const WeightVector& weights)
{
    const std::size_t depth = net.layers().size();
    std::vector<std::vector<BatchStats>> per_layer(depth);
    ForwardCache cache;
    for (const auto& batch : partition.batches) {
        const Matrix inputs = data.inputs.gather_rows(batch);
        const auto w = gather(weights.weights, batch);
        network_forward_train(net, inputs, w, &cache);
        for (std::size_t l = 0; l < depth; ++l) {
            per_layer[l].push_back(std::move(cache.layers[l].stats));
        }
    }
    for (std::size_t l = 0; l < depth; ++l) {
        accumulate_inference_stats(net.layers()[l].bn, per_layer[l]);
    }
}

TrainedModel train(const TrainConfig& config, const Dataset& data)
{
    validate(config);
    const WeightVector weights = training_weights(config, data);

    TrainedModel model;
    model.network = initial_network(config, data.inputs.cols(), data.num_classes());
    AdamState adam{config.adam, {}, {}, 0};
    ForwardCache cache;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        BatchPartition partition = epoch_partition(config, data.size(), epoch);
        double epoch_total = 0.0;
        for (const auto& batch : partition.batches) {
            const Matrix inputs = data.inputs.gather_rows(batch);
            const Matrix targets = data.targets.gather_rows(batch);
            const auto w = gather(weights.weights, batch);
            const double mass = std::accumulate(w.begin(), w.end(), 0.0);

            const Matrix probs = network_forward_train(model.network, inputs, w, &cache);
            const double loss = weighted_cross_entropy(probs, targets, w, mass);
            const Gradients grads = network_backward(model.network, cache, targets, w);
            adam_step(model.network, grads, adam);

            model.batch_loss.push_back(loss);
            epoch_total += loss;
        }
        model.epoch_loss.push_back(epoch_total / static_cast<double>(partition.count()));
        if (epoch + 1 == config.epochs) {
            model.final_partition = std::move(partition);
        }
    }

    populate_inference_stats(model.network, data, model.final_partition, weights);
    return model;
}

std::vector<std::size_t> predict(const Network& net, const Matrix& inputs)
{
    std::vector<std::size_t> out;
    out.reserve(inputs.rows());
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < inputs.rows(); start += kInferenceChunk) {
        const std::size_t end = std::min(inputs.rows(), start + kInferenceChunk);
        rows.resize(end - start);
        std::iota(rows.begin(), rows.end(), start);
        const Matrix probs = network_forward_infer(net, inputs.gather_rows(rows));
        for (std::size_t r = 0; r < probs.rows(); ++r) {
            const auto row = probs.row(r);
            out.push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
        }
    }
    return out;
}

MetricsReport metrics_from_predictions(std::span<const std::size_t> labels,
                                       std::span<const std::size_t> predictions, std::vector<int> class_names)
{
    if (labels.size() != predictions.size()) {
        fail(ErrorCode::ShapeMismatch, "labels and predictions differ in length");
    }
    const std::size_t k = class_names.size();
    MetricsReport report;
    report.class_names = std::move(class_names);
    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= k || predictions[i] >= k) {
            fail(ErrorCode::IndexOutOfRange, "class index out of range in metrics");
        }
        ++report.confusion[labels[i]][predictions[i]];
    }
    std::size_t correct = 0;
    std::size_t total = 0;
    report.per_class_accuracy.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t row_total =
            std::accumulate(report.confusion[c].begin(), report.confusion[c].end(), std::size_t{0});
        if (row_total > 0) {
            report.per_class_accuracy[c] =
                static_cast<double>(report.confusion[c][c]) / static_cast<double>(row_total);
        }
        correct += report.confusion[c][c];
        total += row_total;
    }
    report.overall_accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    return report;
}

MetricsReport evaluate(const Network& net, const Dataset& data)
{
    const auto predictions = predict(net, data.inputs);
    return metrics_from_predictions(data.labels, predictions, data.class_names);
}

} // namespace wbn
