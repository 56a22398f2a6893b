#pragma once

#include "wbn/dataset.hpp"
#include "wbn/net.hpp"
#include "wbn/optim.hpp"
#include "wbn/weighting.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wbn {

// (a) unweighted loss + standard BN, (b) weighted loss + standard BN,
// (c) weighted loss + weighted BN.
enum class Method { LfSbn, WlfSbn, WlfPbn };

std::string_view method_name(Method method);  // "lf_sbn", ...
std::string_view method_label(Method method); // "LF+sBN", ...
std::string_view method_letter(Method method); // "a", "b", "c"
// Accepts a/b/c, lf_sbn/wlf_sbn/wlf_pbn or the labels; throws InvalidConfig.
Method parse_method(std::string_view text);

struct TrainConfig {
    Method method = Method::WlfPbn;
    std::size_t batch_size = 100;
    std::size_t epochs = 20;
    std::uint64_t seed = 0;
    std::size_t hidden_width = 200;
    AdamConfig adam;
    double bn_epsilon = kDefaultBnEpsilon;
    // When set, class-balanced weights with this beta replace inverse class
    // frequency weights for the weighted-loss methods.
    std::optional<double> beta;
};

struct TrainedModel {
    Network network;
    std::vector<double> epoch_loss; // mean per-batch loss of each epoch
    std::vector<double> batch_loss; // every per-batch loss, in update order
    BatchPartition final_partition;
};

struct MetricsReport {
    std::vector<double> per_class_accuracy;
    double overall_accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion; // [true][predicted]
    std::vector<int> class_names;
};

void validate(const TrainConfig& config);

// Ones for the unweighted method, otherwise inverse-frequency (or
// class-balanced) weights over the whole training set.
WeightVector training_weights(const TrainConfig& config, const Dataset& data);

Network initial_network(const TrainConfig& config, std::size_t input_width, std::size_t num_classes);

BatchPartition epoch_partition(const TrainConfig& config, std::size_t n, std::size_t epoch);

// Frozen-parameter pass over `partition` that averages batch statistics
// into every BN layer.
void populate_inference_stats(Network& net, const Dataset& data, const BatchPartition& partition,
                              const WeightVector& weights);

TrainedModel train(const TrainConfig& config, const Dataset& data);

// argmax per row, ties to the lowest class index.
std::vector<std::size_t> predict(const Network& net, const Matrix& inputs);

MetricsReport metrics_from_predictions(std::span<const std::size_t> labels,
                                       std::span<const std::size_t> predictions, std::vector<int> class_names);

MetricsReport evaluate(const Network& net, const Dataset& data);

} // namespace wbn
