#pragma once

#include "wbn/matrix.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wbn {

inline constexpr double kDefaultBnEpsilon = 1e-8;
inline constexpr double kLogFloor = 1e-12;

// Standard: plain batch mean and unbiased variance.
// Weighted: loss-weighted mean and variance normalised by the batch weight
// mass Z_r, so each sample counts as w_mu samples.
enum class BnMode { Standard, Weighted };

enum class Activation { Relu, Softmax };

std::string to_string(BnMode mode);

// Bias-free affine map; the bias enters inside the activation argument.
struct DenseLayer {
    Matrix weights;           // h_out x h_in
    std::vector<double> bias; // h_out
};

struct BatchStats {
    std::vector<double> mean;
    std::vector<double> variance;
    double mass = 0.0; // |B_r| in standard mode, Z_r in weighted mode
};

struct BatchNormLayer {
    std::vector<double> gamma;
    double epsilon = kDefaultBnEpsilon;
    BnMode mode = BnMode::Standard;
    // Averages of per-batch statistics, used at inference.
    std::vector<double> inference_mean;
    std::vector<double> inference_var;
    std::size_t stat_count = 0;
};

struct Layer {
    DenseLayer dense;
    BatchNormLayer bn;
    Activation activation = Activation::Relu;
};

struct ParameterBlock {
    std::string name;
    std::span<double> values;
};

struct ConstParameterBlock {
    std::string name;
    std::span<const double> values;
};

// Stack of dense -> BN -> activation layers. Hidden layers use ReLU, the
// output layer softmax. Weights start at zero, biases at 0, gamma at 1; see
// xavier_initialize for the training initialisation.
class Network {
public:
    Network() = default;
    Network(std::span<const std::size_t> widths, BnMode mode, double epsilon = kDefaultBnEpsilon);

    // Same parameters and inference statistics, different BN mode.
    Network with_mode(BnMode mode) const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::size_t input_width() const;
    std::size_t output_width() const;
    BnMode mode() const;

    // W, b, gamma per layer, in that order.
    std::vector<ParameterBlock> parameters();
    std::vector<ConstParameterBlock> parameters() const;
    std::size_t parameter_count() const;

    bool inference_ready() const;

private:
    std::vector<Layer> layers_;
};

struct LayerGradients {
    Matrix weights;
    std::vector<double> bias;
    std::vector<double> gamma;
};

struct Gradients {
    std::vector<LayerGradients> layers;

    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;
};

struct LayerCache {
    Matrix input;      // z of the previous layer
    Matrix lambda;     // bias-free affine signal
    BatchStats stats;
    Matrix normalized; // (lambda - mean) / sqrt(var + eps), before gamma
    Matrix output;     // activation output
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    std::vector<double> stat_weights; // weights used by weighted BN layers
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& z_prev);

// Throws BatchTooSmall for fewer than two rows.
BatchStats bn_statistics_standard(const Matrix& lambda);

// Throws DegenerateWeightMass when Z_r <= 1, InvalidArgument for w <= 0.
BatchStats bn_statistics_weighted(const Matrix& lambda, std::span<const double> weights);

Matrix bn_transform(const Matrix& lambda, std::span<const double> mean, std::span<const double> variance,
                    std::span<const double> gamma, double epsilon);

Matrix activation_forward(const Matrix& u_hat, std::span<const double> bias, Activation kind);

// (1 / mass) * sum_mu w_mu * (-sum_k t_k log max(p_k, 1e-12)).
double weighted_cross_entropy(const Matrix& probs, const Matrix& targets, std::span<const double> weights,
                              double mass);

// Training-mode forward pass with batch statistics. `weights` may be empty
// when every BN layer is in standard mode.
Matrix network_forward_train(const Network& net, const Matrix& inputs, std::span<const double> weights,
                             ForwardCache* cache = nullptr);

// Gradient of the per-batch weighted loss (normalised by sum of
// `loss_weights`; empty means all ones) with batch statistics differentiated.
Gradients network_backward(const Network& net, const ForwardCache& cache, const Matrix& targets,
                           std::span<const double> loss_weights);

// Inference-mode pass with stored statistics. Throws StatsUnpopulated.
Matrix network_forward_infer(const Network& net, const Matrix& inputs);

// Sets inference statistics to the plain average over batches. Throws NoStats.
void accumulate_inference_stats(BatchNormLayer& layer, std::span<const BatchStats> per_batch);

} // namespace wbn
