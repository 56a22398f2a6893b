#include "wbn/weighting.hpp"

#include "wbn/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace wbn {

namespace {

void check_labels(const ClassCounts& counts, std::span<const std::size_t> labels)
{
    if (labels.size() != counts.total) {
        fail(ErrorCode::ShapeMismatch, "counts total " + std::to_string(counts.total) + " but " +
                                           std::to_string(labels.size()) + " labels");
    }
    for (std::size_t label : labels) {
        if (label >= counts.counts.size()) {
            fail(ErrorCode::IndexOutOfRange, "label " + std::to_string(label));
        }
    }
}

} // namespace

WeightVector WeightVector::uniform(std::size_t n, double value)
{
    return from(std::vector<double>(n, value));
}

WeightVector WeightVector::from(std::vector<double> weights)
{
    WeightVector out;
    out.total = std::accumulate(weights.begin(), weights.end(), 0.0);
    out.weights = std::move(weights);
    return out;
}

ClassCounts class_counts(std::span<const std::size_t> labels, std::size_t num_classes)
{
    ClassCounts out;
    out.counts.assign(num_classes, 0);
    for (std::size_t label : labels) {
        if (label >= num_classes) {
            fail(ErrorCode::IndexOutOfRange, "label " + std::to_string(label));
        }
        ++out.counts[label];
    }
    out.total = labels.size();
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (out.counts[k] == 0) {
            fail(ErrorCode::EmptyClass, "class " + std::to_string(k) + " has no samples");
        }
    }
    return out;
}

ClassCounts class_counts(const Dataset& dataset)
{
    return class_counts(dataset.labels, dataset.num_classes());
}

WeightVector inverse_frequency_weights(const ClassCounts& counts, std::span<const std::size_t> labels)
{
    check_labels(counts, labels);
    const double n = static_cast<double>(counts.total);
    std::vector<double> w(labels.size());
    for (std::size_t mu = 0; mu < labels.size(); ++mu) {
        w[mu] = n / static_cast<double>(counts.counts[labels[mu]]);
    }
    return WeightVector::from(std::move(w));
}

WeightVector class_balanced_weights(const ClassCounts& counts, std::span<const std::size_t> labels,
                                    BalanceParams params)
{
    if (!(params.beta >= 0.0 && params.beta < 1.0)) {
        fail(ErrorCode::InvalidArgument, "beta must lie in [0, 1), got " + std::to_string(params.beta));
    }
    check_labels(counts, labels);

    // 1 - beta^alpha = -expm1(alpha * log(beta)); beta - 1 is exact for beta near 1.
    const double log_beta = std::log1p(params.beta - 1.0);
    std::vector<double> per_class(counts.counts.size());
    for (std::size_t k = 0; k < per_class.size(); ++k) {
        const double alpha = static_cast<double>(counts.counts[k]);
        per_class[k] = (1.0 - params.beta) / -std::expm1(alpha * log_beta);
    }

    std::vector<double> w(labels.size());
    for (std::size_t mu = 0; mu < labels.size(); ++mu) {
        w[mu] = per_class[labels[mu]];
    }
    return WeightVector::from(std::move(w));
}

std::vector<double> effective_class_sizes(std::span<const double> weights,
                                          std::span<const std::size_t> labels, std::size_t num_classes)
{
    if (weights.size() != labels.size()) {
        fail(ErrorCode::ShapeMismatch, "weights and labels differ in length");
    }
    std::vector<double> sizes(num_classes, 0.0);
    for (std::size_t mu = 0; mu < labels.size(); ++mu) {
        if (labels[mu] >= num_classes) {
            fail(ErrorCode::IndexOutOfRange, "label " + std::to_string(labels[mu]));
        }
        sizes[labels[mu]] += weights[mu];
    }
    return sizes;
}

} // namespace wbn
