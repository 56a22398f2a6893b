#pragma once

#include "wbn/idx.hpp"
#include "wbn/matrix.hpp"
#include "wbn/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace wbn {

// N samples with inputs scaled to [0, 1], 1-of-K targets and class indices.
struct Dataset {
    Matrix inputs;                  // N x n
    Matrix targets;                 // N x K, one 1 per row
    std::vector<std::size_t> labels; // index of the 1 in each target row
    std::vector<int> class_names;   // original digit code per class index

    std::size_t size() const { return labels.size(); }
    std::size_t num_classes() const { return targets.cols(); }

    Dataset subset(std::span<const std::size_t> indices) const;
};

// Table 1 style two-class subset. Class index 0 is the majority digit,
// class index 1 the minority digit.
struct ExperimentSpec {
    int majority_digit = 0;
    int minority_digit = 1;
    std::size_t train_majority_count = 0;
    std::size_t train_minority_count = 0;
    std::size_t test_majority_count = 0;
    std::size_t test_minority_count = 0;
    std::uint64_t seed = 0;
};

// Experiments (i), (ii), (iii) with their published sample counts.
ExperimentSpec experiment_preset(std::string_view id, std::uint64_t seed);

std::vector<double> encode_one_hot(std::size_t label_index, std::size_t num_classes);

// Builds a dataset from labelled samples; rows of `targets` are 1-of-K.
Dataset make_dataset(Matrix inputs, std::span<const std::size_t> labels, std::vector<int> class_names);

std::pair<Dataset, Dataset> build_experiment(const RawMnist& train, const RawMnist& test,
                                             const ExperimentSpec& spec);

struct BatchPartition {
    std::vector<std::vector<std::size_t>> batches; // 0-based sample indices

    std::size_t count() const { return batches.size(); }
};

// Shuffles 0..n-1 and cuts it into consecutive chunks of batch_size. A final
// chunk of size 1 is folded into the previous batch.
BatchPartition partition_batches(std::size_t n, std::size_t batch_size, Rng& rng);

} // namespace wbn
