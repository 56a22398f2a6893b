#include "wbn/dataset.hpp"

#include "wbn/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace wbn {

namespace {

// `count` indices of samples labelled `digit`, uniformly without replacement,
// returned in file order.
std::vector<std::size_t> sample_digit(const RawMnist& raw, int digit, std::size_t count, Rng& rng,
                                      const char* split)
{
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < raw.count(); ++i) {
        if (raw.labels[i] == digit) {
            pool.push_back(i);
        }
    }
    if (pool.size() < count) {
        fail(ErrorCode::InsufficientData, std::string(split) + " split has " + std::to_string(pool.size()) +
                                              " samples of digit " + std::to_string(digit) + ", " +
                                              std::to_string(count) + " requested");
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

Dataset assemble(const RawMnist& raw, const std::vector<std::size_t>& majority,
                 const std::vector<std::size_t>& minority, const ExperimentSpec& spec)
{
    const std::size_t width = raw.images.pixels_per_image();
    Matrix inputs(majority.size() + minority.size(), width);
    std::vector<std::size_t> labels;
    labels.reserve(inputs.rows());

    std::size_t row = 0;
    auto append = [&](const std::vector<std::size_t>& picks, std::size_t label) {
        for (std::size_t idx : picks) {
            const auto pixels = raw.images.image(idx);
            auto dst = inputs.row(row++);
            for (std::size_t p = 0; p < width; ++p) {
                dst[p] = pixels[p] / 255.0;
            }
            labels.push_back(label);
        }
    };
    append(majority, 0);
    append(minority, 1);
    return make_dataset(std::move(inputs), labels, {spec.majority_digit, spec.minority_digit});
}

} // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices) const
{
    Dataset out;
    out.inputs = inputs.gather_rows(indices);
    out.targets = targets.gather_rows(indices);
    out.labels.reserve(indices.size());
    for (std::size_t idx : indices) {
        out.labels.push_back(labels[idx]);
    }
    out.class_names = class_names;
    return out;
}

ExperimentSpec experiment_preset(std::string_view id, std::uint64_t seed)
{
    ExperimentSpec spec;
    spec.seed = seed;
    if (id == "i") {
        spec.majority_digit = 0;
        spec.minority_digit = 1;
        spec.train_majority_count = 5923;
        spec.train_minority_count = 45;
        spec.test_majority_count = 980;
        spec.test_minority_count = 1135;
    } else if (id == "ii") {
        spec.majority_digit = 8;
        spec.minority_digit = 1;
        spec.train_majority_count = 5851;
        spec.train_minority_count = 45;
        spec.test_majority_count = 974;
        spec.test_minority_count = 1135;
    } else if (id == "iii") {
        spec.majority_digit = 7;
        spec.minority_digit = 4;
        spec.train_majority_count = 6265;
        spec.train_minority_count = 39;
        spec.test_majority_count = 1028;
        spec.test_minority_count = 982;
    } else {
        fail(ErrorCode::InvalidConfig, "unknown experiment id '" + std::string(id) + "'");
    }
    return spec;
}

std::vector<double> encode_one_hot(std::size_t label_index, std::size_t num_classes)
{
    if (label_index >= num_classes) {
        fail(ErrorCode::IndexOutOfRange, "label " + std::to_string(label_index) + " with K = " +
                                             std::to_string(num_classes));
    }
    std::vector<double> t(num_classes, 0.0);
    t[label_index] = 1.0;
    return t;
}

Dataset make_dataset(Matrix inputs, std::span<const std::size_t> labels, std::vector<int> class_names)
{
    if (inputs.rows() != labels.size()) {
        fail(ErrorCode::ShapeMismatch, "inputs have " + std::to_string(inputs.rows()) + " rows, " +
                                           std::to_string(labels.size()) + " labels given");
    }
    Dataset out;
    out.inputs = std::move(inputs);
    out.targets = Matrix(labels.size(), class_names.size());
    for (std::size_t mu = 0; mu < labels.size(); ++mu) {
        const auto t = encode_one_hot(labels[mu], class_names.size());
        std::copy(t.begin(), t.end(), out.targets.row(mu).begin());
    }
    out.labels.assign(labels.begin(), labels.end());
    out.class_names = std::move(class_names);
    return out;
}

std::pair<Dataset, Dataset> build_experiment(const RawMnist& train, const RawMnist& test,
                                             const ExperimentSpec& spec)
{
    if (spec.majority_digit == spec.minority_digit) {
        fail(ErrorCode::InvalidConfig, "majority and minority digits must differ");
    }
    for (int digit : {spec.majority_digit, spec.minority_digit}) {
        if (digit < 0 || digit > 9) {
            fail(ErrorCode::InvalidConfig, "digit " + std::to_string(digit) + " outside 0-9");
        }
    }

    Rng train_rng(derive_seed(spec.seed, 0));
    const auto train_major = sample_digit(train, spec.majority_digit, spec.train_majority_count, train_rng, "train");
    const auto train_minor = sample_digit(train, spec.minority_digit, spec.train_minority_count, train_rng, "train");

    Rng test_rng(derive_seed(spec.seed, 1));
    const auto test_major = sample_digit(test, spec.majority_digit, spec.test_majority_count, test_rng, "test");
    const auto test_minor = sample_digit(test, spec.minority_digit, spec.test_minority_count, test_rng, "test");

    return {assemble(train, train_major, train_minor, spec), assemble(test, test_major, test_minor, spec)};
}

BatchPartition partition_batches(std::size_t n, std::size_t batch_size, Rng& rng)
{
    if (batch_size < 2) {
        fail(ErrorCode::BatchTooSmall, "batch size " + std::to_string(batch_size) + " < 2");
    }
    if (n < 2) {
        fail(ErrorCode::BatchTooSmall, "cannot form a batch of size >= 2 from " + std::to_string(n) + " samples");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    BatchPartition out;
    for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t end = std::min(n, start + batch_size);
        if (end - start < 2 && !out.batches.empty()) {
            auto& last = out.batches.back();
            last.insert(last.end(), order.begin() + static_cast<std::ptrdiff_t>(start), order.end());
            break;
        }
        out.batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

} // namespace wbn
