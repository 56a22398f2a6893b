#pragma once

#include "wbn/error.hpp"
#include "wbn/idx.hpp"
#include "wbn/rng.hpp"

#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

// Fails the test unless `expr` throws wbn::Error with the given code.
#define CHECK_WBN_ERROR(expr, expected_code)                                                   \
    do {                                                                                       \
        bool thrown_ = false;                                                                  \
        try {                                                                                  \
            (void)(expr);                                                                      \
        } catch (const wbn::Error& e_) {                                                       \
            thrown_ = true;                                                                    \
            CHECK_MESSAGE(e_.code() == (expected_code), "got ", wbn::to_string(e_.code()));    \
        }                                                                                      \
        CHECK_MESSAGE(thrown_, "expected ", wbn::to_string(expected_code));                    \
    } while (0)

namespace support {

// Small MNIST stand-in: 4x4 images whose bright pixel encodes the digit, with
// `per_digit[d]` samples of digit d interleaved in file order.
inline wbn::RawMnist synthetic_mnist(const std::vector<std::size_t>& per_digit, std::uint64_t seed)
{
    wbn::RawMnist raw;
    raw.images.rows = 4;
    raw.images.cols = 4;
    wbn::Rng rng(seed);
    std::vector<std::size_t> left = per_digit;
    bool any = true;
    while (any) {
        any = false;
        for (std::size_t d = 0; d < left.size(); ++d) {
            if (left[d] == 0) {
                continue;
            }
            --left[d];
            any = true;
            raw.labels.push_back(static_cast<std::uint8_t>(d));
            for (std::size_t p = 0; p < 16; ++p) {
                const auto noise = static_cast<std::uint8_t>(rng.below(40));
                raw.images.pixels.push_back(p == d ? static_cast<std::uint8_t>(200 + noise) : noise);
            }
        }
    }
    raw.images.count = raw.labels.size();
    return raw;
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Writes train/test IDX pairs under the standard MNIST file names.
inline void write_mnist_dir(const std::filesystem::path& dir, const wbn::RawMnist& train, const wbn::RawMnist& test)
{
    std::filesystem::create_directories(dir);
    write_bytes(dir / "train-images-idx3-ubyte", wbn::serialize_idx_images(train.images));
    write_bytes(dir / "train-labels-idx1-ubyte", wbn::serialize_idx_labels(train.labels));
    write_bytes(dir / "t10k-images-idx3-ubyte", wbn::serialize_idx_images(test.images));
    write_bytes(dir / "t10k-labels-idx1-ubyte", wbn::serialize_idx_labels(test.labels));
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("wbn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// The real MNIST directory, if WBN_MNIST_DIR names one holding the files.
inline std::optional<std::filesystem::path> real_mnist_dir()
{
    const char* env = std::getenv("WBN_MNIST_DIR");
    if (env == nullptr) {
        return std::nullopt;
    }
    const std::filesystem::path dir(env);
    if (!std::filesystem::exists(dir / "train-images-idx3-ubyte") ||
        !std::filesystem::exists(dir / "t10k-labels-idx1-ubyte")) {
        return std::nullopt;
    }
    return dir;
}

} // namespace support
