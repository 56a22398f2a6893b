#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace wbn {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Image part of an MNIST IDX pair: count images of rows x cols bytes each,
// stored contiguously in file order.
struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t pixels_per_image() const { return rows * cols; }
    std::span<const std::uint8_t> image(std::size_t i) const
    {
        return {pixels.data() + i * pixels_per_image(), pixels_per_image()};
    }
};

// Parsed image + label files.
struct RawMnist {
    IdxImages images;
    std::vector<std::uint8_t> labels;

    std::size_t count() const { return labels.size(); }
};

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// Throws ShapeMismatch if the two files disagree on the sample count.
RawMnist load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

} // namespace wbn
