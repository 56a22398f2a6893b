#include "wbn/idx.hpp"

#include "wbn/error.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace wbn {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset)
{
    if (bytes.size() < offset + 4) {
        fail(ErrorCode::Truncated, "IDX header shorter than " + std::to_string(offset + 4) + " bytes");
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t value)
{
    out.push_back(static_cast<std::uint8_t>(value >> 24));
    out.push_back(static_cast<std::uint8_t>(value >> 16));
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value));
}

void expect_magic(std::uint32_t got, std::uint32_t want)
{
    if (got != want) {
        std::ostringstream msg;
        msg << std::hex << "magic 0x" << got << ", expected 0x" << want;
        fail(ErrorCode::BadMagic, msg.str());
    }
}

} // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes)
{
    expect_magic(read_be32(bytes, 0), kIdxImagesMagic);
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);

    const std::size_t payload = bytes.size() - 16;
    std::size_t per_image = 0;
    std::size_t declared = 0;
    if (__builtin_mul_overflow(out.rows, out.cols, &per_image) ||
        __builtin_mul_overflow(out.count, per_image, &declared) || declared > payload) {
        fail(ErrorCode::Truncated, "image payload declares " + std::to_string(declared) +
                                       " bytes, found " + std::to_string(payload));
    }
    out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(declared));
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes)
{
    expect_magic(read_be32(bytes, 0), kIdxLabelsMagic);
    const std::size_t count = read_be32(bytes, 4);
    const std::size_t payload = bytes.size() - 8;
    if (count > payload) {
        fail(ErrorCode::Truncated, "label payload declares " + std::to_string(count) +
                                       " bytes, found " + std::to_string(payload));
    }
    std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 9) {
            fail(ErrorCode::BadLabel, "label " + std::to_string(labels[i]) + " at index " + std::to_string(i));
        }
    }
    return labels;
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images)
{
    std::vector<std::uint8_t> out;
    out.reserve(16 + images.pixels.size());
    write_be32(out, kIdxImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(images.count));
    write_be32(out, static_cast<std::uint32_t>(images.rows));
    write_be32(out, static_cast<std::uint32_t>(images.cols));
    out.insert(out.end(), images.pixels.begin(), images.pixels.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels)
{
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    write_be32(out, kIdxLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RawMnist load_mnist(const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path)
{
    RawMnist raw;
    raw.images = parse_idx_images(read_file_bytes(images_path));
    raw.labels = parse_idx_labels(read_file_bytes(labels_path));
    if (raw.images.count != raw.labels.size()) {
        fail(ErrorCode::ShapeMismatch, images_path.string() + " has " + std::to_string(raw.images.count) +
                                           " images but " + labels_path.string() + " has " +
                                           std::to_string(raw.labels.size()) + " labels");
    }
    return raw;
}

} // namespace wbn
