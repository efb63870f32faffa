#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace epsgreedy {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImageSet {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

  std::size_t image_size() const noexcept { return std::size_t{rows} * cols; }
  std::span<const std::uint8_t> image(std::size_t i) const;
};

struct IdxLabelSet {
  std::uint32_t count = 0;
  std::vector<std::uint8_t> labels;
};

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset);

/// Throws FormatError on a wrong magic and TruncationError when the header or
/// payload is short. Trailing bytes past the declared payload are ignored.
IdxImageSet parse_idx_images(std::span<const std::uint8_t> bytes);
/// As above; additionally throws RangeError for a label above 9.
IdxLabelSet parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const IdxImageSet& images);
std::vector<std::uint8_t> serialize_idx_labels(const IdxLabelSet& labels);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
IdxImageSet load_idx_images(const std::filesystem::path& path);
IdxLabelSet load_idx_labels(const std::filesystem::path& path);

/// Non-overlapping factor x factor block means scaled to [0, 1]. Throws
/// InvalidArgument unless factor divides both dimensions.
std::vector<double> pool_image(std::span<const std::uint8_t> image, std::size_t rows,
                               std::size_t cols, std::size_t factor);

}  // namespace epsgreedy
