#include "epsgreedy/mnist.hpp"

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

namespace {

constexpr std::size_t kImageHeader = 16;
constexpr std::size_t kLabelHeader = 8;

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 24));
  out.push_back(static_cast<std::uint8_t>(value >> 16));
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value));
}

std::string hex(std::uint32_t value) {
  std::ostringstream os;
  os << "0x" << std::hex << value;
  return os.str();
}

void check_magic(std::span<const std::uint8_t> bytes, std::uint32_t expected, const char* what) {
  if (bytes.size() < 4) throw TruncationError(std::string(what) + ": missing magic number");
  const auto magic = read_be32(bytes, 0);
  if (magic != expected) {
    throw FormatError(std::string(what) + ": bad magic " + hex(magic) + ", expected " +
                      hex(expected));
  }
}

}  // namespace

std::span<const std::uint8_t> IdxImageSet::image(std::size_t i) const {
  if (i >= count) throw InvalidArgument("image index out of range");
  return std::span<const std::uint8_t>(pixels).subspan(i * image_size(), image_size());
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  if (offset + 4 > bytes.size()) throw TruncationError("read_be32 past end of buffer");
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

IdxImageSet parse_idx_images(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kIdxImageMagic, "idx images");
  if (bytes.size() < kImageHeader) throw TruncationError("idx images: header truncated");
  IdxImageSet set;
  set.count = read_be32(bytes, 4);
  set.rows = read_be32(bytes, 8);
  set.cols = read_be32(bytes, 12);
  const std::size_t payload = std::size_t{set.count} * set.rows * set.cols;
  if (bytes.size() - kImageHeader < payload) {
    throw TruncationError("idx images: payload has " + std::to_string(bytes.size() - kImageHeader) +
                          " bytes, header declares " + std::to_string(payload));
  }
  const auto begin = bytes.begin() + kImageHeader;
  set.pixels.assign(begin, begin + static_cast<std::ptrdiff_t>(payload));
  return set;
}

IdxLabelSet parse_idx_labels(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kIdxLabelMagic, "idx labels");
  if (bytes.size() < kLabelHeader) throw TruncationError("idx labels: header truncated");
  IdxLabelSet set;
  set.count = read_be32(bytes, 4);
  if (bytes.size() - kLabelHeader < set.count) {
    throw TruncationError("idx labels: payload has " + std::to_string(bytes.size() - kLabelHeader) +
                          " bytes, header declares " + std::to_string(set.count));
  }
  const auto begin = bytes.begin() + kLabelHeader;
  set.labels.assign(begin, begin + set.count);
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    if (set.labels[i] > 9) {
      throw RangeError("idx labels: label " + std::to_string(set.labels[i]) + " at index " +
                       std::to_string(i) + " exceeds 9");
    }
  }
  return set;
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImageSet& images) {
  std::vector<std::uint8_t> out;
  out.reserve(kImageHeader + images.pixels.size());
  write_be32(out, kIdxImageMagic);
  write_be32(out, images.count);
  write_be32(out, images.rows);
  write_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const IdxLabelSet& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(kLabelHeader + labels.labels.size());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, labels.count);
  out.insert(out.end(), labels.labels.begin(), labels.labels.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

IdxImageSet load_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file_bytes(path));
}

IdxLabelSet load_idx_labels(const std::filesystem::path& path) {
  return parse_idx_labels(read_file_bytes(path));
}

std::vector<double> pool_image(std::span<const std::uint8_t> image, std::size_t rows,
                               std::size_t cols, std::size_t factor) {
  if (factor == 0 || rows % factor != 0 || cols % factor != 0) {
    throw InvalidArgument("pool_image: factor " + std::to_string(factor) +
                          " does not divide " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (image.size() != rows * cols) throw InvalidArgument("pool_image: size mismatch");
  const std::size_t out_rows = rows / factor;
  const std::size_t out_cols = cols / factor;
  const double scale = 1.0 / (static_cast<double>(factor * factor) * 255.0);
  std::vector<double> out(out_rows * out_cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[(r / factor) * out_cols + c / factor] += image[r * cols + c];
    }
  }
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace epsgreedy
