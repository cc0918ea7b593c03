#include "vrp/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "vrp/error.hpp"

namespace vrp {

namespace {


template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                                                     std::uint8_t>>>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bits |= static_cast<U>(static_cast<U>(in[offset + b]) << (8 * b));
  }
  return std::bit_cast<T>(bits);
}

void check_magic(std::span<const std::uint8_t> bytes, const char (&magic)[4], std::size_t header,
                 const char* what) {
  if (bytes.size() < header) {
    throw ParseError(std::string(what) + ": truncated header (" + std::to_string(bytes.size()) +
                     " bytes)");
  }
  if (std::memcmp(bytes.data(), magic, 4) != 0) {
    throw ParseError(std::string(what) + ": bad magic");
  }
  const auto version = get<std::uint16_t>(bytes, 4);
  if (version != kFormatVersion) {
    throw ParseError(std::string(what) + ": unsupported version " + std::to_string(version));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const PredictionMatrix& m) {
  const bool f32 = m.storage() == StorageType::float32;
  std::vector<std::uint8_t> out;
  out.reserve(kMatrixHeaderSize + m.values().size() * (f32 ? 4 : 8));
  out.insert(out.end(), kMatrixMagic, kMatrixMagic + 4);
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(m.storage()));
  put<std::uint8_t>(out, 0);
  put<std::uint64_t>(out, m.rows());
  put<std::uint64_t>(out, m.cols());
  for (double v : m.values()) {
    if (f32) {
      put<float>(out, static_cast<float>(v));
    } else {
      put<double>(out, v);
    }
  }
  return out;
}

PredictionMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kMatrixMagic, kMatrixHeaderSize, "matrix file");
  const auto dtype = get<std::uint8_t>(bytes, 6);
  if (dtype > 1) throw ParseError("matrix file: unknown dtype " + std::to_string(dtype));
  if (get<std::uint8_t>(bytes, 7) != 0) throw ParseError("matrix file: reserved byte is not 0");
  const auto rows = get<std::uint64_t>(bytes, 8);
  const auto cols = get<std::uint64_t>(bytes, 16);
  const std::size_t width = dtype == 0 ? 4 : 8;
  const std::size_t payload = bytes.size() - kMatrixHeaderSize;
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols / width) {
    throw ParseError("matrix file: header shape overflows");
  }
  if (payload != rows * cols * width) {
    throw ParseError("matrix file: payload is " + std::to_string(payload) + " bytes, header " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                     std::to_string(rows * cols * width));
  }
  std::vector<double> values(rows * cols);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t at = kMatrixHeaderSize + k * width;
    values[k] = dtype == 0 ? static_cast<double>(get<float>(bytes, at)) : get<double>(bytes, at);
  }
  return PredictionMatrix(rows, cols, std::move(values),
                          dtype == 0 ? StorageType::float32 : StorageType::float64);
}

std::vector<std::uint8_t> encode_labels(const LabelVector& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(kLabelHeaderSize + labels.size() * 4);
  out.insert(out.end(), kLabelMagic, kLabelMagic + 4);
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint64_t>(out, labels.size());
  for (auto v : labels.values()) put<std::uint32_t>(out, v);
  return out;
}

LabelVector decode_labels(std::span<const std::uint8_t> bytes) {
  check_magic(bytes, kLabelMagic, kLabelHeaderSize, "label file");
  const auto count = get<std::uint64_t>(bytes, 6);
  const std::size_t payload = bytes.size() - kLabelHeaderSize;
  if (count > payload / 4 || payload != count * 4) {
    throw ParseError("label file: payload is " + std::to_string(payload) + " bytes, header count " +
                     std::to_string(count));
  }
  std::vector<std::uint32_t> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = get<std::uint32_t>(bytes, kLabelHeaderSize + 4 * k);
  }
  return LabelVector(std::move(values));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw MissingFileError("missing file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

PredictionMatrix read_matrix(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_matrix(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const PredictionMatrix& m) {
  write_file(path, encode_matrix(m));
}

LabelVector read_labels(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_labels(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
  write_file(path, encode_labels(labels));
}

}  // namespace vrp
