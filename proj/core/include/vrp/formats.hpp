#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vrp/core_model.hpp"

namespace vrp {

// VRPM: magic, u16 version, u8 dtype, u8 reserved, u64 rows, u64 cols, then
// rows * cols little-endian values in row-major order.
inline constexpr char kMatrixMagic[4] = {'V', 'R', 'P', 'M'};
// VRPL: magic, u16 version, u64 count, then count little-endian u32 values.
inline constexpr char kLabelMagic[4] = {'V', 'R', 'P', 'L'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kMatrixHeaderSize = 24;
inline constexpr std::size_t kLabelHeaderSize = 14;

// Encodes in the matrix's own storage type.
std::vector<std::uint8_t> encode_matrix(const PredictionMatrix& m);
// Throws ParseError for a bad header or payload length; the decoded matrix is
// validated like any other.
PredictionMatrix decode_matrix(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_labels(const LabelVector& labels);
LabelVector decode_labels(std::span<const std::uint8_t> bytes);

// Whole-file helpers. Throw MissingFileError when the file does not exist and
// IoError on other failures; both name the path.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

PredictionMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const PredictionMatrix& m);
LabelVector read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const LabelVector& labels);

}  // namespace vrp
