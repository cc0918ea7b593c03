#pragma once

#include <filesystem>

#include "vrp/core_model.hpp"

namespace vrp {

inline constexpr const char* kManifestFile = "manifest.json";

// Reads a JSON bench manifest; referenced paths are relative to the manifest's
// directory. Throws ParseError, MissingFileError, DimensionError, RowSumError
// or ValidationError; errors raised while reading a model's files name the
// model id.
Bench load_bench(const std::filesystem::path& manifest);

// Writes manifest.json, labels.vrpl and models/NNNN.{orig,trans,val}.vrpm plus
// models/NNNN.val.vrpl into dir (created if needed). Output bytes depend only
// on the bench. Returns the manifest path. Throws IoError.
std::filesystem::path save_bench(const Bench& bench, const std::filesystem::path& dir);

}  // namespace vrp
