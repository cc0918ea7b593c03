#include "vrp/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "vrp/error.hpp"
#include "vrp/formats.hpp"

namespace vrp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "vrp-bench";
constexpr int kManifestVersion = 1;

[[noreturn]] void rethrow_as(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::dimension: throw DimensionError(what);
    case ErrorKind::configuration: throw ConfigurationError(what);
    case ErrorKind::degenerate_input: throw DegenerateInputError(what);
    case ErrorKind::insufficient_data: throw InsufficientDataError(what);
    case ErrorKind::empty_vicinity: throw EmptyVicinityError(what);
    case ErrorKind::parse: throw ParseError(what);
    case ErrorKind::row_sum: throw RowSumError(what);
    case ErrorKind::validation: throw ValidationError(what);
    case ErrorKind::missing_file: throw MissingFileError(what);
    case ErrorKind::io: throw IoError(what);
  }
  throw Error(kind, what);
}

template <typename F>
auto with_context(const std::string& context, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    rethrow_as(e.kind(), context + ": " + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t size_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_unsigned()) {
    throw ParseError(where + ": field '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string model_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "models/%04zu", index);
  return buf;
}

}  // namespace

Bench load_bench(const fs::path& manifest) {
  const auto bytes = read_file(manifest);
  const std::string where = manifest.string();
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (doc.contains("format") && doc["format"] != kManifestFormat) {
    throw ParseError(where + ": not a bench manifest");
  }
  if (doc.contains("version") && doc["version"] != kManifestVersion) {
    throw ParseError(where + ": unsupported manifest version");
  }
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string& rel) { return base / fs::path(rel); };

  Bench bench;
  bench.name = string_field(doc, "name", where);
  bench.n = size_field(doc, "n", where);
  bench.classes = size_field(doc, "classes", where);

  const json& transform = field(doc, "transform", where);
  if (transform.is_string()) {
    bench.transform = Transform::parse(transform.get<std::string>());
  } else {
    bench.transform = Transform::parse(string_field(transform, "tag", where + ": transform"));
    if (transform.contains("params")) {
      for (const auto& [k, v] : transform["params"].items()) {
        bench.transform_params[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
  }

  if (doc.contains("labels") && !doc["labels"].is_null()) {
    if (!doc["labels"].is_string()) throw ParseError(where + ": field 'labels' must be a path");
    bench.labels = with_context("labels", [&] { return read_labels(resolve(doc["labels"].get<std::string>())); });
  }

  const json& models = field(doc, "models", where);
  if (!models.is_array()) throw ParseError(where + ": field 'models' must be an array");
  for (std::size_t k = 0; k < models.size(); ++k) {
    const json& entry = models[k];
    const std::string id = string_field(entry, "id", where + ": models[" + std::to_string(k) + "]");
    const std::string context = "model '" + id + "'";
    ModelRecord record;
    record.id = id;
    with_context(context, [&] {
      record.original = read_matrix(resolve(string_field(entry, "original", context)));
      record.transformed = read_matrix(resolve(string_field(entry, "transformed", context)));
      if (entry.contains("validation") && !entry["validation"].is_null()) {
        const json& val = entry["validation"];
        record.validation = read_matrix(resolve(string_field(val, "predictions", context)));
        record.validation_labels = read_labels(resolve(string_field(val, "labels", context)));
      }
      if (entry.contains("attributes")) {
        for (const auto& [key, v] : entry["attributes"].items()) {
          if (!v.is_number()) throw ParseError("attribute '" + key + "' must be numeric");
          record.attributes[key] = v.get<double>();
        }
      }
      return 0;
    });
    bench.models.push_back(std::move(record));
  }
  bench.validate();
  return bench;
}

fs::path save_bench(const Bench& bench, const fs::path& dir) {
  bench.validate();
  std::error_code ec;
  fs::create_directories(dir / "models", ec);
  if (ec) throw IoError("cannot create " + (dir / "models").string() + ": " + ec.message());

  json doc;
  doc["format"] = kManifestFormat;
  doc["version"] = kManifestVersion;
  doc["name"] = bench.name;
  doc["n"] = bench.n;
  doc["classes"] = bench.classes;
  json params = json::object();
  for (const auto& [k, v] : bench.transform_params) params[k] = v;
  doc["transform"] = {{"tag", bench.transform.to_string()}, {"params", params}};
  if (bench.labels) {
    write_labels(dir / "labels.vrpl", *bench.labels);
    doc["labels"] = "labels.vrpl";
  } else {
    doc["labels"] = nullptr;
  }

  json models = json::array();
  for (std::size_t k = 0; k < bench.models.size(); ++k) {
    const ModelRecord& m = bench.models[k];
    const std::string stem = model_stem(k);
    json entry;
    entry["id"] = m.id;
    entry["original"] = stem + ".orig.vrpm";
    entry["transformed"] = stem + ".trans.vrpm";
    write_matrix(dir / (stem + ".orig.vrpm"), m.original);
    write_matrix(dir / (stem + ".trans.vrpm"), m.transformed);
    if (m.validation) {
      entry["validation"] = {{"predictions", stem + ".val.vrpm"}, {"labels", stem + ".val.vrpl"}};
      write_matrix(dir / (stem + ".val.vrpm"), *m.validation);
      write_labels(dir / (stem + ".val.vrpl"), *m.validation_labels);
    } else {
      entry["validation"] = nullptr;
    }
    json attrs = json::object();
    for (const auto& [key, v] : m.attributes) attrs[key] = v;
    entry["attributes"] = attrs;
    models.push_back(std::move(entry));
  }
  doc["models"] = std::move(models);

  const fs::path path = dir / kManifestFile;
  const std::string text = doc.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return path;
}

}  // namespace vrp
