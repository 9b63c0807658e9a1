#pragma once
// Canonical JSON / CSV emission and disorder realization round-tripping.
//
// Every floating-point number is serialized with 17 significant digits, so
// emit -> parse -> emit is byte-stable. Files are UTF-8 with LF line endings
// and no carriage returns. Nonfinite doubles become the strings "inf",
// "-inf", "nan" (JSON has no tokens for them).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mpal/common.hpp"
#include "mpal/disorder.hpp"

namespace mpal {

// Parsed and emitted documents preserve key order.
using Json = nlohmann::ordered_json;

inline constexpr const char* kDisorderSchema = "mpal.disorder.v1";

// ---------- JSON emission ----------

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

inline std::string json_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0.0 ? "\"inf\"" : "\"-inf\"";
  return format_g17(v);
}

namespace detail {

inline void dump_json_to(const Json& v, std::string& out, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string inner(2 * static_cast<std::size_t>(depth) + 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + "\"" + json_escape(it.key()) + "\": ";
        dump_json_to(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        dump_json_to(item, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::string:
      out += "\"" + json_escape(v.get<std::string>()) + "\"";
      return;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      return;
    case Json::value_t::number_float:
      out += json_number(v.get<double>());
      return;
    case Json::value_t::null:
    default:
      out += "null";
      return;
  }
}

}  // namespace detail

// Canonical text of a document: 2-space indentation, ordered keys, 17-digit
// floats, trailing newline.
inline std::string dump_json(const Json& v) {
  std::string out;
  detail::dump_json_to(v, out, 0);
  out += "\n";
  return out;
}

// ---------- CSV emission ----------

inline std::string csv_cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  return format_g17(v);
}
inline std::string csv_cell(int v) { return std::to_string(v); }
inline std::string csv_cell(std::size_t v) { return std::to_string(v); }

// Header plus rows, comma-separated, one LF per line. Cells must already be
// comma- and newline-free; emitters only produce numbers and space-separated
// configuration strings.
inline std::string csv_string(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto append_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& cell = cells[i];
      if (cell.find_first_of(",\"\n\r") != std::string::npos) {
        throw InternalError("csv_string: cell contains a delimiter: " + cell);
      }
      if (i > 0) out += ',';
      out += cell;
    }
    out += '\n';
  };
  append_line(header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw InternalError("csv_string: row width " + std::to_string(row.size()) +
                          " does not match header width " + std::to_string(header.size()));
    }
    append_line(row);
  }
  return out;
}

// ---------- files ----------

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open " + path.string() + " for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw ConfigError("write failed for " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path.string() + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------- disorder round trip ----------

inline Json distribution_to_json(const Distribution& dist) {
  Json j = Json::object();
  if (dist.kind == Distribution::Kind::Uniform) {
    j["kind"] = "uniform";
    j["v_max"] = dist.v_max;
  } else {
    j["kind"] = "piecewise_linear";
    j["v_max"] = dist.v_max;
    j["knots"] = dist.knots;
    j["densities"] = dist.densities;
    j["smooth_hint"] = dist.smooth_hint;
  }
  return j;
}

inline Distribution distribution_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError(where + ": distribution needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const bool shared = key == "kind" || key == "v_max";
    const bool linear = key == "knots" || key == "densities" || key == "smooth_hint";
    if (!shared && !(kind == "piecewise_linear" && linear)) {
      throw ConfigError(where + ": unknown distribution key '" + key + "'");
    }
  }
  if (!j.contains("v_max") || !j["v_max"].is_number()) {
    throw ConfigError(where + ": distribution needs a numeric 'v_max'");
  }
  const double v_max = j["v_max"].get<double>();
  if (kind == "uniform") {
    return Distribution::uniform(v_max);
  }
  if (kind == "piecewise_linear") {
    if (!j.contains("knots") || !j.contains("densities")) {
      throw ConfigError(where + ": piecewise_linear needs 'knots' and 'densities'");
    }
    const bool smooth = j.value("smooth_hint", false);
    return Distribution::piecewise_linear(v_max, j["knots"].get<std::vector<double>>(),
                                          j["densities"].get<std::vector<double>>(), smooth);
  }
  throw ConfigError(where + ": unsupported distribution kind '" + kind + "'");
}

// Serializes (seed, distribution, site values) under the versioned schema;
// values re-parse to identical doubles because of the 17-digit contract.
inline Json disorder_to_json(const DisorderRealization& real) {
  Json j = Json::object();
  j["schema"] = kDisorderSchema;
  j["seed"] = real.seed;
  j["distribution"] = distribution_to_json(real.distribution);
  Json values = Json::array();
  for (const auto& [site, value] : real.site_values) {
    values.push_back(Json::array({site, value}));
  }
  j["values"] = values;
  return j;
}

inline DisorderRealization disorder_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("disorder import: document is not an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "schema" && key != "seed" && key != "distribution" && key != "values") {
      throw ConfigError("disorder import: unknown key '" + key + "'");
    }
  }
  if (!j.contains("schema") || j["schema"] != kDisorderSchema) {
    throw ConfigError("disorder import: expected schema '" + std::string(kDisorderSchema) + "'");
  }
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    throw ConfigError("disorder import: needs an unsigned 'seed'");
  }
  if (!j.contains("values") || !j["values"].is_array()) {
    throw ConfigError("disorder import: needs a 'values' array");
  }
  DisorderRealization real;
  real.seed = j["seed"].get<std::uint64_t>();
  real.distribution = distribution_from_json(j["distribution"], "disorder import");
  for (const auto& entry : j["values"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
        !entry[1].is_number()) {
      throw ConfigError("disorder import: values entries must be [site, value] pairs");
    }
    real.site_values[entry[0].get<int>()] = entry[1].get<double>();
  }
  return real;
}

}  // namespace mpal
