#pragma once

// JSON run configuration:
//
//   {
//     "bbox": [x0, y0, x1, y1],
//     "resolution": 1024,
//     "delta": 0.1,            // optional
//     "seed": 0,               // optional
//     "output": "out",         // optional
//     "systems": [
//       {"name": "R1", "maps": [{"a": 0.5, "b": 0, "c": 0, "d": 0.5, "e": 0, "f": 0}, ...]},
//       ...
//     ]
//   }
//
// Coefficients may be numbers or rational strings such as "19/48" or "-1/12".

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blendifs/error.hpp"
#include "blendifs/ifs.hpp"

namespace blendifs {

struct IfsSpec {
  std::string name;
  std::vector<AffineMap2> maps;
};

struct RunConfig {
  Box bbox;
  int resolution = 1024;
  std::vector<IfsSpec> systems;
  std::optional<double> delta;
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  /// Validates every IFS; throws NotContractiveError naming the IFS and map.
  BlendSystem blend_system() const {
    std::vector<Ifs> out;
    out.reserve(systems.size());
    for (const auto& s : systems) out.push_back(ifs_validate(s.maps, s.name));
    return BlendSystem(bbox, std::move(out));
  }

  std::vector<std::string> system_names() const {
    std::vector<std::string> names;
    for (const auto& s : systems) names.push_back(s.name);
    return names;
  }
};

namespace detail {

inline double parse_coefficient(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw Error(ErrorKind::ParseError, where + ": coefficient must be a number or \"p/q\"");
  const auto text = v.get<std::string>();
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double x = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return x;
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    const double p = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(text);
    const double q = std::stod(den, &used);
    if (used != den.size() || q == 0.0) throw std::invalid_argument(text);
    return p / q;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, where + ": bad coefficient '" + text + "'");
  }
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& doc) {
  using nlohmann::json;
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
  RunConfig cfg;
  try {
    const auto& bbox = doc.at("bbox");
    if (!bbox.is_array() || bbox.size() != 4) throw Error(ErrorKind::ParseError, "bbox must be [x0, y0, x1, y1]");
    cfg.bbox = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(), bbox[3].get<double>()};
    if (!(cfg.bbox.x1 > cfg.bbox.x0 && cfg.bbox.y1 > cfg.bbox.y0)) {
      throw Error(ErrorKind::ParseError, "bbox must satisfy x1 > x0 and y1 > y0");
    }
    cfg.resolution = doc.at("resolution").get<int>();
    if (cfg.resolution < 1) throw Error(ErrorKind::ParseError, "resolution must be >= 1");
    if (doc.contains("delta")) cfg.delta = doc.at("delta").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("output")) cfg.output_dir = doc.at("output").get<std::string>();

    const auto& systems = doc.at("systems");
    if (!systems.is_array() || systems.empty()) throw Error(ErrorKind::ParseError, "systems must be a nonempty array");
    for (std::size_t s = 0; s < systems.size(); ++s) {
      IfsSpec spec;
      spec.name = systems[s].value("name", "R" + std::to_string(s + 1));
      const auto& maps = systems[s].at("maps");
      if (!maps.is_array()) throw Error(ErrorKind::ParseError, "system '" + spec.name + "': maps must be an array");
      for (std::size_t j = 0; j < maps.size(); ++j) {
        const std::string where = "system '" + spec.name + "' map " + std::to_string(j + 1);
        const auto& m = maps[j];
        auto coef = [&](const char* key) {
          return m.contains(key) ? detail::parse_coefficient(m.at(key), where) : 0.0;
        };
        spec.maps.push_back({coef("a"), coef("b"), coef("c"), coef("d"), coef("e"), coef("f")});
      }
      for (const auto& prior : cfg.systems) {
        if (prior.name == spec.name) throw Error(ErrorKind::ParseError, "duplicate system name '" + spec.name + "'");
      }
      cfg.systems.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open config '" + path + "'");
  return load_config(in);
}

}  // namespace blendifs
