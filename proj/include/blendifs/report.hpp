#pragma once

// Metric reports in two forms: a JSON document and a flat "key=value" text
// listing. Per-system keys carry a ".<index>" suffix (1-based), for example
// `beta_examples.2=1.5867172352`.
//
// Stable keys: theta, tail_bound, beta_def_lower, beta_def_upper,
// beta_examples, radius_variant, m_value, radius, error_bound_worst,
// error_bound_tight, clamp_count.

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blendifs/blend.hpp"
#include "blendifs/metrics.hpp"

namespace blendifs {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form.
inline std::string format_real(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline Json theta_json(const BlendingSequence& theta) { return Json(theta.symbols()); }

inline Json to_json(const BetaReport& r, const std::vector<std::string>& names = {}) {
  Json out;
  out["theta"] = theta_json(r.theta);
  out["tail_bound"] = r.tail_bound;
  Json systems = Json::array();
  for (const auto& e : r.entries) {
    Json s;
    s["index"] = e.system;
    if (static_cast<std::size_t>(e.system) <= names.size()) s["name"] = names[static_cast<std::size_t>(e.system - 1)];
    s["beta_def_lower"] = e.beta_def_lower;
    s["beta_def_upper"] = e.beta_def_upper;
    s["beta_examples"] = e.beta_examples;
    systems.push_back(std::move(s));
  }
  out["systems"] = std::move(systems);
  return out;
}

inline Json to_json(const CoveringRadii& c, const std::vector<std::string>& names = {}) {
  Json out;
  out["radius_variant"] = to_string(c.variant);
  out["m_value"] = c.m_value;
  Json radii = Json::array();
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    Json r;
    r["index"] = i + 1;
    if (i < names.size()) r["name"] = names[i];
    r["radius"] = c.radii[i];
    radii.push_back(std::move(r));
  }
  out["radii"] = std::move(radii);
  return out;
}

inline Json to_json(const BlendResult& b) {
  Json out;
  out["theta"] = theta_json(b.theta);
  out["k"] = b.theta.size();
  out["resolution"] = b.output.grid().resolution();
  out["epsilon"] = b.output.grid().epsilon();
  out["error_bound_tight"] = b.error_bound_tight;
  out["error_bound_worst"] = b.error_bound_worst;
  out["clamp_count"] = b.clamp_count;
  out["cells"] = b.output.size();
  return out;
}

/// Flattens a JSON report: objects join keys with '.', arrays of objects with
/// an "index" field use that index as the suffix, scalar arrays are written
/// comma-separated.
inline void write_flat(std::ostream& os, const Json& doc, const std::string& prefix = {}) {
  auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& v = it.value();
    if (v.is_object()) {
      write_flat(os, v, key(it.key()));
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      for (const auto& item : v) {
        const std::string suffix = item.contains("index") ? item.at("index").dump() : "?";
        for (auto f = item.begin(); f != item.end(); ++f) {
          if (f.key() == "index") continue;
          const auto& fv = f.value();
          if (fv.is_object()) {
            write_flat(os, fv, key(f.key()) + "." + suffix);
          } else {
            os << key(f.key()) << '.' << suffix << '='
               << (fv.is_number_float() ? format_real(fv.get<double>()) : fv.is_string() ? fv.get<std::string>() : fv.dump())
               << '\n';
          }
        }
      }
    } else if (v.is_array()) {
      os << key(it.key()) << '=';
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k != 0) os << ',';
        os << (v[k].is_number_float() ? format_real(v[k].get<double>()) : v[k].dump());
      }
      os << '\n';
    } else if (v.is_number_float()) {
      os << key(it.key()) << '=' << format_real(v.get<double>()) << '\n';
    } else if (v.is_string()) {
      os << key(it.key()) << '=' << v.get<std::string>() << '\n';
    } else {
      os << key(it.key()) << '=' << v.dump() << '\n';
    }
  }
}

}  // namespace blendifs
