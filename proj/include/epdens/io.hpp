#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "epdens/errors.hpp"
#include "epdens/pipeline.hpp"
#include "epdens/simlab.hpp"

namespace epdens {

NLOHMANN_JSON_SERIALIZE_ENUM(ModelKind, {{ModelKind::homoscedastic, "homoscedastic"},
                                         {ModelKind::heteroscedastic, "heteroscedastic"},
                                         {ModelKind::dependent, "dependent"}})

NLOHMANN_JSON_SERIALIZE_ENUM(Comparison, {{Comparison::pinsker_oracle, "pinsker_oracle"},
                                          {Comparison::raw_residuals, "raw_residuals"},
                                          {Comparison::self, "self"}})

} // namespace epdens

namespace epdens::io {

using nlohmann::json;

//! Malformed input file (CSV or JSON).
class InputError : public Error
{
public:
  using Error::Error;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line)
{
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw InputError("line " + std::to_string(line) + ": '" + std::string(field) +
                     "' is not a decimal number");
  return value;
}

} // namespace detail

//! Reads a CSV with header `x,y` and one observation per row.
inline ObservationSet read_observations(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "x,y")
    throw InputError("CSV header must be 'x,y'");
  ObservationSet obs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = detail::trim(line);
    if (row.empty())
      continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw InputError("line " + std::to_string(lineno) + ": expected two fields");
    obs.push_back({detail::parse_double(row.substr(0, comma), lineno),
                   detail::parse_double(row.substr(comma + 1), lineno)});
  }
  return obs;
}

inline ObservationSet read_observations(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path);
  return read_observations(in);
}

inline void write_observations(std::ostream& out, const ObservationSet& obs)
{
  out << "x,y\n";
  char buf[64];
  for (const auto& o : obs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", o.x, o.y);
    out << buf;
  }
}

//! Parses "a,b" (finite support [a, a + b]) or "infinite".
inline SupportSpec parse_support(std::string_view text)
{
  text = detail::trim(text);
  if (text == "infinite")
    return SupportSpec::infinite();
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    throw InputError("support must be 'a,b' or 'infinite'");
  const double a = detail::parse_double(text.substr(0, comma), 0);
  const double b = detail::parse_double(text.substr(comma + 1), 0);
  if (!(b > 0.0))
    throw InputError("support width b must be positive");
  return SupportSpec::finite(a, b);
}

//! Rounds to 12 significant digits so serialised output is stable.
inline double round12(double x)
{
  if (!std::isfinite(x) || x == 0.0)
    return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline json number_array(std::span<const double> values)
{
  json arr = json::array();
  for (double v : values)
    arr.push_back(round12(v));
  return arr;
}

//! Recursively rounds every floating-point number in `j`.
inline void round_numbers(json& j)
{
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& el : j)
      round_numbers(el);
  }
}

//! Canonical serialisation: sorted keys, 12 significant digits, 2-space indent.
inline std::string dump(json j)
{
  round_numbers(j);
  return j.dump(2) + "\n";
}

// --------------------------------------------------------------------------
// simulation config

inline json to_json(const FunctionSpec& f)
{
  return {{"name", f.name}, {"scale", f.scale}, {"shift", f.shift}};
}

inline FunctionSpec function_from_json(const json& j, FunctionSpec fallback)
{
  if (j.is_string()) {
    fallback.name = j.get<std::string>();
    return fallback;
  }
  fallback.name = j.value("name", fallback.name);
  fallback.scale = j.value("scale", fallback.scale);
  fallback.shift = j.value("shift", fallback.shift);
  return fallback;
}

inline json to_json(const ModelConfig& c)
{
  json j = {{"model", c.kind},
            {"support", to_string(c.support)},
            {"regression", to_json(c.regression)},
            {"scale_function", to_json(c.scale)},
            {"design", c.design},
            {"error", c.error},
            {"error_alt", c.error_alt},
            {"n", c.n},
            {"seed", c.seed},
            {"grid_points", c.grid_points},
            {"comparison", c.comparison},
            {"exact_nuisance", c.exact_nuisance},
            {"decouple_errors", c.decouple_errors},
            {"inflated_cutoff", c.cutoff == SeriesCutoff::inflated}};
  if (c.truncation)
    j["truncation"] = *c.truncation;
  return j;
}

//! Reads a simulation config; absent keys keep their ModelConfig defaults.
inline ModelConfig config_from_json(const json& j)
{
  try {
    if (!j.is_object())
      throw InputError("simulation config must be a JSON object");
    static const std::vector<std::string> known = {
      "model", "support", "regression", "scale_function", "design", "error", "error_alt",
      "n", "seed", "grid_points", "truncation", "comparison", "exact_nuisance",
      "inflated_cutoff", "decouple_errors", "reps"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw InputError("unknown config key '" + key + "'");
    }

    ModelConfig c;
    if (j.contains("model")) {
      c.kind = j.at("model").get<ModelKind>();
      const auto name = j.at("model").get<std::string>();
      if (name != "homoscedastic" && name != "heteroscedastic" && name != "dependent")
        throw InputError("unknown model '" + name + "'");
    }
    if (j.contains("support")) {
      const auto s = j.at("support").get<std::string>();
      if (s == "finite")
        c.support = SupportKind::finite;
      else if (s == "infinite")
        c.support = SupportKind::infinite;
      else
        throw InputError("support must be 'finite' or 'infinite'");
    }
    if (j.contains("regression"))
      c.regression = function_from_json(j.at("regression"), c.regression);
    if (j.contains("scale_function"))
      c.scale = function_from_json(j.at("scale_function"), c.scale);
    c.design = j.value("design", c.design);
    c.error = j.value("error", c.error);
    c.error_alt = j.value("error_alt", c.error_alt);
    c.n = j.value("n", c.n);
    c.seed = j.value("seed", c.seed);
    c.grid_points = j.value("grid_points", c.grid_points);
    if (j.contains("truncation"))
      c.truncation = j.at("truncation").get<double>();
    if (j.contains("comparison")) {
      const auto name = j.at("comparison").get<std::string>();
      if (name != "pinsker_oracle" && name != "raw_residuals" && name != "self")
        throw InputError("unknown comparison '" + name + "'");
      c.comparison = j.at("comparison").get<Comparison>();
    }
    c.exact_nuisance = j.value("exact_nuisance", c.exact_nuisance);
    c.decouple_errors = j.value("decouple_errors", c.decouple_errors);
    if (j.value("inflated_cutoff", false))
      c.cutoff = SeriesCutoff::inflated;
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("bad simulation config: ") + e.what());
  }
}

inline json to_json(const Summary& s)
{
  return {{"mean", s.mean}, {"median", s.median}, {"sd", s.sd}};
}

inline json to_json(const SimulationReport& r)
{
  json reps = json::array();
  for (const auto& rep : r.replications) {
    reps.push_back({{"seed", rep.seed},
                    {"ise_oracle", rep.ise_oracle},
                    {"ise_estimate", rep.ise_estimate},
                    {"ratio", rep.ratio}});
  }
  return {{"config", to_json(r.config)},
          {"reps", r.reps},
          {"master_seed", r.master_seed},
          {"ratio", to_json(r.ratio)},
          {"mise_oracle", r.mise_oracle},
          {"mise_estimate", r.mise_estimate},
          {"replications", reps}};
}

// --------------------------------------------------------------------------
// estimates

inline json blocks_json(const BlockScheme& scheme, std::span<const double> weights,
                        std::span<const double> energies)
{
  json blocks = json::array();
  for (std::size_t k = 0; k < scheme.block_count(); ++k) {
    json b = {{"index", k + 1},
              {"length", scheme.length(k)},
              {"threshold", scheme.threshold(k)},
              {"weight", weights[k]},
              {"energy", energies[k]}};
    if (scheme.kind() == SupportKind::finite) {
      b["first"] = scheme.lower(k) + 1;
      b["last"] = scheme.upper(k);
    } else {
      b["lower"] = scheme.lower(k);
      b["upper"] = scheme.upper(k);
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

//! JSON document for a plug-in (or oracle) estimate tabulated on `grid`, in
//! the units of the original error: for finite support [a, a + b] the
//! density of xi is b^{-1} f((xi - a) / b).
inline json estimate_json(const ErrorDensityEstimate& estimate, const SupportSpec& support,
                          std::span<const double> grid, bool project)
{
  std::vector<double> values;
  values.reserve(grid.size());
  for (double g : grid) {
    if (support.kind == SupportKind::finite)
      values.push_back(evaluate(estimate, (g - support.a) / support.b) / support.b);
    else
      values.push_back(evaluate(estimate, g));
  }
  if (project)
    values = project_nonnegative(grid, values);

  json j;
  j["grid"] = number_array(grid);
  j["density"] = number_array(values);
  std::visit(
    [&j](const auto& e) {
      const std::vector<double> energies = e.block_energies();
      j["weights"] = number_array(e.weights());
      j["blocks"] = blocks_json(e.scheme(), e.weights(), energies);
      j["sample_size"] = e.sample_size();
    },
    estimate);
  return j;
}

} // namespace epdens::io
