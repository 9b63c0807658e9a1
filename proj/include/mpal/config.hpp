#pragma once
// Strict JSON experiment configuration. One document drives one experiment;
// unknown keys are rejected at every level so a typo cannot silently fall
// back to a default.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mpal/hamiltonian.hpp"
#include "mpal/io.hpp"
#include "mpal/lemmas.hpp"
#include "mpal/schedules.hpp"

namespace mpal {

enum class ExperimentKind { localize, wegner, emsa, schedule, geometry };

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::localize: return "localize";
    case ExperimentKind::wegner: return "wegner";
    case ExperimentKind::emsa: return "emsa";
    case ExperimentKind::schedule: return "schedule";
    case ExperimentKind::geometry: return "geometry";
  }
  return "unknown";
}

inline ExperimentKind experiment_kind_from_string(const std::string& name,
                                                  const std::string& where) {
  if (name == "localize") return ExperimentKind::localize;
  if (name == "wegner") return ExperimentKind::wegner;
  if (name == "emsa") return ExperimentKind::emsa;
  if (name == "schedule") return ExperimentKind::schedule;
  if (name == "geometry") return ExperimentKind::geometry;
  throw ConfigError(where + ": unknown experiment '" + name + "'");
}

struct ModelConfig {
  int particles = 1;
  std::vector<double> lambdas;  // sweep values; a single run has one entry
  Distribution distribution = Distribution::uniform(1.0);
  InteractionPotential interaction;
};

// Inputs of the scale and decay recursions (schedule experiment and the
// emsa schedule tables).
struct ScheduleInputs {
  double l0 = 2.0;
  int k_max = 5;
  double p = 1.0;  // decay exponent fed to the backwards recursion
};

struct GeometryConfig {
  Config center;
  double ell = 0.0;            // 0 means not configured
  std::vector<double> big_l;   // L sweep; empty means derived where allowed
  std::vector<Config> centers; // the wegner set pair
  std::optional<ScheduleInputs> schedule;
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::localize;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  int workers = 1;
  std::string out_dir = "out";
  std::size_t cap = kDefaultDenseCap;
};

struct WegnerConfig {
  std::vector<double> s_grid;
};

struct EmsaConfig {
  bool schedule_only = false;
  double stop_distance = -1.0;   // negative selects the engine default
  std::size_t trace_cap = 1000;  // per-seed traces above this are elided
};

struct ExperimentConfig {
  ModelConfig model;
  GeometryConfig geometry;
  MsaParameters msa;
  double ell_min = kDefaultEllMin;
  RunConfig run;
  WegnerConfig wegner;
  EmsaConfig emsa;
};

namespace detail {

inline void reject_unknown_keys(const Json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

inline const Json& need(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(where + ": missing required key '" + std::string(key) + "'");
  }
  return obj.at(key);
}

inline double need_number(const Json& obj, const std::string& where, const char* key) {
  const Json& v = need(obj, where, key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline double number_or(const Json& obj, const std::string& where, const char* key,
                        double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj.at(key).get<double>();
}

inline Config config_from_json(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(where + ": expected a nonempty integer array");
  }
  Config out;
  for (const auto& item : v) {
    if (!item.is_number_integer()) {
      throw ConfigError(where + ": expected integer coordinates");
    }
    out.push_back(item.get<int>());
  }
  return out;
}

inline int parse_displacement(const std::string& key, const std::string& where) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty()) {
    throw ConfigError(where + ": interaction key '" + key + "' is not an integer displacement");
  }
  return value;
}

}  // namespace detail

inline ModelConfig parse_model(const Json& j, const std::string& where) {
  detail::reject_unknown_keys(j, where,
                              {"particles", "lambda", "lambdas", "distribution", "interaction"});
  ModelConfig model;
  const Json& particles = detail::need(j, where, "particles");
  if (!particles.is_number_integer() || particles.get<int>() < 1) {
    throw ConfigError(where + ".particles: expected a positive integer");
  }
  model.particles = particles.get<int>();

  const bool single = j.contains("lambda");
  const bool sweep = j.contains("lambdas");
  if (single == sweep) {
    throw ConfigError(where + ": provide exactly one of 'lambda' and 'lambdas'");
  }
  if (single) {
    model.lambdas.push_back(detail::need_number(j, where, "lambda"));
  } else {
    const Json& values = j.at("lambdas");
    if (!values.is_array() || values.empty()) {
      throw ConfigError(where + ".lambdas: expected a nonempty number array");
    }
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError(where + ".lambdas: expected numbers");
      model.lambdas.push_back(v.get<double>());
    }
  }

  model.distribution =
      distribution_from_json(detail::need(j, where, "distribution"), where + ".distribution");

  if (j.contains("interaction")) {
    const Json& table = j.at("interaction");
    if (!table.is_object()) {
      throw ConfigError(where + ".interaction: expected an object of displacement -> value");
    }
    std::vector<std::pair<int, double>> entries;
    for (auto it = table.begin(); it != table.end(); ++it) {
      if (!it.value().is_number()) {
        throw ConfigError(where + ".interaction: values must be numbers");
      }
      entries.emplace_back(detail::parse_displacement(it.key(), where + ".interaction"),
                           it.value().get<double>());
    }
    model.interaction = InteractionPotential::from_pairs(entries);
  }
  return model;
}

inline GeometryConfig parse_geometry(const Json& j, const std::string& where) {
  detail::reject_unknown_keys(j, where, {"center", "ell", "L", "centers", "schedule"});
  GeometryConfig geometry;
  if (j.contains("center")) {
    geometry.center = detail::config_from_json(j.at("center"), where + ".center");
  }
  geometry.ell = detail::number_or(j, where, "ell", 0.0);
  if (j.contains("L")) {
    const Json& v = j.at("L");
    if (v.is_number()) {
      geometry.big_l.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& item : v) {
        if (!item.is_number()) throw ConfigError(where + ".L: expected numbers");
        geometry.big_l.push_back(item.get<double>());
      }
    } else {
      throw ConfigError(where + ".L: expected a number or a nonempty number array");
    }
  }
  if (j.contains("centers")) {
    const Json& v = j.at("centers");
    if (!v.is_array() || v.size() != 2) {
      throw ConfigError(where + ".centers: expected exactly two centers");
    }
    for (const auto& item : v) {
      geometry.centers.push_back(detail::config_from_json(item, where + ".centers"));
    }
  }
  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    const std::string sub = where + ".schedule";
    detail::reject_unknown_keys(s, sub, {"L0", "k_max", "p"});
    ScheduleInputs inputs;
    inputs.l0 = detail::need_number(s, sub, "L0");
    const Json& k_max = detail::need(s, sub, "k_max");
    if (!k_max.is_number_integer() || k_max.get<int>() < 0) {
      throw ConfigError(sub + ".k_max: expected a nonnegative integer");
    }
    inputs.k_max = k_max.get<int>();
    inputs.p = detail::number_or(s, sub, "p", 1.0);
    geometry.schedule = inputs;
  }
  return geometry;
}

inline RunConfig parse_run(const Json& j, const std::string& where) {
  detail::reject_unknown_keys(j, where,
                              {"experiment", "trials", "base_seed", "workers", "out", "cap"});
  RunConfig run;
  const Json& kind = detail::need(j, where, "experiment");
  if (!kind.is_string()) throw ConfigError(where + ".experiment: expected a string");
  run.kind = experiment_kind_from_string(kind.get<std::string>(), where + ".experiment");

  if (j.contains("trials")) {
    const Json& trials = j.at("trials");
    if (!trials.is_number_integer() || trials.get<std::int64_t>() < 1) {
      throw ConfigError(where + ".trials: expected a positive integer");
    }
    run.trials = trials.get<std::size_t>();
  }
  if (j.contains("base_seed")) {
    const Json& seed = j.at("base_seed");
    if (!seed.is_number_unsigned()) {
      throw ConfigError(where + ".base_seed: expected an unsigned integer");
    }
    run.base_seed = seed.get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    const Json& workers = j.at("workers");
    if (!workers.is_number_integer() || workers.get<int>() < 1) {
      throw ConfigError(where + ".workers: expected a positive integer");
    }
    run.workers = workers.get<int>();
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw ConfigError(where + ".out: expected a string");
    run.out_dir = j.at("out").get<std::string>();
  }
  if (j.contains("cap")) {
    const Json& cap = j.at("cap");
    if (!cap.is_number_integer() || cap.get<std::int64_t>() < 1) {
      throw ConfigError(where + ".cap: expected a positive integer");
    }
    run.cap = cap.get<std::size_t>();
  }
  return run;
}

// Per-experiment requirements, applied after the sections parse: pinning them
// here keeps the CLI's override path and the file path on one validator.
inline void validate_for_kind(const ExperimentConfig& config) {
  const std::string where = std::string("config(") + to_string(config.run.kind) + ")";
  const GeometryConfig& g = config.geometry;
  const bool needs_center = config.run.kind != ExperimentKind::wegner &&
                            config.run.kind != ExperimentKind::schedule;
  if (needs_center) {
    if (g.center.empty()) throw ConfigError(where + ": geometry.center is required");
    if (static_cast<int>(g.center.size()) != config.model.particles) {
      throw ConfigError(where + ": geometry.center has " + std::to_string(g.center.size()) +
                        " coordinates for " + std::to_string(config.model.particles) +
                        " particles");
    }
  }
  switch (config.run.kind) {
    case ExperimentKind::localize:
      if (g.big_l.empty()) throw ConfigError(where + ": geometry.L is required");
      break;
    case ExperimentKind::wegner:
      if (g.centers.size() != 2) throw ConfigError(where + ": geometry.centers is required");
      for (const Config& c : g.centers) {
        if (static_cast<int>(c.size()) != config.model.particles) {
          throw ConfigError(where + ": geometry.centers entries must have " +
                            std::to_string(config.model.particles) + " coordinates");
        }
      }
      if (!(g.ell >= 1.0)) {
        throw ConfigError(where + ": geometry.ell >= 1 is required");
      }
      if (config.wegner.s_grid.empty()) {
        throw ConfigError(where + ": wegner.s_grid is required");
      }
      if (config.model.lambdas.size() != 1) {
        throw ConfigError(where + ": wegner runs a single lambda");
      }
      break;
    case ExperimentKind::emsa:
      if (!(g.ell >= 1.0)) throw ConfigError(where + ": geometry.ell >= 1 is required");
      if (!g.big_l.empty()) {
        throw ConfigError(where + ": emsa derives L = ell^gamma; remove geometry.L");
      }
      if (config.model.lambdas.size() != 1) {
        throw ConfigError(where + ": emsa runs a single lambda");
      }
      break;
    case ExperimentKind::schedule:
      if (!g.schedule) throw ConfigError(where + ": geometry.schedule is required");
      break;
    case ExperimentKind::geometry:
      if (!(g.ell >= 1.0)) throw ConfigError(where + ": geometry.ell >= 1 is required");
      if (g.big_l.size() != 1) throw ConfigError(where + ": geometry.L (single) is required");
      break;
  }
}

inline ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document is not an object");
  detail::reject_unknown_keys(doc, "config",
                              {"model", "geometry", "msa", "run", "wegner", "emsa"});
  ExperimentConfig config;
  config.model = parse_model(detail::need(doc, "config", "model"), "config.model");
  config.geometry = parse_geometry(detail::need(doc, "config", "geometry"), "config.geometry");

  if (doc.contains("msa")) {
    const Json& msa = doc.at("msa");
    detail::reject_unknown_keys(msa, "config.msa", {"beta", "tau", "gamma", "m", "ell_min"});
    config.msa.beta = detail::number_or(msa, "config.msa", "beta", config.msa.beta);
    config.msa.tau = detail::number_or(msa, "config.msa", "tau", config.msa.tau);
    config.msa.gamma = detail::number_or(msa, "config.msa", "gamma", config.msa.gamma);
    config.msa.m = detail::number_or(msa, "config.msa", "m", config.msa.m);
    config.ell_min = detail::number_or(msa, "config.msa", "ell_min", config.ell_min);
  }
  validate_msa_parameters(config.msa);

  config.run = parse_run(detail::need(doc, "config", "run"), "config.run");

  if (doc.contains("wegner")) {
    const Json& w = doc.at("wegner");
    detail::reject_unknown_keys(w, "config.wegner", {"s_grid"});
    const Json& grid = detail::need(w, "config.wegner", "s_grid");
    if (!grid.is_array() || grid.empty()) {
      throw ConfigError("config.wegner.s_grid: expected a nonempty number array");
    }
    for (const auto& v : grid) {
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw ConfigError("config.wegner.s_grid: expected nonnegative numbers");
      }
      config.wegner.s_grid.push_back(v.get<double>());
    }
  }

  if (doc.contains("emsa")) {
    const Json& e = doc.at("emsa");
    detail::reject_unknown_keys(e, "config.emsa",
                                {"schedule_only", "stop_distance", "trace_cap"});
    if (e.contains("schedule_only")) {
      if (!e.at("schedule_only").is_boolean()) {
        throw ConfigError("config.emsa.schedule_only: expected a boolean");
      }
      config.emsa.schedule_only = e.at("schedule_only").get<bool>();
    }
    config.emsa.stop_distance =
        detail::number_or(e, "config.emsa", "stop_distance", config.emsa.stop_distance);
    if (e.contains("trace_cap")) {
      const Json& cap = e.at("trace_cap");
      if (!cap.is_number_integer() || cap.get<std::int64_t>() < 0) {
        throw ConfigError("config.emsa.trace_cap: expected a nonnegative integer");
      }
      config.emsa.trace_cap = cap.get<std::size_t>();
    }
  }

  validate_for_kind(config);
  return config;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace mpal
