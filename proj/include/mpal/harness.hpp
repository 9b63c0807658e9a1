#pragma once
// Experiment drivers: deterministic Monte Carlo orchestration over seeds,
// aggregation, and CSV/JSON emission. All emitted artifacts are functions of
// (config, base_seed) alone; wall times are logged, never serialized.

#include <chrono>
#include <string>
#include <vector>

#include "mpal/config.hpp"
#include "mpal/engine.hpp"
#include "mpal/io.hpp"
#include "mpal/localization.hpp"
#include "mpal/parallel.hpp"

namespace mpal {

inline constexpr const char* kEmsaSchema = "mpal.emsa.v1";
inline constexpr const char* kEmsaSummarySchema = "mpal.emsa-summary.v1";
inline constexpr const char* kScheduleSchema = "mpal.schedule.v1";

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void check_cap(const SymmetricSet& theta, std::size_t cap, const std::string& what) {
  if (theta.size() > cap) {
    throw ConfigError(what + " has " + std::to_string(theta.size()) +
                      " configurations, above the cap " + std::to_string(cap));
  }
}

inline Json config_to_json_array(const Config& c) {
  Json out = Json::array();
  for (int x : c) out.push_back(x);
  return out;
}

}  // namespace detail

// ---------- localization probability ----------

// Per-trial certificate summary; the wall time is diagnostic only.
struct LocalizationTrial {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  double worst_margin = kInfinity;  // min margin over the certified basis
  double wall_seconds = 0.0;
};

// One (L, lambda) sweep cell with its Monte Carlo aggregate.
struct LocalizationCell {
  int n = 0;
  double big_l = 0.0;
  double lambda = 0.0;
  double m = 0.0;
  std::size_t trials = 0;
  std::size_t passes = 0;
  double p_hat = 0.0;
  Interval ci;
  std::vector<LocalizationTrial> detail;
};

struct LocalizationRun {
  std::vector<LocalizationCell> cells;
};

// Fraction of trials whose cube certificate passes, per requested (L,
// lambda). Trial t draws seed split(base_seed, t) for every cell, so a sweep
// compares the same realizations across lambda.
inline LocalizationRun run_localization_probability(const ExperimentConfig& config) {
  const ModelConfig& model = config.model;
  const RunConfig& run = config.run;
  LocalizationRun out;
  for (double big_l : config.geometry.big_l) {
    const SymmetricSet theta = enumerate_cube(make_cube(config.geometry.center, big_l));
    detail::check_cap(theta, run.cap,
                      "localize: cube at L = " + format_g17(big_l));
    const std::vector<int> sites = project_sites(theta);
    for (double lambda : model.lambdas) {
      LocalizationCell cell;
      cell.n = model.particles;
      cell.big_l = big_l;
      cell.lambda = lambda;
      cell.m = config.msa.m;
      cell.trials = run.trials;
      cell.detail = run_indexed<LocalizationTrial>(
          run.trials, run.workers, [&](std::size_t t) {
            const auto start = std::chrono::steady_clock::now();
            LocalizationTrial trial;
            trial.index = t;
            trial.seed = rng::split(run.base_seed, t);
            const DisorderRealization real =
                sample_disorder(trial.seed, sites, model.distribution);
            const AssembledHamiltonian h =
                assemble(theta, real, lambda, model.interaction, run.cap);
            const Eigensystem es = eigensystem(h);
            const CubeCertificate cert =
                certify_cube(es, h, config.msa.m, big_l, config.msa.tau);
            trial.pass = cert.pass;
            for (const LocalizationCertificate& v : cert.vectors) {
              trial.worst_margin = std::min(trial.worst_margin, v.margin);
            }
            trial.wall_seconds = detail::seconds_since(start);
            log_debug("localize trial " + std::to_string(t) + " lambda " +
                            format_g17(lambda) + (trial.pass ? " pass" : " fail"));
            return trial;
          });
      for (const LocalizationTrial& trial : cell.detail) {
        if (trial.pass) ++cell.passes;
      }
      cell.p_hat = cell.trials == 0
                       ? 0.0
                       : static_cast<double>(cell.passes) / static_cast<double>(cell.trials);
      cell.ci = wilson95(cell.passes, cell.trials);
      log_info("localize L " + format_g17(big_l) + " lambda " + format_g17(lambda) +
                      ": " + std::to_string(cell.passes) + "/" + std::to_string(cell.trials));
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

inline std::string localization_csv(const LocalizationRun& run) {
  std::vector<std::vector<std::string>> rows;
  for (const LocalizationCell& cell : run.cells) {
    rows.push_back({csv_cell(cell.n), csv_cell(cell.big_l), csv_cell(cell.lambda),
                    csv_cell(cell.m), csv_cell(cell.trials), csv_cell(cell.passes),
                    csv_cell(cell.p_hat), csv_cell(cell.ci.lo), csv_cell(cell.ci.hi)});
  }
  return csv_string(
      {"N", "L", "lambda", "m", "trials", "passes", "p_hat", "ci_lo", "ci_hi"}, rows);
}

// ---------- wegner ----------

struct WegnerRun {
  std::vector<WegnerRow> rows;
};

// Empirical CDF of the spectral distance between the two configured windows.
// The 8N max-diameter precondition is enforced by wegner_empirical itself.
inline WegnerRun run_wegner(const ExperimentConfig& config) {
  const GeometryConfig& g = config.geometry;
  const SymmetricSet theta1 = enumerate_cube(make_cube(g.centers[0], g.ell));
  const SymmetricSet theta2 = enumerate_cube(make_cube(g.centers[1], g.ell));
  detail::check_cap(theta1, config.run.cap, "wegner: first window");
  detail::check_cap(theta2, config.run.cap, "wegner: second window");
  WegnerRun out;
  out.rows = wegner_empirical(theta1, theta2, config.model.lambdas.front(),
                              config.model.interaction, config.model.distribution,
                              config.wegner.s_grid, config.run.trials, config.run.base_seed,
                              config.run.cap);
  log_info("wegner: " + std::to_string(out.rows.size()) + " grid rows over " +
                  std::to_string(config.run.trials) + " trials");
  return out;
}

inline std::string wegner_csv(const WegnerRun& run) {
  std::vector<std::vector<std::string>> rows;
  for (const WegnerRow& row : run.rows) {
    rows.push_back(
        {csv_cell(row.s), csv_cell(row.fraction), csv_cell(row.ci.lo), csv_cell(row.ci.hi)});
  }
  return csv_string({"s", "fraction", "ci_lo", "ci_hi"}, rows);
}

// ---------- schedules ----------

// Scale and decay recursion tables for the configured parameters. Inputs
// default to L0 = max(ell, 2), k_max = 5, p = 1 when the config omits the
// schedule block (the emsa reports embed these tables).
inline Json schedule_tables_json(const ExperimentConfig& config) {
  ScheduleInputs inputs;
  if (config.geometry.schedule) {
    inputs = *config.geometry.schedule;
  } else {
    inputs.l0 = std::max(config.geometry.ell, 2.0);
  }
  const int n = config.model.particles;
  const ScaleSchedule scale = scale_schedule(inputs.l0, config.msa.gamma, config.msa.m, n,
                                             config.msa, inputs.k_max);
  const DecaySchedule decay = decay_parameter_schedule(inputs.p, n, config.msa.gamma);

  Json tables = Json::object();
  Json scale_json = Json::object();
  scale_json["L0"] = inputs.l0;
  scale_json["gamma"] = config.msa.gamma;
  scale_json["m"] = config.msa.m;
  scale_json["particles"] = n;
  Json rows = Json::array();
  for (const ScaleRow& row : scale.rows) {
    Json r = Json::object();
    r["k"] = row.k;
    r["L"] = row.L;
    r["log10_L"] = row.log10_L;
    r["m"] = row.m;
    r["M"] = row.M;
    rows.push_back(r);
  }
  scale_json["rows"] = rows;
  scale_json["m_limit"] = scale.m_limit;
  scale_json["first_invalid_scale"] =
      scale.first_invalid_scale ? Json(*scale.first_invalid_scale) : Json(nullptr);
  scale_json["mass_positive"] = scale.mass_positive();
  tables["scale_schedule"] = scale_json;

  Json decay_json = Json::object();
  decay_json["p_input"] = inputs.p;
  decay_json["gamma"] = config.msa.gamma;
  decay_json["particles"] = n;
  decay_json["p"] = decay.p;
  decay_json["p_star"] = decay.p_star;
  decay_json["seed_hypothesis_met"] = decay.seed_hypothesis_met;
  decay_json["chain_ok"] = decay.chain_ok;
  decay_json["p_star_bound_ok"] = decay.p_star_bound_ok;
  tables["decay_schedule"] = decay_json;
  return tables;
}

inline std::string schedule_scale_csv(const ExperimentConfig& config) {
  const Json tables = schedule_tables_json(config);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : tables["scale_schedule"]["rows"]) {
    rows.push_back({csv_cell(r["k"].get<int>()), csv_cell(r["L"].get<double>()),
                    csv_cell(r["log10_L"].get<double>()), csv_cell(r["m"].get<double>()),
                    csv_cell(r["M"].get<double>())});
  }
  return csv_string({"k", "L", "log10_L", "m", "M"}, rows);
}

inline std::string schedule_decay_csv(const ExperimentConfig& config) {
  const Json tables = schedule_tables_json(config);
  std::vector<std::vector<std::string>> rows;
  int n = 1;
  for (const auto& p : tables["decay_schedule"]["p"]) {
    rows.push_back({csv_cell(n), csv_cell(p.get<double>())});
    ++n;
  }
  return csv_string({"n", "p"}, rows);
}

// ---------- emsa ----------

inline Json iteration_step_json(const IterationStep& step) {
  Json j = Json::object();
  j["y"] = detail::config_to_json_array(step.y);
  j["kind"] = step.kind == StepKind::good ? "good" : "bad";
  j["gain"] = step.gain;
  j["distance"] = step.distance;
  j["value"] = step.value;
  j["allowance"] = step.allowance;
  j["buffer_distance"] = step.buffer_distance;
  j["overlap"] = step.overlap;
  j["ok"] = step.ok;
  return j;
}

inline Json iteration_trace_json(const IterationTrace& trace) {
  Json j = Json::object();
  j["applicable"] = trace.applicable;
  if (!trace.applicable) j["reason"] = trace.reason;
  j["y0"] = detail::config_to_json_array(trace.y0);
  j["x_mu"] = detail::config_to_json_array(trace.x_mu);
  j["theta_mu_center"] = detail::config_to_json_array(trace.theta_mu_center);
  j["theta_mu_is_upsilon"] = trace.theta_mu_is_upsilon;
  j["resonance"] = trace.resonance;
  j["stop_distance"] = trace.stop_distance;
  j["m_prime"] = trace.m_prime;
  j["M"] = trace.M;
  j["m_applicable"] = trace.m_applicable;
  j["product_gain"] = trace.product_gain;
  j["chain_allowance"] = trace.chain_allowance;
  j["chain_lhs"] = trace.chain_lhs;
  j["chain_rhs"] = trace.chain_rhs;
  j["sum_good_distance"] = trace.sum_good_distance;
  j["pass"] = trace.pass;
  Json steps = Json::array();
  for (const IterationStep& step : trace.steps) steps.push_back(iteration_step_json(step));
  j["steps"] = steps;
  j["y_final"] = detail::config_to_json_array(trace.y_final);
  return j;
}

inline Json lemma_tally_json(const LemmaTally& tally) {
  Json j = Json::object();
  j["checked"] = tally.checked;
  j["applicable"] = tally.applicable;
  j["passed"] = tally.passed;
  return j;
}

// Canonical per-realization report: events, per-lemma tallies, traces
// (elided above the configured cap), and the schedule tables.
inline Json emsa_report_json(const ExperimentConfig& config, const EmsaSeedReport& report) {
  const double big_l = std::pow(config.geometry.ell, config.msa.gamma);
  Json j = Json::object();
  j["schema"] = kEmsaSchema;
  j["seed"] = report.seed;
  j["particles"] = config.model.particles;
  j["ell"] = config.geometry.ell;
  j["L"] = big_l;
  j["lambda"] = config.model.lambdas.front();
  j["m"] = config.msa.m;
  j["bad_center"] = detail::config_to_json_array(report.bad_center);

  Json events = Json::object();
  events["e_pi"] = report.events.e_pi;
  events["e_fi"] = report.events.e_fi;
  events["e_nr"] = report.events.e_nr;
  events["good"] = report.events.good();
  events["failed_pi"] = report.events.failed_pi.size();
  events["failed_fi"] = report.events.failed_fi.size();
  events["failed_nr"] = report.events.failed_nr.size();
  j["events"] = events;

  Json lemmas = Json::object();
  lemmas["local_decay"] = lemma_tally_json(report.local_decay);
  lemmas["crude"] = lemma_tally_json(report.crude);
  lemmas["buffered"] = lemma_tally_json(report.buffered);
  lemmas["traces"] = lemma_tally_json(report.traces);
  j["lemmas"] = lemmas;
  j["divergences"] = report.divergences;

  if (report.trace_list.size() > config.emsa.trace_cap) {
    j["traces_elided"] = report.trace_list.size();
  } else {
    Json traces = Json::array();
    for (const IterationTrace& trace : report.trace_list) {
      traces.push_back(iteration_trace_json(trace));
    }
    j["traces"] = traces;
  }
  j["schedule_tables"] = schedule_tables_json(config);
  return j;
}

// Runs one raw seed and returns its canonical report document. run_emsa
// derives per-trial seeds as split(base_seed, t) and feeds them here, so
// rerunning a seed taken from a written report reproduces it byte for byte.
inline std::string emsa_seed_json(const ExperimentConfig& config, std::uint64_t seed) {
  const EmsaSeedReport report = run_emsa_seed(
      seed, config.geometry.center, config.geometry.ell, -1.0, config.model.lambdas.front(),
      config.model.distribution, config.model.interaction, config.msa, config.msa.m,
      config.ell_min, config.emsa.stop_distance, config.run.cap);
  return dump_json(emsa_report_json(config, report));
}

struct EmsaTrial {
  EmsaSeedReport report;
  std::string json;
  double wall_seconds = 0.0;
};

struct EmsaRun {
  std::vector<EmsaTrial> trials;
  LemmaTally local_decay;
  LemmaTally crude;
  LemmaTally buffered;
  LemmaTally traces;
  int divergences = 0;
  std::size_t good_events = 0;
};

inline EmsaRun run_emsa(const ExperimentConfig& config) {
  EmsaRun out;
  if (config.emsa.schedule_only) {
    log_info("emsa: schedule-only mode, no diagonalization");
    return out;
  }
  const double big_l = std::pow(config.geometry.ell, config.msa.gamma);
  const SymmetricSet big = enumerate_cube(make_cube(config.geometry.center, big_l));
  detail::check_cap(big, config.run.cap, "emsa: cube at L = ell^gamma = " + format_g17(big_l));

  out.trials = run_indexed<EmsaTrial>(
      config.run.trials, config.run.workers, [&](std::size_t t) {
        const auto start = std::chrono::steady_clock::now();
        EmsaTrial trial;
        const std::uint64_t seed = rng::split(config.run.base_seed, t);
        trial.report = run_emsa_seed(seed, config.geometry.center, config.geometry.ell, -1.0,
                                     config.model.lambdas.front(), config.model.distribution,
                                     config.model.interaction, config.msa, config.msa.m,
                                     config.ell_min, config.emsa.stop_distance, config.run.cap);
        trial.json = dump_json(emsa_report_json(config, trial.report));
        trial.wall_seconds = detail::seconds_since(start);
        log_debug("emsa seed " + std::to_string(seed) +
                        (trial.report.events.good() ? ": good event" : ": bad event"));
        return trial;
      });

  auto accumulate = [](LemmaTally& total, const LemmaTally& part) {
    total.checked += part.checked;
    total.applicable += part.applicable;
    total.passed += part.passed;
  };
  for (const EmsaTrial& trial : out.trials) {
    accumulate(out.local_decay, trial.report.local_decay);
    accumulate(out.crude, trial.report.crude);
    accumulate(out.buffered, trial.report.buffered);
    accumulate(out.traces, trial.report.traces);
    out.divergences += trial.report.divergences;
    if (trial.report.events.good()) ++out.good_events;
  }
  log_info("emsa: " + std::to_string(out.good_events) + "/" +
                  std::to_string(out.trials.size()) + " good events");
  return out;
}

inline std::string emsa_aggregate_csv(const EmsaRun& run) {
  std::vector<std::vector<std::string>> rows;
  for (const EmsaTrial& trial : run.trials) {
    const EmsaSeedReport& r = trial.report;
    rows.push_back({csv_cell(r.seed), config_to_string(r.bad_center),
                    csv_cell(static_cast<int>(r.events.e_pi)),
                    csv_cell(static_cast<int>(r.events.e_fi)),
                    csv_cell(static_cast<int>(r.events.e_nr)),
                    csv_cell(static_cast<int>(r.events.good())),
                    csv_cell(r.local_decay.checked), csv_cell(r.local_decay.applicable),
                    csv_cell(r.local_decay.passed), csv_cell(r.crude.checked),
                    csv_cell(r.crude.applicable), csv_cell(r.crude.passed),
                    csv_cell(r.buffered.checked), csv_cell(r.buffered.applicable),
                    csv_cell(r.buffered.passed), csv_cell(r.traces.checked),
                    csv_cell(r.traces.applicable), csv_cell(r.traces.passed),
                    csv_cell(r.divergences)});
  }
  return csv_string(
      {"seed", "bad_center", "e_pi", "e_fi", "e_nr", "good_event", "local_checked",
       "local_applicable", "local_passed", "crude_checked", "crude_applicable", "crude_passed",
       "buffered_checked", "buffered_applicable", "buffered_passed", "traces_checked",
       "traces_applicable", "traces_passed", "divergences"},
      rows);
}

inline Json emsa_summary_json(const ExperimentConfig& config, const EmsaRun& run) {
  Json j = Json::object();
  j["schema"] = kEmsaSummarySchema;
  j["seeds"] = run.trials.size();
  j["good_events"] = run.good_events;
  Json lemmas = Json::object();
  lemmas["local_decay"] = lemma_tally_json(run.local_decay);
  lemmas["crude"] = lemma_tally_json(run.crude);
  lemmas["buffered"] = lemma_tally_json(run.buffered);
  lemmas["traces"] = lemma_tally_json(run.traces);
  j["lemmas"] = lemmas;
  j["divergences"] = run.divergences;
  j["schedule_tables"] = schedule_tables_json(config);
  return j;
}

// ---------- geometry dump ----------

// Line-oriented debug text: one configuration per line, coordinates
// space-separated; section markers start with '#'.
inline std::string geometry_text(const ExperimentConfig& config) {
  const GeometryConfig& g = config.geometry;
  const double big_l = g.big_l.front();
  const Cover cover = make_cover(g.center, big_l, g.ell);
  const SymmetricSet& big = cover.big_set;
  detail::check_cap(big, config.run.cap, "geometry: cube at L = " + format_g17(big_l));

  std::string out;
  out += "# cube center " + config_to_string(g.center) + " half-width " + format_g17(big_l) +
         ": " + std::to_string(big.size()) + " configurations\n";
  for (const Config& x : big.expand()) out += config_to_string(x) + "\n";

  out += "# cover ell " + format_g17(cover.small_half_width) + ": " +
         std::to_string(cover.centers.size()) + " centers\n";
  for (const Config& a : cover.centers) out += config_to_string(a) + "\n";

  const Config& first = cover.centers.front();
  const SymmetricSet phi = enumerate_cube(cover_cube(cover, first));
  const BoundaryEdgeSet edge = boundary(phi, big);
  out += "# boundary of the cover cube at " + config_to_string(first) + ": " +
         std::to_string(edge.interior.size()) + " interior, " +
         std::to_string(edge.exterior.size()) + " exterior\n";
  out += "# interior\n";
  for (const Config& x : edge.interior.expand()) out += config_to_string(x) + "\n";
  out += "# exterior\n";
  for (const Config& x : edge.exterior.expand()) out += config_to_string(x) + "\n";
  return out;
}

// ---------- file emission ----------

inline std::filesystem::path ensure_out_dir(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.run.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  return dir;
}

inline void write_localization(const ExperimentConfig& config, const LocalizationRun& run) {
  write_file(ensure_out_dir(config) / "localization.csv", localization_csv(run));
}

inline void write_wegner(const ExperimentConfig& config, const WegnerRun& run) {
  write_file(ensure_out_dir(config) / "wegner.csv", wegner_csv(run));
}

inline void write_schedule(const ExperimentConfig& config) {
  const std::filesystem::path dir = ensure_out_dir(config);
  write_file(dir / "scale.csv", schedule_scale_csv(config));
  write_file(dir / "decay.csv", schedule_decay_csv(config));
  Json j = Json::object();
  j["schema"] = kScheduleSchema;
  j["tables"] = schedule_tables_json(config);
  write_file(dir / "schedule.json", dump_json(j));
}

inline void write_emsa(const ExperimentConfig& config, const EmsaRun& run) {
  const std::filesystem::path dir = ensure_out_dir(config);
  if (config.emsa.schedule_only) {
    write_schedule(config);
    return;
  }
  for (const EmsaTrial& trial : run.trials) {
    write_file(dir / ("seed_" + std::to_string(trial.report.seed) + ".json"), trial.json);
  }
  write_file(dir / "aggregate.csv", emsa_aggregate_csv(run));
  write_file(dir / "summary.json", dump_json(emsa_summary_json(config, run)));
}

}  // namespace mpal
