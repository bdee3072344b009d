#pragma once

// Command-line front end. `run_cli` is the whole program; the executable in
// tools/ only forwards argv and the standard streams.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfp/analysis.hpp"
#include "sfp/errors.hpp"
#include "sfp/fitting.hpp"
#include "sfp/generators.hpp"
#include "sfp/io.hpp"
#include "sfp/population.hpp"
#include "sfp/temporal.hpp"
#include "sfp/verify.hpp"

namespace sfp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parameter:
    case ErrorKind::domain:
    case ErrorKind::not_found: return kUsage;
    case ErrorKind::numeric: return kNumeric;
    default: return kData;
  }
}

inline constexpr std::uint64_t kDefaultSeed = 1;

/// --seed, else $SFP_SEED, else kDefaultSeed.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SFP_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 10);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("SFP_SEED is not an unsigned integer");
  }
  return kDefaultSeed;
}

namespace detail {

// Runs `emit` against the requested file, or against `out` when none given.
inline void with_output(const std::string& path, std::ostream& out,
                        const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(out);
    return;
  }
  auto f = io::open_out(path);
  emit(f);
}

inline const EventSeries& find_individual(const std::vector<EventSeries>& all,
                                          const std::string& id) {
  for (const auto& s : all)
    if (s.individual_id() == id) return s;
  throw NotFoundError("individual '" + id + "' not in input");
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-feeding process generators and inter-event time analysis", "sfp"};
  app.require_subcommand(1);

  std::string output;
  std::optional<std::uint64_t> seed;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", output, "Output file (default: stdout)");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed (fallback: $SFP_SEED, then 1)");
  };

  // generate
  std::string model_name = "sfp";
  double mu = 0.0, rho = 1.0, theta = 0.0, legacy_c = 0.0, legacy_a = 1.0, beta = 0.0;
  std::size_t n = 0;
  bool multi = false, round_up_flag = false;
  MultiRecipient multi_opts;
  std::string gen_id = "g0";
  auto* gen = app.add_subcommand("generate", "Generate one individual's events");
  gen->add_option("--model", model_name, "sfp | sfp-star | legacy | pp")
      ->check(CLI::IsMember({"sfp", "sfp-star", "legacy", "pp"}));
  gen->add_option("--mu", mu, "Target median gap in seconds");
  gen->add_option("--rho", rho, "Odds-ratio slope (sfp only)");
  gen->add_option("--n", n, "Number of gaps")->required();
  gen->add_option("--theta", theta, "Dial overhead added to each gap, seconds");
  gen->add_flag("--multi", multi, "Expand events to multiple recipients");
  gen->add_option("--recipient-mean", multi_opts.recipient_mean, "Mean recipients per event");
  gen->add_option("--delay-mean", multi_opts.delay_mean, "Mean delay of extra copies, seconds");
  gen->add_option("--c", legacy_c, "Location constant C (legacy)");
  gen->add_option("--a", legacy_a, "Exponent a (legacy)");
  gen->add_option("--beta", beta, "Mean gap for pp (default: --mu)");
  gen->add_option("--id", gen_id, "Individual id written to the CSV");
  gen->add_flag("--round-up", round_up_flag, "Round gaps up to whole seconds");
  add_seed(gen);
  add_output(gen);

  // fit
  std::string input;
  std::size_t min_events = kDefaultMinEvents;
  bool log_acf = false;
  auto* fit = app.add_subcommand("fit", "Fit the odds-ratio power law per individual");
  fit->add_option("--input", input, "Events CSV")->required();
  fit->add_option("--min-events", min_events, "Skip individuals with fewer events");
  fit->add_flag("--log-acf", log_acf, "Autocorrelation test on log gaps");
  add_output(fit);

  // or-curve
  std::string individual;
  auto* orc = app.add_subcommand("or-curve", "Per-percentile odds-ratio curve of one individual");
  orc->add_option("--input", input, "Events CSV")->required();
  orc->add_option("--individual", individual, "Individual id")->required();
  orc->add_option("--min-events", min_events, "Minimum gaps for the curve");
  add_output(orc);

  // acf
  std::size_t max_lag = 10;
  auto* acf = app.add_subcommand("acf", "Autocorrelation of gaps with the 95% white-noise band");
  acf->add_option("--input", input, "Events CSV")->required();
  acf->add_option("--individual", individual, "Only this individual");
  acf->add_option("--max-lag", max_lag, "Largest lag");
  acf->add_flag("--log", log_acf, "Use log gaps");
  add_output(acf);

  // population-fit
  std::string fits_path, system_name = "fitted";
  auto* pop = app.add_subcommand("population-fit", "Fit the bivariate Gaussian over (rho, log mu)");
  pop->add_option("--fits", fits_path, "Fits CSV")->required();
  pop->add_option("--min-events", min_events, "Minimum events per individual");
  pop->add_option("--system", system_name, "Name stored in the model");
  add_output(pop);

  // synth
  std::string synth_system, model_path;
  std::size_t individuals = 0;
  double window_days = 30.0;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic multi-individual dataset");
  auto* sys_opt = syn->add_option("--system", synth_system, "Built-in system name");
  auto* mod_opt = syn->add_option("--model", model_path, "Model JSON");
  sys_opt->excludes(mod_opt);
  syn->add_option("--individuals", individuals, "Number of individuals")->required();
  syn->add_option("--window-days", window_days, "Observation window in days");
  add_seed(syn);
  add_output(syn);

  // anomaly
  double d2_threshold = kDefaultD2Threshold, r2_threshold = kDefaultR2Threshold;
  auto* ano = app.add_subcommand("anomaly", "Label individuals A1/A2/A3 against a population");
  ano->add_option("--fits", fits_path, "Fits CSV")->required();
  ano->add_option("--model", model_path, "Model JSON")->required();
  ano->add_option("--d2-threshold", d2_threshold, "Mahalanobis D^2 outlier threshold");
  ano->add_option("--r2-threshold", r2_threshold, "Minimum R^2 of a good fit");
  add_output(ano);

  // verify
  bool fast = false;
  auto* ver = app.add_subcommand("verify", "Run the stationary-law and calibration checks");
  ver->add_flag("--fast", fast, "Reduced sample counts");
  add_seed(ver);
  add_output(ver);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("sfp");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      SfpConfig cfg;
      cfg.n = n;
      cfg.mu = mu;
      cfg.rho = rho;
      cfg.theta = theta;
      cfg.round_up = round_up_flag;
      if (multi) cfg.multi = multi_opts;
      if (model_name == "sfp") {
        cfg.variant = variant::General{};
      } else if (model_name == "sfp-star") {
        cfg.variant = variant::Star{};
      } else if (model_name == "legacy") {
        cfg.variant = variant::Legacy{legacy_c > 0.0 ? legacy_c : mu / std::numbers::e, legacy_a};
      } else {
        cfg.variant = variant::Poisson{beta > 0.0 ? beta : mu};
      }
      RandomSource rng(resolve_seed(seed));
      const auto gaps = generate(cfg, rng);
      const std::vector<EventSeries> ev{intervals_to_timestamps(gaps, 0.0, gen_id)};
      detail::with_output(output, out, [&](std::ostream& o) { io::write_events(ev, o); });
    } else if (fit->parsed()) {
      const auto series = io::ingest_events(input, &err);
      FitOptions opts;
      opts.min_points = std::max<std::size_t>(min_events, 2) - 1;
      opts.log_space_acf = log_acf;
      std::vector<FitResult> fits;
      for (const auto& s : series) {
        if (s.size() < std::max<std::size_t>(min_events, 3)) continue;
        try {
          fits.push_back(fit_individual(s, opts));
        } catch (const DegenerateDataError& e) {
          err << "warning: skipping '" << s.individual_id() << "': " << e.what() << '\n';
        }
      }
      detail::with_output(output, out, [&](std::ostream& o) { io::write_fits(fits, o); });
    } else if (orc->parsed()) {
      const auto series = io::ingest_events(input, &err);
      const auto& s = detail::find_individual(series, individual);
      const auto curve = or_curve(inter_event_times(s), std::max<std::size_t>(min_events, 2) - 1);
      detail::with_output(output, out, [&](std::ostream& o) { io::write_or_curve(curve, o); });
    } else if (acf->parsed()) {
      const auto series = io::ingest_events(input, &err);
      detail::with_output(output, out, [&](std::ostream& o) {
        o << io::kAcfHeader << '\n';
        for (const auto& s : series) {
          if (!individual.empty() && s.individual_id() != individual) continue;
          if (s.size() < max_lag + 2) {
            if (!individual.empty()) throw InsufficientDataError("series shorter than max_lag + 2");
            continue;
          }
          io::write_acf(s.individual_id(), autocorrelation(inter_event_times(s), max_lag, log_acf),
                        o, false);
        }
        if (!individual.empty()) detail::find_individual(series, individual);
      });
    } else if (pop->parsed()) {
      const auto fits = io::read_fits(fits_path);
      const auto model = fit_population(fits, min_events, system_name);
      detail::with_output(output, out, [&](std::ostream& o) { io::write_model(model, o); });
    } else if (syn->parsed()) {
      if (synth_system.empty() == model_path.empty())
        throw ParameterError("synth needs exactly one of --system or --model");
      SyntheticDatasetSpec spec;
      if (!synth_system.empty()) spec.system = builtin_system(synth_system).system_name;
      else spec.system = io::read_model(model_path);
      spec.n_individuals = individuals;
      spec.window_T = window_days * 86400.0;
      RandomSource rng(resolve_seed(seed));
      const auto data = generate_dataset(spec, rng);
      detail::with_output(output, out, [&](std::ostream& o) { io::write_events(data, o); });
    } else if (ano->parsed()) {
      const auto fits = io::read_fits(fits_path);
      const auto model = io::read_model(model_path);
      std::vector<AnomalyReport> reports;
      reports.reserve(fits.size());
      for (const auto& f : fits) reports.push_back(classify_anomaly(f, model, d2_threshold, r2_threshold));
      detail::with_output(output, out, [&](std::ostream& o) { io::write_anomalies(reports, o); });
    } else if (ver->parsed()) {
      const auto report = run_verification({fast, resolve_seed(seed)});
      detail::with_output(output, out, [&](std::ostream& o) {
        o << report.to_json().dump(2) << '\n';
        io::finish(o);
      });
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}

}  // namespace sfp::cli
