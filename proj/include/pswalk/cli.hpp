#pragma once

// Batch front end: parses run configurations, orchestrates the
// simulate / optimize / compare / decohere commands, and emits CSV, JSON,
// and static SVG outputs.  Exit codes: 0 ok, 2 config error, 3 numerical
// failure.  All outputs are deterministic for a fixed config and seed
// (no timestamps), so repeated runs are byte-identical.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pswalk/errors.hpp"
#include "pswalk/io.hpp"
#include "pswalk/metrics.hpp"
#include "pswalk/optimizer.hpp"
#include "pswalk/walk.hpp"

namespace pswalk {

// Flag values shared by every subcommand.  A value of -1 (or empty string)
// means "not given on the command line"; file values apply then.
struct CommonFlags {
  std::string config_path;
  std::string out_dir = "pswalk_out";
  long long seed = -1;
  int jobs = 1;
  int steps = -1;
  int restarts = -1;
  bool r_sweep = false;
  std::string p_list;
};

namespace detail {

inline RunSettings load_settings(const CommonFlags& flags) {
  RunSettings rs = parse_config_file(flags.config_path);
  if (flags.seed >= 0) rs.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.steps >= 0) rs.cfg.steps = flags.steps;
  if (flags.restarts >= 1) rs.restarts = flags.restarts;
  rs.cfg.validate();
  if (const auto warning = rs.cfg.admissibility_warning()) {
    std::cerr << "warning: " << *warning << "\n";
  }
  return rs;
}

inline std::filesystem::path prepare_out_dir(const CommonFlags& flags) {
  const std::filesystem::path dir(flags.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// The target ("approximated") dynamics every command compares against: the
// standard walk at the nominal frequencies for the config's r and d.
inline WalkConfig target_config(const WalkConfig& cfg) {
  WalkConfig target = cfg;
  target.g_tau = cfg.nominal_g_tau();
  target.omega_tau = WalkConfig::nominal_omega_tau();
  target.dephasing_p = 0.0;
  return target;
}

inline std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> ps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    ps.push_back(parse_double("p-list", item));
  }
  if (ps.empty()) throw ConfigError("--p-list: no values given");
  for (const double p : ps) {
    if (p < 0.0 || p > 1.0) {
      throw ConfigError("--p-list: values must lie in [0, 1]");
    }
  }
  return ps;
}

inline std::vector<double> step_axis(size_t n) {
  std::vector<double> xs(n);
  for (size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i);
  return xs;
}

// Default fit window [1, floor(d/4)] clamped to the available horizon.
inline std::pair<int, int> default_fit_window(int d, int t_max) {
  return {1, std::min(estimate_peak_time(1.0, d), t_max)};
}

}  // namespace detail

// simulate: runs the exact dynamics at the config's frequencies against the
// nominal target walk, writing per-step distributions for both, the full
// per-step metrics, a summary, and a distribution snapshot at the
// termination step.
inline void cmd_simulate(const CommonFlags& flags) {
  const RunSettings rs = detail::load_settings(flags);
  const auto dir = detail::prepare_out_dir(flags);

  // Fix the horizon on the target walk (auto mode terminates at pi
  // separation), then run the exact dynamics over the same steps.
  WalkConfig walk_cfg = detail::target_config(rs.cfg);
  walk_cfg.steps = rs.cfg.steps;
  const Trajectory walk = run_trajectory(walk_cfg, Dynamics::standard);
  WalkConfig exact_cfg = rs.cfg;
  exact_cfg.steps = walk.steps();
  const Trajectory exact = run_trajectory(exact_cfg, Dynamics::exact);

  const int t_end = walk.steps();
  const auto [fit_begin, fit_end] = detail::default_fit_window(rs.cfg.d, t_end);
  const TrajectoryReport report =
      compare_trajectories(exact, walk, fit_begin, fit_end);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.cfg = rs.cfg;
  manifest.window = rs.window_set ? rs.window : StepWindow{1, t_end};
  manifest.seed = rs.seed;
  manifest.output_dir = flags.out_dir;

  write_distributions_csv(dir / "distributions_exact.csv",
                          exact.distributions, rs.cfg.d);
  manifest.add(dir / "distributions_exact.csv", "csv");
  write_distributions_csv(dir / "distributions_approx.csv",
                          walk.distributions, rs.cfg.d);
  manifest.add(dir / "distributions_approx.csv", "csv");
  write_metrics_csv(dir / "metrics.csv", report);
  manifest.add(dir / "metrics.csv", "csv");

  const PhaseDistribution& pe = exact.distributions.back();
  const PhaseDistribution& pa = walk.distributions.back();
  Json summary{
      {"steps", t_end},
      {"auto_terminated", walk.auto_terminated},
      {"t_pi", walk.t_pi},
      {"hellinger_final", report.hellinger_per_step.back()},
      {"hellinger_max",
       *std::max_element(report.hellinger_per_step.begin(),
                         report.hellinger_per_step.end())},
      {"exact", Json{{"circular_mean", pe.circular_mean},
                     {"circular_std", pe.circular_std},
                     {"peak_separation",
                      pe.peak_sep ? Json(*pe.peak_sep) : Json(nullptr)}}},
      {"approx", Json{{"circular_mean", pa.circular_mean},
                      {"circular_std", pa.circular_std},
                      {"peak_separation",
                       pa.peak_sep ? Json(*pa.peak_sep) : Json(nullptr)}}},
      {"linear_fit", to_json(report.linear_fit)},
      {"power_fit", to_json(report.power_fit)},
  };
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  manifest.add(dir / "summary.json", "json");

  std::vector<double> phases(static_cast<size_t>(rs.cfg.d));
  for (int m = 0; m < rs.cfg.d; ++m) {
    phases[static_cast<size_t>(m)] = 2.0 * std::numbers::pi * m / rs.cfg.d;
  }
  write_svg_polylines(
      dir / "snapshot.svg",
      "phase distributions at step " + std::to_string(t_end), "phase (rad)",
      "probability",
      {{"exact", phases,
        {pe.probs.data(), pe.probs.data() + pe.probs.size()}},
       {"approx", phases,
        {pa.probs.data(), pa.probs.data() + pa.probs.size()}}});
  manifest.add(dir / "snapshot.svg", "svg");

  write_manifest(dir, manifest);
  std::cout << "simulate: " << t_end << " steps, final Hellinger "
            << fmt17(report.hellinger_per_step.back()) << "\n";
}

// optimize: multistart frequency optimization at the config's r (or at
// r in {1, 2, 4, 8, 10} with --r-sweep), writing the optimization results,
// one per-step error trace per r, and an error-overlay SVG.
inline void cmd_optimize(const CommonFlags& flags) {
  const RunSettings rs = detail::load_settings(flags);
  const auto dir = detail::prepare_out_dir(flags);

  std::vector<double> r_values;
  if (flags.r_sweep) {
    r_values = {1.0, 2.0, 4.0, 8.0, 10.0};
  } else {
    r_values = {rs.cfg.r};
  }

  RunManifest manifest;
  manifest.command = "optimize";
  manifest.cfg = rs.cfg;
  manifest.seed = rs.seed;
  manifest.output_dir = flags.out_dir;

  Json results = Json::array();
  std::vector<SvgSeries> error_series;
  for (const double r : r_values) {
    WalkConfig cfg = rs.cfg;
    cfg.r = r;
    if (flags.r_sweep) {
      // Sweep points start from the nominal frequencies of their own r;
      // the single-r path keeps the config's frequencies.
      cfg.g_tau = cfg.nominal_g_tau();
      cfg.omega_tau = WalkConfig::nominal_omega_tau();
    }

    // Window: explicit from the config, else [1, min(t_pi, 100)] measured
    // on the nominal target walk (the cap keeps long fine-step horizons
    // tractable; the optimum is set by the early steps).
    StepWindow window = rs.window;
    if (!rs.window_set) {
      const int t_pi = pi_separation_time(detail::target_config(cfg));
      window = StepWindow{1, std::max(1, std::min(t_pi, 100))};
    }

    OptimizeOptions options;
    options.restarts = rs.restarts;
    options.seed = rs.seed;
    options.jobs = flags.jobs;
    const OptimizationResult result = optimize(cfg, window, options);

    // Error trace at the optimum until pi separation of the target walk.
    WalkConfig walk_cfg = detail::target_config(cfg);
    walk_cfg.steps = 0;
    const Trajectory walk = run_trajectory(walk_cfg, Dynamics::standard);
    WalkConfig exact_cfg = cfg;
    exact_cfg.g_tau = result.g_tau_opt;
    exact_cfg.omega_tau = result.omega_tau_opt;
    exact_cfg.steps = walk.steps();
    const Trajectory exact = run_trajectory(exact_cfg, Dynamics::exact);
    const auto [fit_begin, fit_end] =
        detail::default_fit_window(cfg.d, walk.steps());
    const TrajectoryReport report =
        compare_trajectories(exact, walk, fit_begin, fit_end);

    std::ostringstream r_tag;
    r_tag << "r" << r;
    const auto csv_path = dir / ("metrics_" + r_tag.str() + ".csv");
    write_metrics_csv(csv_path, report);
    manifest.add(csv_path, "csv");

    Json entry = to_json(result);
    entry["r"] = r;
    entry["t_pi"] = walk.t_pi;
    entry["hellinger_max_until_pi"] =
        report.hellinger_per_step.size() > 1
            ? *std::max_element(report.hellinger_per_step.begin() + 1,
                                report.hellinger_per_step.end())
            : 0.0;
    results.push_back(entry);

    error_series.push_back(
        SvgSeries{r_tag.str(), detail::step_axis(report.hellinger_per_step.size()),
                  report.hellinger_per_step});

    std::cout << "optimize r=" << r << ": g_tau=" << fmt17(result.g_tau_opt)
              << " omega_tau=" << fmt17(result.omega_tau_opt)
              << " objective=" << fmt17(result.objective)
              << " C=" << fmt17(result.c_ratio) << "\n";
  }

  {
    std::ofstream out(dir / "optimization.json");
    out << results.dump(2) << '\n';
  }
  manifest.add(dir / "optimization.json", "json");
  write_svg_polylines(dir / "errors.svg", "Hellinger distance per step",
                      "step", "Hellinger distance", error_series);
  manifest.add(dir / "errors.svg", "svg");
  write_manifest(dir, manifest);
}

// decohere: runs the decoherent exact and standard dynamics for each
// dephasing probability, writing std-vs-step and Hellinger-vs-step CSVs and
// the power-fit exponents.
inline void cmd_decohere(const CommonFlags& flags) {
  const RunSettings rs = detail::load_settings(flags);
  const auto dir = detail::prepare_out_dir(flags);

  const std::vector<double> ps = flags.p_list.empty()
                                     ? std::vector<double>{0.0, 0.25, 0.5, 1.0}
                                     : detail::parse_p_list(flags.p_list);
  // Dephasing has no pi-separation notion; the auto horizon is the
  // 100-step run of the classical-transition study.
  const int steps = rs.cfg.steps > 0 ? rs.cfg.steps : 100;

  RunManifest manifest;
  manifest.command = "decohere";
  manifest.cfg = rs.cfg;
  manifest.seed = rs.seed;
  manifest.output_dir = flags.out_dir;

  std::vector<std::pair<std::string, std::vector<double>>> std_columns;
  std::vector<std::pair<std::string, std::vector<double>>> hellinger_columns;
  std::vector<SvgSeries> std_series;
  Json fits = Json::array();
  for (const double p : ps) {
    WalkConfig cfg = rs.cfg;
    cfg.steps = steps;
    cfg.dephasing_p = p;
    WalkConfig walk_cfg = detail::target_config(cfg);
    walk_cfg.steps = steps;
    walk_cfg.dephasing_p = p;

    const Trajectory exact =
        run_trajectory(cfg, Dynamics::decoherent_exact);
    const Trajectory walk =
        run_trajectory(walk_cfg, Dynamics::decoherent_standard);

    std::vector<double> std_walk, std_exact, h;
    for (int t = 0; t <= steps; ++t) {
      std_walk.push_back(walk.distributions[static_cast<size_t>(t)].circular_std);
      std_exact.push_back(exact.distributions[static_cast<size_t>(t)].circular_std);
      h.push_back(hellinger(exact.distributions[static_cast<size_t>(t)].probs,
                            walk.distributions[static_cast<size_t>(t)].probs));
    }

    std::ostringstream tag;
    tag << "p" << p;
    // The growth-law diagnostic is fit on the standard (walk) path's std.
    const FitResult power =
        fit_growth(std::span<const double>(std_walk.data() + 1,
                                           static_cast<size_t>(steps)),
                   FitModel::power, 1);
    const FitResult linear =
        fit_growth(std::span<const double>(std_walk.data() + 1,
                                           static_cast<size_t>(steps)),
                   FitModel::linear, 1);
    const double trend = spearman_rho(
        detail::step_axis(static_cast<size_t>(steps)),
        std::span<const double>(h.data() + 1, static_cast<size_t>(steps)));
    fits.push_back(Json{{"p", p},
                        {"power_fit", to_json(power)},
                        {"linear_fit", to_json(linear)},
                        {"hellinger_spearman_trend", trend}});

    std_columns.emplace_back("std_" + tag.str(), std_walk);
    std_columns.emplace_back("std_exact_" + tag.str(), std_exact);
    hellinger_columns.emplace_back("hellinger_" + tag.str(), h);
    std_series.push_back(
        SvgSeries{tag.str(), detail::step_axis(std_walk.size()), std_walk});
    std::cout << "decohere p=" << p
              << ": power exponent=" << fmt17(power.coef)
              << " hellinger trend=" << fmt17(trend) << "\n";
  }

  write_series_csv(dir / "std_vs_step.csv", std_columns);
  manifest.add(dir / "std_vs_step.csv", "csv");
  write_series_csv(dir / "hellinger_vs_step.csv", hellinger_columns);
  manifest.add(dir / "hellinger_vs_step.csv", "csv");
  {
    std::ofstream out(dir / "fits.json");
    out << fits.dump(2) << '\n';
  }
  manifest.add(dir / "fits.json", "json");
  write_svg_polylines(dir / "std_vs_step.svg",
                      "standard deviation vs step (walk, dephased)", "step",
                      "circular std (rad)", std_series);
  manifest.add(dir / "std_vs_step.svg", "svg");
  write_manifest(dir, manifest);
}

// compare: long-horizon exact-vs-walk comparison (Hellinger, std,
// negativity), one CSV and one SVG per panel plus the full metrics CSV and
// a combined summary.  The auto horizon is four pi-separation times.
inline void cmd_compare(const CommonFlags& flags) {
  const RunSettings rs = detail::load_settings(flags);
  const auto dir = detail::prepare_out_dir(flags);

  WalkConfig walk_cfg = detail::target_config(rs.cfg);
  int steps = rs.cfg.steps;
  if (steps == 0) {
    steps = 4 * pi_separation_time(walk_cfg);
  }
  walk_cfg.steps = steps;
  const Trajectory walk = run_trajectory(walk_cfg, Dynamics::standard);
  WalkConfig exact_cfg = rs.cfg;
  exact_cfg.steps = steps;
  const Trajectory exact = run_trajectory(exact_cfg, Dynamics::exact);

  const auto [fit_begin, fit_end] = detail::default_fit_window(rs.cfg.d, steps);
  const TrajectoryReport report =
      compare_trajectories(exact, walk, fit_begin, fit_end);

  RunManifest manifest;
  manifest.command = "compare";
  manifest.cfg = rs.cfg;
  manifest.seed = rs.seed;
  manifest.output_dir = flags.out_dir;

  write_series_csv(dir / "hellinger.csv",
                   {{"hellinger", report.hellinger_per_step}});
  manifest.add(dir / "hellinger.csv", "csv");
  write_series_csv(dir / "std.csv", {{"std_exact", report.std_exact},
                                     {"std_approx", report.std_approx}});
  manifest.add(dir / "std.csv", "csv");
  write_series_csv(dir / "negativity.csv",
                   {{"neg_exact", report.neg_exact},
                    {"neg_approx", report.neg_approx}});
  manifest.add(dir / "negativity.csv", "csv");
  write_metrics_csv(dir / "metrics.csv", report);
  manifest.add(dir / "metrics.csv", "csv");

  const auto xs = detail::step_axis(report.hellinger_per_step.size());
  write_svg_polylines(dir / "hellinger.svg", "Hellinger distance", "step",
                      "Hellinger distance",
                      {{"hellinger", xs, report.hellinger_per_step}});
  manifest.add(dir / "hellinger.svg", "svg");
  write_svg_polylines(dir / "std.svg", "circular standard deviation", "step",
                      "std (rad)",
                      {{"exact", xs, report.std_exact},
                       {"approx", xs, report.std_approx}});
  manifest.add(dir / "std.svg", "svg");
  write_svg_polylines(dir / "negativity.svg", "negativity", "step",
                      "negativity",
                      {{"exact", xs, report.neg_exact},
                       {"approx", xs, report.neg_approx}});
  manifest.add(dir / "negativity.svg", "svg");

  Json summary{
      {"steps", steps},
      {"hellinger_max",
       *std::max_element(report.hellinger_per_step.begin(),
                         report.hellinger_per_step.end())},
      {"negativity_mean_abs_gap",
       mean_abs_gap(report.neg_exact, report.neg_approx)},
      {"linear_fit", to_json(report.linear_fit)},
      {"power_fit", to_json(report.power_fit)},
  };
  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  manifest.add(dir / "summary.json", "json");
  write_manifest(dir, manifest);
  std::cout << "compare: " << steps << " steps, max Hellinger "
            << fmt17(summary["hellinger_max"].get<double>())
            << ", mean |neg gap| "
            << fmt17(summary["negativity_mean_abs_gap"].get<double>())
            << "\n";
}

// Maps an escaped exception to the documented exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 2;
  return 3;
}

// Entry point for the pswalk binary.  Returns the process exit code.
inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"phase-space quantum walk simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  const auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "run configuration file")
        ->required();
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--jobs", flags.jobs,
                    "parallel workers for optimizer restarts");
    cmd->add_option("--steps", flags.steps,
                    "override step count (0 = auto-terminate at pi "
                    "separation)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run and snapshot");
  add_common(simulate);
  CLI::App* optimize_cmd =
      app.add_subcommand("optimize", "optimize frequencies");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--restarts", flags.restarts,
                           "multistart restart count");
  optimize_cmd->add_flag("--r-sweep", flags.r_sweep,
                         "sweep r over {1, 2, 4, 8, 10}");
  CLI::App* compare = app.add_subcommand("compare", "long-horizon metrics");
  add_common(compare);
  CLI::App* decohere = app.add_subcommand("decohere", "dephasing study");
  add_common(decohere);
  decohere->add_option("--p-list", flags.p_list,
                       "comma-separated dephasing probabilities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // malformed invocation is a config error
  }

  try {
    if (simulate->parsed()) {
      cmd_simulate(flags);
    } else if (optimize_cmd->parsed()) {
      cmd_optimize(flags);
    } else if (compare->parsed()) {
      cmd_compare(flags);
    } else if (decohere->parsed()) {
      cmd_decohere(flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace pswalk
