#pragma once

// File formats of the batch front end: flat key-value (INI-style) run
// configs, CSV outputs with 17-significant-digit floats (exact double
// round-trip), JSON summaries/manifests, and minimal static SVG figures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pswalk/errors.hpp"
#include "pswalk/metrics.hpp"
#include "pswalk/optimizer.hpp"
#include "pswalk/phase_space.hpp"

namespace pswalk {

using Json = nlohmann::json;

// A parsed run configuration: the walk parameters plus the run-level
// settings that live beside them in the config file.
struct RunSettings {
  WalkConfig cfg;
  StepWindow window{0, 0};
  bool window_set = false;  // false = derive the window from the pi time
  int restarts = 100;
  std::uint64_t seed = 12345;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    const double out = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      value + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t consumed = 0;
    const long long out = std::stoll(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" +
                      value + "'");
  }
}

}  // namespace detail

// Parses a flat key = value config file.  Recognized keys (exactly): d,
// alpha_re, alpha_im, r, g_tau, omega_tau, steps, coin0_re, coin0_im,
// coin1_re, coin1_im, dephasing_p, window_start, window_end, restarts,
// seed.  Lines starting with '#' or ';' are comments.  Unknown keys are
// rejected.  Omitted frequencies default to the nominal walk values
// (2 pi / (r d) and pi / 2); an omitted window means "derive from the
// measured pi-separation time".
inline RunSettings parse_config_text(std::istream& in,
                                     const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (kv.count(key)) {
      throw ConfigError(origin + ": duplicate key '" + key + "'");
    }
    kv[key] = value;
  }

  static const std::vector<std::string> known = {
      "d",        "alpha_re", "alpha_im",  "r",           "g_tau",
      "omega_tau", "steps",    "coin0_re",  "coin0_im",    "coin1_re",
      "coin1_im", "dephasing_p", "window_start", "window_end", "restarts",
      "seed"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(origin + ": unknown key '" + key + "'");
    }
  }

  RunSettings rs;
  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  if (const auto v = get("d")) rs.cfg.d = static_cast<int>(detail::parse_int("d", *v));
  double alpha_re = rs.cfg.alpha.real(), alpha_im = rs.cfg.alpha.imag();
  if (const auto v = get("alpha_re")) alpha_re = detail::parse_double("alpha_re", *v);
  if (const auto v = get("alpha_im")) alpha_im = detail::parse_double("alpha_im", *v);
  rs.cfg.alpha = Complex{alpha_re, alpha_im};
  if (const auto v = get("r")) rs.cfg.r = detail::parse_double("r", *v);
  if (const auto v = get("steps")) rs.cfg.steps = static_cast<int>(detail::parse_int("steps", *v));
  double coin0_re = 1.0, coin0_im = 0.0, coin1_re = 0.0, coin1_im = 0.0;
  if (const auto v = get("coin0_re")) coin0_re = detail::parse_double("coin0_re", *v);
  if (const auto v = get("coin0_im")) coin0_im = detail::parse_double("coin0_im", *v);
  if (const auto v = get("coin1_re")) coin1_re = detail::parse_double("coin1_re", *v);
  if (const auto v = get("coin1_im")) coin1_im = detail::parse_double("coin1_im", *v);
  rs.cfg.coin_init = {Complex{coin0_re, coin0_im}, Complex{coin1_re, coin1_im}};
  if (const auto v = get("dephasing_p")) {
    rs.cfg.dephasing_p = detail::parse_double("dephasing_p", *v);
  }
  rs.cfg.g_tau = get("g_tau") ? detail::parse_double("g_tau", *get("g_tau"))
                              : rs.cfg.nominal_g_tau();
  rs.cfg.omega_tau = get("omega_tau")
                         ? detail::parse_double("omega_tau", *get("omega_tau"))
                         : WalkConfig::nominal_omega_tau();

  const auto ws = get("window_start");
  const auto we = get("window_end");
  if (ws.has_value() != we.has_value()) {
    throw ConfigError(origin +
                      ": window_start and window_end must appear together");
  }
  if (ws) {
    rs.window.begin = static_cast<int>(detail::parse_int("window_start", *ws));
    rs.window.end = static_cast<int>(detail::parse_int("window_end", *we));
    if (rs.window.begin < 1 || rs.window.end < rs.window.begin) {
      throw ConfigError(origin + ": window must satisfy 1 <= start <= end");
    }
    rs.window_set = true;
  }
  if (const auto v = get("restarts")) {
    rs.restarts = static_cast<int>(detail::parse_int("restarts", *v));
    if (rs.restarts < 1) throw ConfigError(origin + ": restarts must be >= 1");
  }
  if (const auto v = get("seed")) {
    rs.seed = static_cast<std::uint64_t>(detail::parse_int("seed", *v));
  }

  try {
    rs.cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return rs;
}

inline RunSettings parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path.string() + "'");
  }
  return parse_config_text(in, path.string());
}

// Shortest exact decimal form of a double at 17 significant digits.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Distribution CSV: one row per (step, site) with the site's phase angle
// and probability.
inline void write_distributions_csv(const std::filesystem::path& path,
                                    const std::vector<PhaseDistribution>& traj,
                                    int d) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "step,site,phase_rad,prob\n";
  for (size_t t = 0; t < traj.size(); ++t) {
    for (int m = 0; m < d; ++m) {
      const double phase = 2.0 * std::numbers::pi * m / d;
      out << t << ',' << m << ',' << fmt17(phase) << ','
          << fmt17(traj[t].probs[m]) << '\n';
    }
  }
}

// Metrics CSV with the full comparison schema.  Negativity columns are left
// empty when the report carries no negativity series.
inline void write_metrics_csv(const std::filesystem::path& path,
                              const TrajectoryReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "step,hellinger,std_exact,std_approx,neg_exact,neg_approx\n";
  const size_t n = report.hellinger_per_step.size();
  for (size_t t = 0; t < n; ++t) {
    out << t << ',' << fmt17(report.hellinger_per_step[t]) << ','
        << fmt17(report.std_exact[t]) << ',' << fmt17(report.std_approx[t])
        << ',';
    if (t < report.neg_exact.size()) out << fmt17(report.neg_exact[t]);
    out << ',';
    if (t < report.neg_approx.size()) out << fmt17(report.neg_approx[t]);
    out << '\n';
  }
}

// Generic per-step CSV: first column "step", then one named column per
// series.  All series must share one length.
inline void write_series_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::vector<double>>>& columns) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "step";
  size_t n = 0;
  for (const auto& [name, values] : columns) {
    out << ',' << name;
    if (n == 0) n = values.size();
    if (values.size() != n) {
      throw LengthMismatch("write_series_csv: column '" + name +
                           "' has mismatched length");
    }
  }
  out << '\n';
  for (size_t t = 0; t < n; ++t) {
    out << t;
    for (const auto& [name, values] : columns) out << ',' << fmt17(values[t]);
    out << '\n';
  }
}

inline Json to_json(const WalkConfig& cfg) {
  return Json{{"d", cfg.d},
              {"alpha_re", cfg.alpha.real()},
              {"alpha_im", cfg.alpha.imag()},
              {"r", cfg.r},
              {"g_tau", cfg.g_tau},
              {"omega_tau", cfg.omega_tau},
              {"steps", cfg.steps},
              {"coin0_re", cfg.coin_init[0].real()},
              {"coin0_im", cfg.coin_init[0].imag()},
              {"coin1_re", cfg.coin_init[1].real()},
              {"coin1_im", cfg.coin_init[1].imag()},
              {"dephasing_p", cfg.dephasing_p}};
}

inline Json to_json(const FitResult& fit) {
  return Json{{"coef", fit.coef},
              {"r_squared", fit.r_squared},
              {"offset", fit.offset}};
}

inline Json to_json(const OptimizationResult& result) {
  Json trace = Json::array();
  for (const RestartRecord& rec : result.trace) {
    trace.push_back(Json{{"seed", rec.seed},
                         {"start_g_tau", rec.start_g},
                         {"start_omega_tau", rec.start_w},
                         {"start_objective", rec.start_objective},
                         {"g_tau", rec.g},
                         {"omega_tau", rec.w},
                         {"objective", rec.objective},
                         {"evals", rec.evals},
                         {"failed", rec.failed},
                         {"error", rec.error}});
  }
  return Json{{"g_tau_opt", result.g_tau_opt},
              {"omega_tau_opt", result.omega_tau_opt},
              {"omega_tau_opt_mod_4pi", result.omega_tau_opt_mod_4pi},
              {"objective", result.objective},
              {"c_ratio", result.c_ratio},
              {"window", Json{{"begin", result.window.begin},
                              {"end", result.window.end}}},
              {"restarts", result.restarts},
              {"best_restart_index", result.best_restart_index},
              {"best_restart_seed", result.best_restart_seed},
              {"trace", trace}};
}

// Every run serializes a manifest beside its outputs: the command, the
// resolved settings, and every emitted file.  Runs are reconstructable from
// the manifest alone.
struct RunManifest {
  std::string command;
  WalkConfig cfg;
  StepWindow window{0, 0};
  std::uint64_t seed = 0;
  std::string output_dir;
  std::vector<std::pair<std::string, std::string>> emitted;  // (path, kind)

  void add(const std::filesystem::path& path, const std::string& kind) {
    emitted.emplace_back(path.filename().string(), kind);
  }
};

inline void write_manifest(const std::filesystem::path& dir,
                           const RunManifest& manifest) {
  Json files = Json::array();
  for (const auto& [path, kind] : manifest.emitted) {
    files.push_back(Json{{"path", path}, {"kind", kind}});
  }
  const Json doc{{"command", manifest.command},
                 {"config", to_json(manifest.cfg)},
                 {"window", Json{{"begin", manifest.window.begin},
                                 {"end", manifest.window.end}}},
                 {"seed", manifest.seed},
                 {"output_dir", manifest.output_dir},
                 {"emitted_files", files}};
  std::ofstream out(dir / "manifest.json");
  if (!out) {
    throw Error("cannot open manifest in '" + dir.string() + "' for writing");
  }
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Minimal static SVG: axes, ticks, and one polyline per series.  Diagnostic
// output only — data-complete, styling-minimal, no external dependencies.

struct SvgSeries {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

inline void write_svg_polylines(const std::filesystem::path& path,
                                const std::string& title,
                                const std::string& x_label,
                                const std::string& y_label,
                                const std::vector<SvgSeries>& series) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  const double width = 640, height = 480;
  const double ml = 64, mr = 16, mt = 32, mb = 48;  // margins

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      if (first) {
        x_min = x_max = s.xs[i];
        y_min = y_max = s.ys[i];
        first = false;
      } else {
        x_min = std::min(x_min, s.xs[i]);
        x_max = std::max(x_max, s.xs[i]);
        y_min = std::min(y_min, s.ys[i]);
        y_max = std::max(y_max, s.ys[i]);
      }
    }
  }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) y_max = y_min + 1;

  const auto px = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
  };
  const auto py = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };

  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n";
  // Axes.
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  // Ticks with labels.
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 4.0;
    const double yv = y_min + (y_max - y_min) * k / 4.0;
    out << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\""
        << px(xv) << "\" y2=\"" << height - mb + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << num(xv) << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml
        << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << num(yv) << "</text>\n";
  }
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"12\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
  // Series.
  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < series[s].xs.size(); ++i) {
      if (!std::isfinite(series[s].xs[i]) || !std::isfinite(series[s].ys[i]))
        continue;
      out << px(series[s].xs[i]) << ',' << py(series[s].ys[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - mr - 8 << "\" y=\""
        << mt + 16 + 14 * static_cast<double>(s)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\" fill=\"" << color << "\">" << series[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace pswalk
