// Command-line front end: solve, partition, bench, oracle.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmot/auction.hpp"
#include "bmot/config.hpp"
#include "bmot/driver.hpp"
#include "bmot/oracle.hpp"
#include "bmot/raster.hpp"
#include "bmot/summary.hpp"
#include "bmot/wasserstein.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bmot::IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw bmot::IoError("failed while writing: " + path);
}

// Resolves --problem ids: a path as-is, otherwise <id>.cfg under
// $BMOT_CONFIG_DIR or ./configs.
std::string resolve_config_path(const std::string& id) {
  if (fs::exists(id)) return id;
  std::vector<std::string> roots;
  if (const char* env = std::getenv("BMOT_CONFIG_DIR")) roots.push_back(env);
  roots.push_back("configs");
  for (const std::string& root : roots) {
    fs::path candidate = fs::path(root) / (id + ".cfg");
    if (fs::exists(candidate)) return candidate.string();
  }
  throw bmot::IoError("cannot resolve config '" + id + "'");
}

bmot::RunConfig load_with_overrides(const std::string& path, int threads,
                                    std::optional<int> target_exponent) {
  bmot::RunConfig cfg = bmot::load_config_file(path);
  if (threads >= 0) cfg.threads = threads;
  if (target_exponent) {
    cfg.target_exponent = *target_exponent;
    if (cfg.target_exponent < cfg.initial_exponent)
      throw bmot::ConfigError("target exponent below the initial exponent");
  }
  return cfg;
}

struct FitLine {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};

FitLine fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  FitLine fit;
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = fit.intercept + fit.slope * std::log(x[i]);
    ss_res += (std::log(y[i]) - pred) * (std::log(y[i]) - pred);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

int cmd_solve(const std::string& config_path, const std::string& out_dir,
              int threads, std::optional<int> target_exponent) {
  bmot::RunConfig cfg =
      load_with_overrides(config_path, threads, target_exponent);
  const auto tick = std::chrono::steady_clock::now();
  bmot::RunResult result = bmot::run_boundary_method(cfg);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - tick)
                        .count();
  for (const bmot::LevelStats& st : result.levels)
    std::fprintf(stderr,
                 "level %2d  width %.3e  active %8lld  boundary %8lld  "
                 "rounds %6lld  %.1f ms\n",
                 st.level, st.width,
                 static_cast<long long>(st.active_boxes),
                 static_cast<long long>(st.boundary_boxes),
                 static_cast<long long>(st.auction_rounds), st.wall_ms);
  std::fprintf(stderr, "total %.1f ms\n", ms);

  std::string summary = bmot::summary_to_json_text(cfg, result);
  if (out_dir.empty()) {
    std::cout << summary;
  } else {
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "summary.json").string(), summary);
    write_text_file((fs::path(out_dir) / "levels.csv").string(),
                    bmot::levels_to_csv_text(result));
  }
  return 0;
}

int cmd_partition(const std::string& config_path, const std::string& image,
                  int resolution, int threads,
                  std::optional<int> target_exponent) {
  bmot::RunConfig cfg =
      load_with_overrides(config_path, threads, target_exponent);
  bmot::RunResult result = bmot::run_boundary_method(cfg);
  bmot::RasterResult raster = bmot::rasterize_partition(
      cfg.cost, cfg.targets, result.shifts.value, cfg.density, resolution,
      bmot::resolve_threads(cfg.threads));
  bmot::PartitionImage img = bmot::render_partition(
      raster, static_cast<int>(cfg.targets.size()));
  bmot::write_ppm(image, img);

  Json report;
  report["image"] = image;
  report["resolution"] = resolution;
  report["slices"] = raster.slices;
  report["region_masses"] = raster.masses;
  report["target_weights"] = cfg.weights;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& problem, const std::string& widths,
              int repeats, const std::string& out_csv, int threads) {
  auto sep = widths.find("..");
  if (sep == std::string::npos)
    throw bmot::ConfigError("--widths expects the form m1..m2");
  int m1 = 0, m2 = 0;
  try {
    m1 = std::stoi(widths.substr(0, sep));
    m2 = std::stoi(widths.substr(sep + 2));
  } catch (const std::exception&) {
    throw bmot::ConfigError("--widths expects integer exponents m1..m2");
  }
  if (m1 > m2) throw bmot::ConfigError("--widths expects m1 <= m2");
  if (repeats < 1) throw bmot::ConfigError("--repeats must be positive");

  const std::string config_path = resolve_config_path(problem);
  std::ostringstream csv;
  csv << "W,width,levels,total_boxes,peak_boxes,boundary_boxes,seconds\n";
  std::vector<double> ws, times, peaks;
  for (int m = m1; m <= m2; ++m) {
    bmot::RunConfig cfg = load_with_overrides(config_path, threads, m);
    double best = 0.0;
    bmot::RunResult result;
    for (int rep = 0; rep < repeats; ++rep) {
      const auto tick = std::chrono::steady_clock::now();
      result = bmot::run_boundary_method(cfg);
      double sec = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - tick)
                       .count();
      if (rep == 0 || sec < best) best = sec;
    }
    std::int64_t total = 0, peak = 0;
    for (const bmot::LevelStats& st : result.levels) {
      total += st.active_boxes;
      peak = std::max(peak, st.active_boxes);
    }
    const double W = cfg.side / result.geometry.width(
                                    static_cast<int>(result.levels.size()));
    csv << bmot::format_double(W) << ','
        << bmot::format_double(result.geometry.width(
               static_cast<int>(result.levels.size())))
        << ',' << result.levels.size() << ',' << total << ',' << peak << ','
        << result.levels.back().boundary_boxes << ','
        << bmot::format_double(best) << '\n';
    ws.push_back(W);
    times.push_back(std::max(best, 1e-9));
    peaks.push_back(static_cast<double>(peak));
    std::fprintf(stderr, "W=%g done in %.3fs\n", W, best);
  }
  write_text_file(out_csv, csv.str());

  Json fits;
  FitLine time_fit = fit_loglog(ws, times);
  FitLine space_fit = fit_loglog(ws, peaks);
  fits["time"] = {{"exponent", time_fit.slope}, {"r2", time_fit.r2}};
  fits["storage"] = {{"exponent", space_fit.slope}, {"r2", space_fit.r2}};
  fits["csv"] = out_csv;
  std::cout << fits.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_path,
               int threads) {
  bmot::RunConfig cfg = load_with_overrides(config_path, threads, std::nullopt);
  const int workers = bmot::resolve_threads(cfg.threads);
  bmot::GridGeometry g{cfg.dim, cfg.side, cfg.initial_exponent};
  bmot::ActiveSet grid = bmot::initial_grid(g, cfg.density, workers);
  const int n = static_cast<int>(cfg.targets.size());

  bmot::DenseTransportInstance instance;
  instance.sources = static_cast<int>(grid.size());
  instance.sinks = n;
  instance.mass = grid.mass;
  instance.capacity = cfg.weights;
  instance.cost.resize(grid.size() * static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < grid.size(); ++s) {
    bmot::Point center = bmot::box_center(g, 1, grid.keys[s]);
    for (int t = 0; t < n; ++t)
      instance.cost[s * n + t] =
          cfg.cost(center.data(), cfg.targets[t].data(), g.dim);
  }

  bmot::ExactPlan plan;
  std::string oracle_kind;
  if (instance.sources <= 64 && instance.sinks <= 8) {
    plan = bmot::brute_force_transport(instance);
    oracle_kind = "brute_force_transport";
  } else {
    plan = bmot::exact_transport_reference(instance);
    oracle_kind = "exact_transport_reference";
  }

  bmot::TransportProblem problem{instance.sources, instance.sinks,
                                 instance.cost, instance.mass,
                                 instance.capacity};
  bmot::AuctionOptions options;
  options.threads = workers;
  bmot::Assignment assignment = bmot::solve_transport(problem, options);
  const double auction_cost = assignment.total_cost(problem);
  bmot::SlacknessReport slackness = bmot::check_eps_slackness(
      problem, assignment, assignment.epsilon_final);

  bmot::AdmissibilityReport admissibility = bmot::probe_admissibility(
      cfg.cost, cfg.dim, cfg.side, 256, cfg.seed);

  const double gap = auction_cost - plan.cost;
  const double gap_allowance =
      assignment.epsilon_final * static_cast<double>(instance.sources);
  Json report;
  report["oracle"] = oracle_kind;
  report["sources"] = instance.sources;
  report["sinks"] = instance.sinks;
  report["oracle_cost"] = plan.cost;
  report["oracle_marginal_error"] = plan.marginal_error(instance);
  report["auction_cost"] = auction_cost;
  report["gap"] = gap;
  report["gap_allowance"] = gap_allowance;
  report["epsilon_final"] = assignment.epsilon_final;
  report["auction_rounds"] = assignment.rounds;
  report["eps_cs_ok"] = slackness.ok;
  report["eps_cs_worst_violation"] = slackness.worst_violation;
  Json adm;
  adm["samples"] = admissibility.samples;
  adm["diagonal_ok"] = admissibility.diagonal_ok;
  adm["symmetry_ok"] = admissibility.symmetry_ok;
  adm["positivity_ok"] = admissibility.positivity_ok;
  adm["triangle_probed"] = admissibility.triangle_probed;
  adm["triangle_ok"] = admissibility.triangle_ok;
  report["admissibility"] = adm;
  const bool ok =
      slackness.ok && admissibility.ok() && gap <= gap_allowance + 1e-12;
  report["ok"] = ok;

  std::string text = report.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
  if (!ok)
    throw bmot::NumericalError("oracle check failed (see report)");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-discrete optimal transport via the boundary method"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, image_path = "partition.ppm";
  std::string problem, widths, bench_out = "bench.csv", oracle_out;
  int threads = -1;  // -1 = use the config's value
  int resolution = 512;
  int repeats = 1;
  std::optional<int> target_exponent;
  int target_exponent_raw = -1;

  CLI::App* solve = app.add_subcommand("solve", "run the boundary method");
  solve->add_option("--config", config_path, "problem config (JSON .cfg)")
      ->required();
  solve->add_option("--out", out_dir,
                    "output directory (summary.json, levels.csv); stdout if "
                    "omitted");
  solve->add_option("--threads", threads, "worker threads (0 = hardware)");
  solve->add_option("--target-exponent", target_exponent_raw,
                    "override the final width exponent");

  CLI::App* partition =
      app.add_subcommand("partition", "rasterize the reconstructed partition");
  partition->add_option("--config", config_path, "problem config")->required();
  partition->add_option("--image", image_path, "output PPM path");
  partition->add_option("--resolution", resolution, "pixels per axis");
  partition->add_option("--threads", threads, "worker threads");
  partition->add_option("--target-exponent", target_exponent_raw,
                        "override the final width exponent");

  CLI::App* bench =
      app.add_subcommand("bench", "time the solver across final widths");
  bench->add_option("--problem", problem, "config path or bundled id")
      ->required();
  bench->add_option("--widths", widths, "exponent range m1..m2")->required();
  bench->add_option("--repeats", repeats, "repetitions per width (best kept)");
  bench->add_option("--out", bench_out, "CSV output path");
  bench->add_option("--threads", threads, "worker threads");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "check the auction against the exact reference solver");
  oracle->add_option("--config", config_path, "problem config")->required();
  oracle->add_option("--out", oracle_out, "JSON report path; stdout if omitted");
  oracle->add_option("--threads", threads, "worker threads");

  CLI11_PARSE(app, argc, argv);
  if (target_exponent_raw >= 0) target_exponent = target_exponent_raw;

  try {
    if (solve->parsed())
      return cmd_solve(config_path, out_dir, threads, target_exponent);
    if (partition->parsed())
      return cmd_partition(config_path, image_path, resolution, threads,
                           target_exponent);
    if (bench->parsed())
      return cmd_bench(problem, widths, repeats, bench_out, threads);
    if (oracle->parsed()) return cmd_oracle(config_path, oracle_out, threads);
  } catch (const bmot::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const bmot::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const bmot::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
