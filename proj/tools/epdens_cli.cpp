// Command-line front end: estimate, simulate, oracle-ratio, theory.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epdens/epdens.hpp"
#include "epdens/io.hpp"

namespace {

using epdens::io::json;

constexpr int kExitInput = 2;
constexpr int kExitTooSmall = 3;

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw epdens::io::InputError("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw epdens::io::InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw epdens::io::InputError(path + ": " + e.what());
  }
}

struct EstimateArgs
{
  std::string input;
  std::string support = "infinite";
  std::size_t grid = 201;
  std::string out;
  std::optional<std::uint64_t> shuffle_seed;
  bool nonneg = false;
  bool inflated = false;
};

int run_estimate(const EstimateArgs& args)
{
  auto obs = epdens::io::read_observations(args.input);
  if (args.shuffle_seed)
    obs = epdens::shuffled(std::move(obs), *args.shuffle_seed);
  const auto support = epdens::io::parse_support(args.support);
  if (args.grid < 2)
    throw epdens::io::InputError("--grid needs at least 2 points");

  epdens::PipelineOptions options;
  if (args.inflated)
    options.cutoff = epdens::SeriesCutoff::inflated;
  const auto result = epdens::estimate_error_density(obs, support, options);

  std::vector<double> grid;
  if (support.kind == epdens::SupportKind::finite) {
    grid = epdens::uniform_grid(support.a, support.a + support.b, args.grid);
  } else {
    const double T = epdens::default_truncation(result.residuals);
    grid = epdens::uniform_grid(-T, T, args.grid);
  }

  json doc = epdens::io::estimate_json(result.estimate, support, grid, args.nonneg);
  const auto& seq = result.sequences;
  doc["params"] = {{"n", seq.n},
                   {"b_n", seq.b_n},
                   {"n_1", seq.n_1},
                   {"n_2", seq.n_2},
                   {"S", seq.S},
                   {"support", epdens::to_string(support.kind)},
                   {"a", support.a},
                   {"b", support.b}};
  doc["diagnostics"] = {{"residual_count", result.residuals.size()},
                        {"residuals_outside_unit_interval", result.outside_unit_interval},
                        {"nonneg_projection", args.nonneg},
                        {"shuffled", args.shuffle_seed.has_value()}};
  write_output(args.out, epdens::io::dump(doc));
  return 0;
}

struct SimulateArgs
{
  std::string config;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = epdens::default_threads();
  std::vector<std::size_t> n_list;
};

std::size_t resolve_reps(const SimulateArgs& args, const json& j)
{
  if (args.reps)
    return *args.reps;
  if (j.contains("reps"))
    return j.at("reps").get<std::size_t>();
  throw epdens::io::InputError("number of replications missing (--reps or \"reps\")");
}

epdens::ModelConfig load_config(const SimulateArgs& args, json& j)
{
  if (!args.seed)
    throw epdens::io::InputError("--seed is required");
  j = read_json_file(args.config);
  auto config = epdens::io::config_from_json(j);
  config.seed = *args.seed;
  return config;
}

int run_simulate(const SimulateArgs& args)
{
  json j;
  const auto config = load_config(args, j);
  const auto reps = resolve_reps(args, j);
  const auto report = epdens::monte_carlo(config, reps, args.threads);
  write_output(args.out, epdens::io::dump(epdens::io::to_json(report)));
  return 0;
}

int run_oracle_ratio(const SimulateArgs& args)
{
  json j;
  auto config = load_config(args, j);
  const auto reps = resolve_reps(args, j);
  std::vector<std::size_t> sizes = args.n_list;
  if (sizes.empty())
    sizes.push_back(config.n);

  json table = json::array();
  for (std::size_t n : sizes) {
    config.n = n;
    const auto report = epdens::monte_carlo(config, reps, args.threads);
    std::fprintf(stderr, "n = %zu: (%.2f/%.2f/%.2f)\n", n, report.ratio.mean,
                 report.ratio.median, report.ratio.sd);
    table.push_back({{"n", n},
                     {"mean", report.ratio.mean},
                     {"median", report.ratio.median},
                     {"sd", report.ratio.sd},
                     {"mise_oracle", report.mise_oracle},
                     {"mise_estimate", report.mise_estimate}});
  }
  json doc = {{"config", epdens::io::to_json(config)},
              {"reps", reps},
              {"master_seed", config.seed},
              {"table", table}};
  doc["config"].erase("n");
  write_output(args.out, epdens::io::dump(doc));
  return 0;
}

void print_scalar(double value)
{
  std::printf("%.12g\n", value);
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Error density estimation for regression residuals"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate the error density of a dataset");
  estimate->add_option("--input", est.input, "CSV file with header x,y")->required();
  estimate->add_option("--support", est.support, "'a,b' for [a, a + b] or 'infinite'");
  estimate->add_option("--grid", est.grid, "number of output grid points");
  estimate->add_option("--out", est.out, "output JSON path (default stdout)");
  estimate->add_option("--shuffle-seed", est.shuffle_seed,
                       "shuffle observations with this seed before splitting");
  estimate->add_flag("--nonneg", est.nonneg, "clip negative values and renormalise");
  estimate->add_flag("--inflated-cutoff", est.inflated,
                     "use ceil(n^{1/3} ln b_n) terms in the nuisance series");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study for a config");
  simulate->add_option("--config", sim.config, "simulation config JSON")->required();
  simulate->add_option("--reps", sim.reps, "replications (overrides config)");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--out", sim.out, "output JSON path (default stdout)");
  simulate->add_option("--threads", sim.threads, "worker threads");

  SimulateArgs ratio;
  auto* oracle_ratio =
    app.add_subcommand("oracle-ratio", "oracle/estimate ISE ratio table over sample sizes");
  oracle_ratio->add_option("--config", ratio.config, "simulation config JSON")->required();
  oracle_ratio->add_option("--reps", ratio.reps, "replications per sample size");
  oracle_ratio->add_option("--seed", ratio.seed, "master seed");
  oracle_ratio->add_option("--n", ratio.n_list, "sample sizes")->delimiter(',');
  oracle_ratio->add_option("--out", ratio.out, "output JSON path (default stdout)");
  oracle_ratio->add_option("--threads", ratio.threads, "worker threads");

  auto* theory = app.add_subcommand("theory", "minimax constants");
  theory->require_subcommand(1);
  double alpha = 2.0;
  double q = 1.0;
  double gamma = 1.0;
  double n = 0.0;
  std::string cls = "sobolev";
  auto* pinsker = theory->add_subcommand("pinsker", "Pinsker constant P(alpha, Q)");
  pinsker->add_option("--alpha", alpha)->required();
  pinsker->add_option("--q", q)->required();
  auto* rate = theory->add_subcommand("rate-factor", "sharp normalising factor r_n");
  rate->add_option("--class", cls)->check(CLI::IsMember({"sobolev", "analytic"}));
  rate->add_option("--n", n)->required();
  rate->add_option("--alpha", alpha);
  rate->add_option("--q", q);
  rate->add_option("--gamma", gamma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*estimate)
      return run_estimate(est);
    if (*simulate)
      return run_simulate(sim);
    if (*oracle_ratio)
      return run_oracle_ratio(ratio);
    if (*pinsker) {
      print_scalar(epdens::pinsker_constant(alpha, q));
      return 0;
    }
    if (*rate) {
      if (cls == "sobolev")
        print_scalar(epdens::sobolev_rate_factor(n, alpha, q));
      else
        print_scalar(epdens::analytic_rate_factor(n, gamma));
      return 0;
    }
  } catch (const epdens::SampleTooSmall& e) {
    std::cerr << "error: sample too small: " << e.what() << "\n";
    return kExitTooSmall;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
