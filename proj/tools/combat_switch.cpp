// Command-line front end: run / sweep / replay-check / figure.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "combat/harness.hpp"

using namespace combat;

namespace {

unsigned thread_count(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("COMBAT_SWITCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot open output file " + path);
  return file;
}

void print_sweep(const std::vector<SweepResult>& results) {
  for (const auto& r : results) {
    std::cerr << r.policy << ": regret ~ " << to_string(r.variable) << "^"
              << format_number(r.fit.exponent) << " (r^2 = " << format_number(r.fit.r_squared) << ")\n";
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  out << "policy,variable,x,mean_final_regret,se\n";
  for (const auto& r : results) {
    for (const auto& p : r.points) {
      out << r.policy << ',' << to_string(r.variable) << ',' << format_number(p.x) << ','
          << format_number(p.mean_final_regret) << ',' << format_number(p.se) << '\n';
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched combinatorial bandits with switching costs"};
  app.require_subcommand(1);

  std::string config_path, seeds, out_path, granularity;
  int threads = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config,config", config_path, "configuration file");
    sub->add_option("--seeds", seeds, "seed list, e.g. 0..19 or 1,2,5");
    sub->add_option("--out", out_path, "output CSV (default: stdout or the config's output)");
    sub->add_option("--threads", threads, "worker threads (env COMBAT_SWITCH_THREADS)");
    sub->add_option("--granularity", granularity, "round or batch")->check(CLI::IsMember({"round", "batch"}));
  };

  auto* run = app.add_subcommand("run", "execute an experiment configuration");
  common(run);
  run->get_option("--config")->required();

  std::string vary, values;
  auto* sweep = app.add_subcommand("sweep", "vary one of I, lambda, K, T and fit the regret exponent");
  common(sweep);
  sweep->get_option("--config")->required();
  sweep->add_option("--vary", vary, "I, lambda, K or T")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  std::string replay_path;
  int replay_k = 0;
  auto* check = app.add_subcommand("replay-check", "validate a replay loss file");
  check->add_option("file", replay_path, "CSV of per-round losses")->required();
  check->add_option("--K", replay_k, "expected number of columns");

  std::string figure;
  bool aggregate_only = false;
  auto* fig = app.add_subcommand("figure", "emit the CSV for a named figure preset");
  fig->add_option("name", figure, "fig5a ... fig6f")->required();
  fig->add_option("--seeds", seeds, "seed list (default 0..19)");
  fig->add_option("--out", out_path, "output CSV");
  fig->add_option("--threads", threads, "worker threads");
  fig->add_flag("--aggregate", aggregate_only, "emit mean/SE curves instead of per-seed records");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      auto r = ReplayAdversary::from_file(replay_path);
      if (replay_k > 0 && r.dimension() != replay_k) {
        throw InvalidArgument("replay file has " + std::to_string(r.dimension()) + " columns, expected " +
                              std::to_string(replay_k));
      }
      std::cout << "ok: " << r.horizon() << " rounds, " << r.dimension() << " arms\n";
      return 0;
    }

    if (*fig) {
      FigurePreset preset = figure_preset(figure);
      if (!seeds.empty()) preset.config.seeds = parse_seed_list(seeds);
      std::cerr << preset.name << ": " << preset.description << "\n";
      std::ofstream file;
      std::ostream& out = open_out(out_path, file);
      if (preset.sweep) {
        const auto results = run_sweep(preset.config, *preset.sweep, preset.sweep_values, thread_count(threads));
        write_sweep_csv(out, results);
        print_sweep(results);
        return 0;
      }
      const auto runs = run_experiment(preset.config, thread_count(threads));
      if (!aggregate_only) {
        write_records_csv(out, runs);
        return 0;
      }
      const std::size_t per = preset.config.seeds.size();
      for (std::size_t p = 0; p < preset.config.policies.size(); ++p) {
        std::vector<std::vector<RunRecord>> recs;
        for (std::size_t s = 0; s < per; ++s) recs.push_back(runs[p * per + s].records);
        write_aggregate_csv(out, runs[p * per].policy, aggregate(recs), p == 0);
      }
      return 0;
    }

    ExperimentConfig config = load_config(config_path);
    if (!seeds.empty()) config.seeds = parse_seed_list(seeds);
    if (!granularity.empty()) config.granularity = parse_granularity(granularity);
    if (!out_path.empty()) config.output_path = out_path;

    std::ofstream file;
    std::ostream& out = open_out(config.output_path.string(), file);
    if (*sweep) {
      const auto results = run_sweep(config, parse_sweep_variable(vary), parse_value_list(values),
                                     thread_count(threads));
      write_sweep_csv(out, results);
      print_sweep(results);
      return 0;
    }
    write_records_csv(out, run_experiment(config, thread_count(threads)));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
