#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fatsched/experiment.hpp"
#include "fatsched/topology.hpp"
#include "fatsched/traffic.hpp"

using namespace fatsched;

namespace {

struct Options {
  std::vector<int> ks;
  std::vector<std::string> variants{"all"};
  std::vector<std::string> flows;
  std::vector<double> sleep_saving;
  std::vector<std::uint64_t> seeds{1};
  double volume_gb = 38.0;
  std::string gb_unit = "decimal";
  std::string profile_path;
  std::string out_path;
  std::string format = "csv";
  std::string scenario_path;
  std::string export_path;
  unsigned threads = 0;
  bool dump_topology = false;
  bool oracle = false;
  std::vector<std::uint64_t> oracle_seeds{1, 2, 3, 4, 5};
};

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
  std::vector<Variant> out;
  for (const std::string& name : names) {
    if (name == "all") {
      out.assign(all_variants().begin(), all_variants().end());
      return out;
    }
    const auto v = parse_variant(name);
    if (!v) throw CLI::ValidationError("--variant", "unknown variant '" + name + "'");
    if (std::find(out.begin(), out.end(), *v) == out.end()) out.push_back(*v);
  }
  return out;
}

std::vector<std::size_t> parse_flows(const std::vector<std::string>& values, int k) {
  std::vector<std::size_t> out;
  for (const std::string& s : values) {
    if (s == "max") {
      out.push_back(static_cast<std::size_t>(k) * k * k / 8);
      continue;
    }
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(s, &used);
    } catch (const std::exception&) {
    }
    if (used != s.size() || n <= 0)
      throw CLI::ValidationError("--flows", "expected a positive integer or 'max', got '" + s + "'");
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

// stdout unless a path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot open output file " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("failed writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run_oracle(const Options& opt, const PowerProfile& profile) {
  const auto cases = oracle_check(profile, opt.oracle_seeds, 3);
  bool ok = true;
  std::printf("variant   seed flows  pruned            exhaustive        ratio\n");
  for (const OracleCase& c : cases) {
    const bool single_mismatch = c.flows == 1 && c.pruned_objective != c.exhaustive_objective;
    ok = ok && !c.pruned_beats_exhaustive && !single_mismatch;
    std::printf("%-9s %4llu %5zu  %-16.10g  %-16.10g  %.6f%s\n",
                std::string(to_string(c.variant)).c_str(),
                static_cast<unsigned long long>(c.seed), c.flows, c.pruned_objective,
                c.exhaustive_objective, c.optimality_ratio,
                c.pruned_beats_exhaustive ? "  PRUNED BEATS EXHAUSTIVE"
                : single_mismatch         ? "  SINGLE-FLOW MISMATCH"
                                          : "");
  }
  std::printf("oracle check %s (%zu cases)\n", ok ? "passed" : "FAILED", cases.size());
  return ok ? 0 : 1;
}

int run(const Options& opt) {
  PowerProfile profile =
      opt.profile_path.empty() ? PowerProfile::calibrated_default() : PowerProfile::load(opt.profile_path);
  if (!opt.sleep_saving.empty()) profile = profile.with_sleep_saving(opt.sleep_saving.front());
  profile.validate();

  if (opt.oracle) return run_oracle(opt, profile);

  ExperimentConfig config;
  config.ks = opt.ks.empty() ? std::vector<int>{4, 6, 8} : opt.ks;

  if (opt.dump_topology) {
    if (config.ks.size() != 1) throw std::invalid_argument("--dump-topology needs a single --topology-k");
    Output out(opt.out_path);
    out.stream() << topology_to_json(build_fat_tree(config.ks.front())).dump(2) << '\n';
    out.finish();
    return 0;
  }

  config.variants = parse_variants(opt.variants);
  if (!opt.flows.empty())
    for (int k : config.ks) config.flow_counts[k] = parse_flows(opt.flows, k);
  config.sleep_fractions =
      opt.sleep_saving.empty() ? std::vector<double>{profile.sleep_saving_fraction} : opt.sleep_saving;
  config.seeds = opt.seeds;
  config.volume_bytes = opt.volume_gb * (opt.gb_unit == "binary" ? kBinaryGB : kDecimalGB);
  config.profile = profile;
  config.threads = opt.threads;

  if (!opt.scenario_path.empty()) config.scenario = load_scenario(opt.scenario_path);

  if (!opt.export_path.empty()) {
    if (config.scenario) throw std::invalid_argument("--export-scenario cannot be combined with --scenario");
    if (config.ks.size() != 1 || opt.flows.size() != 1 || config.seeds.size() != 1)
      throw std::invalid_argument(
          "--export-scenario needs a single --topology-k, --flows and --seed");
    const FatTreeTopology topo = build_fat_tree(config.ks.front());
    const std::size_t n = config.flows_for(config.ks.front()).front();
    const std::size_t max_flows = topo.hosts().size() / 2;
    if (n > max_flows)
      throw std::invalid_argument("flow count " + std::to_string(n) + " exceeds " +
                                  std::to_string(max_flows));
    config.scenario = generate_one_to_one_far(
        topo, config.seeds.front(), static_cast<double>(n) / static_cast<double>(max_flows),
        config.volume_bytes, n);
    save_scenario(*config.scenario, opt.export_path);
  }
  config.validate();

  Output out(opt.out_path);
  std::size_t failed = 0;
  if (opt.format == "csv") {
    write_csv_header(out.stream());
    run_experiment(config, [&](const ExperimentRow& row) {
      write_csv_row(out.stream(), row);
      out.stream().flush();
      failed += !row.error.empty();
    });
  } else {
    const auto rows = run_experiment(config);
    nlohmann::json j{{"rows", nlohmann::json::array()}};
    for (const ExperimentRow& row : rows) {
      j["rows"].push_back(row_to_json(row));
      failed += !row.error.empty();
    }
    const auto& fr = config.sleep_fractions;
    const double reference = std::find(fr.begin(), fr.end(), 0.6) != fr.end() ? 0.6 : fr.front();
    j["summary"] = summarize(rows, reference);
    out.stream() << j.dump(2) << '\n';
  }
  out.finish();
  if (failed > 0) {
    std::cerr << "fatsched: " << failed << " result rows reported errors\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FatTree flow scheduler simulator"};
  Options opt;
  app.add_option("--topology-k", opt.ks, "FatTree port counts (comma-separated)")
      ->delimiter(',')
      ->check(CLI::Range(4, 64));
  app.add_option("--variant", opt.variants, "lpv1|lpv2|lpv3|lpv4|sp|smart-sp|all (comma-separated)")
      ->delimiter(',');
  app.add_option("--flows", opt.flows, "flow counts or 'max'; default sweeps the standard grid")
      ->delimiter(',');
  app.add_option("--sleep-saving", opt.sleep_saving, "sleep-mode saving fractions in [0, 1]")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", opt.seeds, "traffic seeds (comma-separated)")->delimiter(',');
  app.add_option("--volume-gb", opt.volume_gb, "bytes per flow, in GB")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--gb-unit", opt.gb_unit, "GB meaning for --volume-gb")
      ->check(CLI::IsMember({"decimal", "binary"}))
      ->capture_default_str();
  app.add_option("--power-profile", opt.profile_path, "power profile JSON")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out_path, "output file (default stdout)");
  app.add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--scenario", opt.scenario_path, "replay a scenario JSON instead of generating one")
      ->check(CLI::ExistingFile);
  app.add_option("--export-scenario", opt.export_path, "write the generated scenario as JSON");
  app.add_option("--threads", opt.threads, "worker threads (0: one per core)");
  app.add_flag("--dump-topology", opt.dump_topology, "print the topology as JSON and exit");
  app.add_flag("--oracle-check", opt.oracle, "compare the pruned scheduler with exhaustive search");
  app.add_option("--oracle-seeds", opt.oracle_seeds, "seeds for --oracle-check")->delimiter(',');

  CLI11_PARSE(app, argc, argv);
  try {
    return run(opt);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "fatsched: error: " << e.what() << '\n';
    return 2;
  }
}
