#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fatsched/power.hpp"
#include "fatsched/scheduler.hpp"
#include "fatsched/topology.hpp"
#include "fatsched/traffic.hpp"

namespace fatsched {

// Flow counts swept per FatTree size; other sizes default to full load.
std::vector<std::size_t> standard_flow_counts(int k);

struct ExperimentConfig {
  std::vector<int> ks{4, 6, 8};
  std::vector<Variant> variants{all_variants().begin(), all_variants().end()};
  std::map<int, std::vector<std::size_t>> flow_counts;  // empty entry: standard_flow_counts(k)
  std::vector<double> sleep_fractions{0.2, 0.4, 0.6, 0.8};
  std::vector<std::uint64_t> seeds{1};
  double volume_bytes = 38.0 * kDecimalGB;
  PowerProfile profile = PowerProfile::calibrated_default();
  std::optional<TrafficScenario> scenario;  // replayed instead of generated
  unsigned threads = 0;                     // 0: hardware concurrency

  std::vector<std::size_t> flows_for(int k) const;
  void validate() const;
};

// Outcome of one variant on one scenario.
struct VariantRun {
  Variant variant = Variant::LPv1;
  double total_pc = 0.0;
  double sum_bw = 0.0;
  std::size_t active_switches = 0;
  std::size_t sleeping_switches = 0;
  std::map<FlowId, Path> paths;
  std::map<FlowId, double> ttc_s;
  double ttc_mean_s = 0.0;
  double ttc_max_s = 0.0;
  std::size_t max_candidates = 0;  // per request
  bool candidate_bound_held = true;  // candidates <= 3 * path count on every request
};

VariantRun run_variant(const FatTreeTopology& topo, const PowerProfile& profile, Variant v,
                       const TrafficScenario& scenario);

struct ExperimentRow {
  int k = 0;
  Variant variant = Variant::LPv1;
  std::size_t flows = 0;
  double sleep_saving = 0.0;
  std::uint64_t seed = 0;
  double total_pc = 0.0;
  double sum_bw = 0.0;
  std::size_t active_switches = 0;
  std::size_t sleeping_switches = 0;
  double ttc_mean_s = 0.0;
  double ttc_max_s = 0.0;
  std::vector<double> ttc_per_flow;
  double power_saving_pct = 0.0;
  std::optional<double> degradation_pct;
  std::string error;  // set for grid points that could not run
};

// (pc_smart_sp - pc_variant) / pc_smart_sp * 100
double power_saving_pct(double pc_variant, double pc_smart_sp);
// (pc_x - pc_lpv4) / (pc_smart_sp - pc_lpv4) * 100
double degradation_pct(double pc_x, double pc_lpv4, double pc_smart_sp);

struct GridPoint {
  int k = 4;
  std::size_t flows = 0;
  double sleep_saving = 0.6;
  std::uint64_t seed = 1;
};

std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

// Runs every configured variant (plus the LPv4 and SmartSP references) on a
// single scenario. Errors are reported in the rows instead of thrown.
std::vector<ExperimentRow> run_grid_point(const ExperimentConfig& config, const GridPoint& point);

using RowSink = std::function<void(const ExperimentRow&)>;

// Grid points run concurrently; rows reach the sink in grid order.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const RowSink& sink = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ExperimentRow& row);
nlohmann::json row_to_json(const ExperimentRow& row);

// Plot-ready views keyed "table2", "table3", "fig3" .. "fig6".
nlohmann::json summarize(const std::vector<ExperimentRow>& rows, double reference_sleep_saving);

struct OracleCase {
  Variant variant = Variant::LPv1;
  std::uint64_t seed = 0;
  std::size_t flows = 0;
  double pruned_objective = 0.0;
  double exhaustive_objective = 0.0;
  double optimality_ratio = 1.0;  // <= 1; 1 means the pruned search found the optimum
  bool pruned_beats_exhaustive = false;
};

// Pruned scheduler vs. exhaustive search on k = 4 with 1..max_flows Far flows.
// The exhaustive search scores against the state the scheduler saw before its
// last request.
std::vector<OracleCase> oracle_check(const PowerProfile& profile,
                                     const std::vector<std::uint64_t>& seeds,
                                     std::size_t max_flows = 3);

}  // namespace fatsched
