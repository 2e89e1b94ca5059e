#include "fatsched/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "fatsched/exhaustive.hpp"
#include "fatsched/flowsim.hpp"

namespace fatsched {

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::size_t> standard_flow_counts(int k) {
  switch (k) {
    case 4: return {1, 3, 5, 8};
    case 6: return {2, 5, 10, 15, 20, 27};
    case 8: return {5, 20, 35, 50, 64};
    default: return {static_cast<std::size_t>(k) * k * k / 8};
  }
}

std::vector<std::size_t> ExperimentConfig::flows_for(int k) const {
  const auto it = flow_counts.find(k);
  if (it == flow_counts.end() || it->second.empty()) return standard_flow_counts(k);
  return it->second;
}

void ExperimentConfig::validate() const {
  if (ks.empty() || variants.empty() || sleep_fractions.empty() || seeds.empty())
    throw std::invalid_argument("experiment grid has an empty axis");
  for (double s : sleep_fractions)
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("sleep saving fraction outside [0, 1]");
  if (!(volume_bytes > 0.0)) throw std::invalid_argument("flow volume must be positive");
  if (scenario && ks.size() != 1)
    throw std::invalid_argument("a replayed scenario needs exactly one topology size");
  profile.validate();
}

VariantRun run_variant(const FatTreeTopology& topo, const PowerProfile& profile, Variant v,
                       const TrafficScenario& scenario) {
  Scheduler sched(topo, profile, {v});
  VariantRun run;
  run.variant = v;
  for (const FlowRequest& r : scenario.requests) {
    const ScheduleDecision d = sched.schedule(r);
    run.max_candidates = std::max(run.max_candidates, d.candidates_evaluated);
    if (d.candidates_evaluated > 3 * d.path_count) run.candidate_bound_held = false;
  }
  const NetworkState& net = sched.network();
  run.total_pc = sched.total_power();
  for (const auto& [id, r] : net.allocation) run.sum_bw += r;
  run.sleeping_switches = net.sleeping_count();
  run.active_switches = net.modes.size() - run.sleeping_switches;
  run.paths = net.installed;

  std::vector<Flow> flows;
  for (const FlowRequest& r : scenario.requests)
    flows.push_back({r.id, r.src, r.dst, net.installed.at(r.id), r.volume_bytes, r.volume_bytes,
                     FlowState::Pending});
  const TtcResult ttc =
      simulate_ttc(topo, flows, [&sched](FlowId id, double) { sched.complete(id); });
  run.ttc_s = ttc.completion_s;
  for (const auto& [id, t] : run.ttc_s) {
    run.ttc_mean_s += t;
    run.ttc_max_s = std::max(run.ttc_max_s, t);
  }
  if (!run.ttc_s.empty()) run.ttc_mean_s /= static_cast<double>(run.ttc_s.size());
  return run;
}

double power_saving_pct(double pc_variant, double pc_smart_sp) {
  if (!(pc_smart_sp > 0.0)) throw std::invalid_argument("baseline power must be positive");
  return (pc_smart_sp - pc_variant) / pc_smart_sp * 100.0;
}

double degradation_pct(double pc_x, double pc_lpv4, double pc_smart_sp) {
  if (!(pc_smart_sp > pc_lpv4))
    throw std::domain_error("degradation undefined: SmartSP power does not exceed LPv4 power");
  return (pc_x - pc_lpv4) / (pc_smart_sp - pc_lpv4) * 100.0;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  std::vector<GridPoint> grid;
  for (int k : config.ks) {
    const auto flows = config.scenario
                           ? std::vector<std::size_t>{config.scenario->requests.size()}
                           : config.flows_for(k);
    for (std::size_t n : flows)
      for (double s : config.sleep_fractions)
        for (std::uint64_t seed : config.seeds) grid.push_back({k, n, s, seed});
  }
  return grid;
}

std::vector<ExperimentRow> run_grid_point(const ExperimentConfig& config, const GridPoint& point) {
  std::vector<ExperimentRow> rows;
  for (Variant v : config.variants) {
    ExperimentRow row;
    row.k = point.k;
    row.variant = v;
    row.flows = point.flows;
    row.sleep_saving = point.sleep_saving;
    row.seed = point.seed;
    rows.push_back(row);
  }

  try {
    const FatTreeTopology topo = build_fat_tree(point.k);
    const std::size_t max_flows = topo.hosts().size() / 2;
    if (point.flows == 0 || point.flows > max_flows)
      throw std::invalid_argument("flow count " + std::to_string(point.flows) +
                                  " outside 1.." + std::to_string(max_flows) + " for k=" +
                                  std::to_string(point.k));
    const TrafficScenario scenario =
        config.scenario ? *config.scenario
                        : generate_one_to_one_far(
                              topo, point.seed,
                              static_cast<double>(point.flows) / static_cast<double>(max_flows),
                              config.volume_bytes, point.flows);
    const PowerProfile profile = config.profile.with_sleep_saving(point.sleep_saving);

    std::map<Variant, VariantRun> runs;
    for (Variant v : config.variants) runs.emplace(v, run_variant(topo, profile, v, scenario));
    for (Variant v : {Variant::LPv4, Variant::SmartSP})
      if (!runs.contains(v)) runs.emplace(v, run_variant(topo, profile, v, scenario));
    const double pc_lpv4 = runs.at(Variant::LPv4).total_pc;
    const double pc_ssp = runs.at(Variant::SmartSP).total_pc;

    for (ExperimentRow& row : rows) {
      const VariantRun& r = runs.at(row.variant);
      row.total_pc = r.total_pc;
      row.sum_bw = r.sum_bw;
      row.active_switches = r.active_switches;
      row.sleeping_switches = r.sleeping_switches;
      row.ttc_mean_s = r.ttc_mean_s;
      row.ttc_max_s = r.ttc_max_s;
      for (const auto& [id, t] : r.ttc_s) row.ttc_per_flow.push_back(t);
      row.power_saving_pct = power_saving_pct(r.total_pc, pc_ssp);
      // Bounds coincide when there is nothing to consolidate.
      if (pc_ssp > pc_lpv4) row.degradation_pct = degradation_pct(r.total_pc, pc_lpv4, pc_ssp);
    }
  } catch (const std::exception& e) {
    for (ExperimentRow& row : rows) row.error = e.what();
  }
  return rows;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const RowSink& sink) {
  config.validate();
  const std::vector<GridPoint> grid = expand_grid(config);
  std::vector<std::optional<std::vector<ExperimentRow>>> done(grid.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < grid.size(); i = next++) {
        auto rows = run_grid_point(config, grid[i]);
        {
          std::lock_guard lock(mu);
          done[i] = std::move(rows);
        }
        cv.notify_all();
      }
    });

  std::vector<ExperimentRow> all;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return done[i].has_value(); });
    std::vector<ExperimentRow> rows = std::move(*done[i]);
    lock.unlock();
    for (ExperimentRow& row : rows) {
      if (sink) sink(row);
      all.push_back(std::move(row));
    }
  }
  return all;
}

void write_csv_header(std::ostream& out) {
  out << "k,variant,flows,sleep_saving,seed,total_pc_w,sum_bw_bps,active_switches,"
         "sleeping_switches,ttc_mean_s,ttc_max_s,power_saving_pct,degradation_pct,error\n";
}

void write_csv_row(std::ostream& out, const ExperimentRow& row) {
  std::string error = row.error;
  std::replace(error.begin(), error.end(), ',', ';');
  std::replace(error.begin(), error.end(), '\n', ' ');
  out << row.k << ',' << to_string(row.variant) << ',' << row.flows << ','
      << num(row.sleep_saving) << ',' << row.seed << ',';
  if (row.error.empty()) {
    out << num(row.total_pc) << ',' << num(row.sum_bw) << ',' << row.active_switches << ','
        << row.sleeping_switches << ',' << num(row.ttc_mean_s) << ',' << num(row.ttc_max_s)
        << ',' << num(row.power_saving_pct) << ','
        << (row.degradation_pct ? num(*row.degradation_pct) : std::string{}) << ',';
  } else {
    out << ",,,,,,,,";
  }
  out << error << '\n';
}

nlohmann::json row_to_json(const ExperimentRow& row) {
  nlohmann::json j{{"k", row.k},
                   {"variant", to_string(row.variant)},
                   {"flows", row.flows},
                   {"sleep_saving", row.sleep_saving},
                   {"seed", row.seed}};
  if (!row.error.empty()) {
    j["error"] = row.error;
    return j;
  }
  j["total_pc_w"] = row.total_pc;
  j["sum_bw_bps"] = row.sum_bw;
  j["active_switches"] = row.active_switches;
  j["sleeping_switches"] = row.sleeping_switches;
  j["ttc_mean_s"] = row.ttc_mean_s;
  j["ttc_max_s"] = row.ttc_max_s;
  j["ttc_per_flow_s"] = row.ttc_per_flow;
  j["power_saving_pct"] = row.power_saving_pct;
  j["degradation_pct"] = row.degradation_pct ? nlohmann::json(*row.degradation_pct) : nlohmann::json();
  return j;
}

nlohmann::json summarize(const std::vector<ExperimentRow>& rows, double reference_sleep_saving) {
  using nlohmann::json;
  std::map<int, std::size_t> max_flows;
  std::uint64_t first_seed = 0;
  bool have_seed = false;
  for (const ExperimentRow& r : rows) {
    if (!r.error.empty()) continue;
    max_flows[r.k] = std::max(max_flows[r.k], r.flows);
    if (!have_seed) {
      first_seed = r.seed;
      have_seed = true;
    }
  }
  auto at_full_load = [&](const ExperimentRow& r) {
    return r.error.empty() && r.seed == first_seed && r.flows == max_flows[r.k] &&
           r.sleep_saving == reference_sleep_saving;
  };
  const std::set<Variant> lp{Variant::LPv1, Variant::LPv2, Variant::LPv3, Variant::LPv4};

  json table2 = json::object(), table3 = json::object(), fig3 = json::object(),
       fig4 = json::object(), fig5 = json::object(), fig6 = json::object();
  for (const ExperimentRow& r : rows) {
    if (!r.error.empty() || r.seed != first_seed) continue;
    const std::string k = "k" + std::to_string(r.k);
    const std::string v{to_string(r.variant)};
    if (at_full_load(r)) {
      if (r.variant == Variant::SP || r.variant == Variant::SmartSP) {
        table2[k][v] = r.total_pc;
        fig3[k][v] = r.ttc_mean_s;
      }
      if (lp.contains(r.variant)) fig5[k][v] = r.ttc_mean_s;
      if (lp.contains(r.variant) && r.variant != Variant::LPv4 && r.degradation_pct)
        fig6[k][v] = *r.degradation_pct;
    }
    if (r.sleep_saving == reference_sleep_saving)
      fig4[k][v].push_back({{"flows", r.flows}, {"total_pc_w", r.total_pc}});
    if (r.k == 6 && r.flows == max_flows[6] && lp.contains(r.variant))
      table3[v][num(r.sleep_saving)] = r.power_saving_pct;
  }
  return {{"table2", table2}, {"table3", table3}, {"fig3", fig3},
          {"fig4", fig4},     {"fig5", fig5},     {"fig6", fig6}};
}

std::vector<OracleCase> oracle_check(const PowerProfile& profile,
                                     const std::vector<std::uint64_t>& seeds,
                                     std::size_t max_flows) {
  const FatTreeTopology topo = build_fat_tree(4);
  std::vector<OracleCase> out;
  for (std::uint64_t seed : seeds) {
    const TrafficScenario sc = generate_one_to_one_far(topo, seed, 1.0, 1e9, max_flows);
    for (Variant v : all_variants()) {
      if (v == Variant::SP) continue;
      for (std::size_t n = 1; n <= max_flows; ++n) {
        Scheduler sched(topo, profile, {v});
        for (std::size_t i = 0; i + 1 < n; ++i) sched.schedule(sc.requests[i]);
        const NetworkState before = sched.network();
        const ScheduleDecision d = sched.schedule(sc.requests[n - 1]);
        const ExhaustiveResult ex = exhaustive_search(
            topo, profile, v, before, std::span(sc.requests).first(n));

        OracleCase c;
        c.variant = v;
        c.seed = seed;
        c.flows = n;
        c.pruned_objective = d.objective;
        c.exhaustive_objective = ex.best.objective;
        const bool maximize = direction(v) == Direction::Maximize;
        c.optimality_ratio = maximize ? d.objective / ex.best.objective
                                      : ex.best.objective / d.objective;
        Combination pruned;
        pruned.assignment = sched.network().installed;
        pruned.objective = d.objective;
        pruned.transition_degree = d.transition_degree;
        pruned.total_pc = d.total_pc;
        c.pruned_beats_exhaustive = ranks_before(pruned, ex.best, v) &&
                                    pruned.assignment != ex.best.assignment;
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace fatsched
