// Acceptance report: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fatsched/exhaustive.hpp"
#include "fatsched/experiment.hpp"
#include "fatsched/flowsim.hpp"
#include "fatsched/scheduler.hpp"
#include "fatsched/topology.hpp"
#include "fatsched/traffic.hpp"
#include "oracles.hpp"

using namespace fatsched;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& what) { notes_.push_back(what); }
  bool passed() const { return failures_.empty(); }
  std::string detail() const {
    std::string out;
    auto append = [&out](const std::string& s) { out += (out.empty() ? "" : "; ") + s; };
    for (const auto& f : failures_) append(f);
    for (const auto& n : notes_) append(n);
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::vector<FlowRequest> full_load(const FatTreeTopology& t, std::uint64_t seed) {
  return generate_one_to_one_far(t, seed, 1.0, 38 * kDecimalGB).requests;
}

// Full grid shared by AC8, AC9 and AC10.
struct GridRun {
  std::vector<ExperimentRow> rows;
  double seconds = 0.0;

  const ExperimentRow* find(int k, Variant v, std::size_t flows, double s) const {
    for (const ExperimentRow& r : rows)
      if (r.k == k && r.variant == v && r.flows == flows && r.sleep_saving == s && r.seed == 1)
        return &r;
    return nullptr;
  }
};

const GridRun& standard_grid() {
  static const GridRun run = [] {
    GridRun g;
    const auto start = Clock::now();
    g.rows = run_experiment(ExperimentConfig{});
    g.seconds = seconds_since(start);
    return g;
  }();
  return run;
}

void ac1(Criterion& c) {
  struct Expected {
    int k;
    std::size_t switches, hosts;
    int pods;
    std::size_t max_flows;
  };
  const auto start = Clock::now();
  for (const Expected e : {Expected{4, 20, 16, 4, 8}, Expected{6, 45, 54, 6, 27},
                           Expected{8, 80, 128, 8, 64}}) {
    const FatTreeTopology t = build_fat_tree(e.k);
    const std::string k = "k=" + std::to_string(e.k);
    c.expect(t.switches().size() == e.switches, k + " switch count");
    c.expect(t.hosts().size() == e.hosts, k + " host count");
    c.expect(t.pods() == e.pods, k + " pod count");
    c.expect(t.hosts().size() / 2 == e.max_flows, k + " max flows");
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "construction took " + fmt(elapsed, 3) + " s");
  c.note("construction " + fmt(elapsed * 1e3, 1) + " ms");
}

void ac2(Criterion& c) {
  std::size_t pairs = 0;
  for (int k : {4, 6}) {
    const FatTreeTopology t = build_fat_tree(k);
    const auto adj = oracle::adjacency(t);
    for (const Host& s : t.hosts())
      for (const Host& d : t.hosts()) {
        if (s.id == d.id) continue;
        ++pairs;
        const auto paths = enumerate_paths(t, s.id, d.id);
        std::set<std::vector<SwitchId>> got;
        for (const Path& p : paths) got.insert(p.switches);
        const auto want = oracle::shortest_switch_paths(t, adj, s.id, d.id);
        if (got.size() != paths.size() || got != want)
          c.expect(false, "k=" + std::to_string(k) + " pair " + std::to_string(s.id) + "->" +
                              std::to_string(d.id) + " differs from BFS");
      }
  }
  c.note(std::to_string(pairs) + " host pairs compared");
}

void ac3(Criterion& c) {
  const PowerProfile profile = PowerProfile::calibrated_default();
  std::size_t checked = 0;
  for (int k : {4, 6, 8}) {
    const FatTreeTopology t = build_fat_tree(k);
    for (std::uint64_t seed : {1u, 2u}) {
      Scheduler s(t, profile, {Variant::LPv1, std::nullopt});
      std::size_t product = 1;
      for (const FlowRequest& r : full_load(t, seed)) {
        const std::size_t paths = enumerate_paths(t, r.src, r.dst).size();
        if (product * paths > 1024) break;
        product *= paths;
        s.schedule(r);
        ++checked;
        c.expect(s.combinations().size() == product,
                 "k=" + std::to_string(k) + " stored " + std::to_string(s.combinations().size()) +
                     " vs product " + std::to_string(product));
      }
    }
  }
  const FatTreeTopology t4 = build_fat_tree(4);
  Scheduler s(t4, profile, {Variant::LPv1, std::nullopt});
  for (const FlowRequest& r : generate_one_to_one_far(t4, 1, 1.0, 1e9, 3).requests) s.schedule(r);
  c.expect(s.combinations().size() == 64, "k=4 three Far flows stored " +
                                              std::to_string(s.combinations().size()));
  c.note(std::to_string(checked) + " prefixes checked");
}

void ac4(Criterion& c) {
  const auto cases = oracle_check(PowerProfile::calibrated_default(), {1, 2, 3, 4, 5}, 3);
  std::map<std::size_t, double> worst;
  for (const OracleCase& oc : cases) {
    const std::string id = std::string(to_string(oc.variant)) + " seed " + std::to_string(oc.seed) +
                           " n=" + std::to_string(oc.flows);
    c.expect(!oc.pruned_beats_exhaustive, id + " pruned beats exhaustive");
    if (oc.flows == 1)
      c.expect(oc.pruned_objective == oc.exhaustive_objective, id + " single-flow mismatch");
    auto [it, fresh] = worst.emplace(oc.flows, oc.optimality_ratio);
    if (!fresh) it->second = std::min(it->second, oc.optimality_ratio);
  }
  for (const auto& [n, ratio] : worst)
    if (n > 1) c.note("worst optimality ratio n=" + std::to_string(n) + ": " + fmt(ratio, 4));
}

void ac5(Criterion& c) {
  const FatTreeTopology t = build_fat_tree(4);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> count(1, 8);
  std::uniform_int_distribution<HostId> host(0, static_cast<HostId>(t.hosts().size() - 1));
  std::vector<double> capacity(t.channel_count());
  for (ChannelId ch = 0; ch < capacity.size(); ++ch) capacity[ch] = t.link_at(t.link_of(ch)).capacity_bps;
  double worst = 0.0;
  for (int instance = 0; instance < 200; ++instance) {
    Assignment a;
    const std::size_t n = count(rng);
    for (FlowId id = 0; id < n; ++id) {
      HostId s = host(rng), d = host(rng);
      while (d == s) d = host(rng);
      const auto paths = enumerate_paths(t, s, d);
      a.emplace(id, paths[std::uniform_int_distribution<std::size_t>(0, paths.size() - 1)(rng)]);
    }
    std::vector<std::vector<std::size_t>> channels;
    for (const auto& [id, p] : a) channels.emplace_back(p.channels.begin(), p.channels.end());
    const auto want = oracle::water_fill(capacity, channels);
    const Allocation got = max_min_allocate(t, a);
    std::size_t i = 0;
    for (const auto& [id, rate] : got) {
      const double rel = std::abs(rate - want[i]) / want[i];
      worst = std::max(worst, rel);
      ++i;
    }
  }
  char err[32];
  std::snprintf(err, sizeof err, "%.3g", worst);
  c.expect(worst <= 1e-9, std::string("max relative error ") + err);
  c.note(std::string("200 instances, max relative error ") + err);
}

void ac6(Criterion& c) {
  const FatTreeTopology t = build_fat_tree(4);
  auto flow = [&](FlowId id, HostId s, HostId d, double vol) {
    return Flow{id, s, d, enumerate_paths(t, s, d).front(), vol, vol, FlowState::Pending};
  };
  std::vector<Flow> single{flow(0, 0, 4, 38 * kDecimalGB)};
  const double lone = simulate_ttc(t, single).completion_s.at(0);
  c.expect(lone == 304.0, "single flow " + fmt(lone, 9) + " s");

  std::vector<Flow> staggered{flow(0, 0, 2, 38 * kDecimalGB), flow(1, 1, 2, 19 * kDecimalGB)};
  const TtcResult r = simulate_ttc(t, staggered);
  c.expect(r.completion_s.at(1) == 304.0, "smaller flow " + fmt(r.completion_s.at(1), 9) + " s");
  c.expect(r.completion_s.at(0) == 456.0, "larger flow " + fmt(r.completion_s.at(0), 9) + " s");
  c.note("304 / 304 / 456 s");
}

void ac7(Criterion& c) {
  const PowerProfile profile = PowerProfile::load(FATSCHED_DEFAULT_PROFILE);
  const std::map<int, double> expected{{4, 3032.0}, {6, 6856.0}, {8, 12114.0}};
  for (const auto& [k, watts] : expected) {
    const FatTreeTopology t = build_fat_tree(k);
    const auto reqs = full_load(t, 1);
    std::map<Variant, double> pc;
    for (Variant v : {Variant::SP, Variant::SmartSP}) {
      Scheduler s(t, profile, {v});
      for (const FlowRequest& r : reqs) s.schedule(r);
      pc[v] = s.total_power();
    }
    const double sp = pc[Variant::SP], ssp = pc[Variant::SmartSP];
    const double dev = (sp - watts) / watts * 100.0;
    const double spread = std::abs(sp - ssp) / ssp * 100.0;
    const std::string tag = "k=" + std::to_string(k);
    c.expect(std::abs(dev) <= 3.0, tag + " SP " + fmt(sp, 1) + " W off by " + fmt(dev) + "%");
    c.expect(spread < 1.0, tag + " SP/SmartSP spread " + fmt(spread) + "%");
    c.note(tag + " SP " + fmt(sp, 1) + " W (" + fmt(dev) + "%), SmartSP " + fmt(ssp, 1) +
           " W, spread " + fmt(spread) + "%");
  }
}

void ac8(Criterion& c) {
  const GridRun& grid = standard_grid();
  const std::vector<double> fractions{0.2, 0.4, 0.6, 0.8};
  const std::map<Variant, std::vector<double>> target{
      {Variant::LPv1, {12, 23, 35, 46}},
      {Variant::LPv2, {6, 12, 17, 23}},
      {Variant::LPv3, {5, 11, 16, 22}},
      {Variant::LPv4, {13, 24, 36, 48}}};
  for (const auto& [v, want] : target) {
    std::vector<double> got;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      const ExperimentRow* row = grid.find(6, v, 27, fractions[i]);
      if (!row || !row->error.empty()) {
        c.expect(false, std::string(to_string(v)) + " missing row");
        got.push_back(NAN);
        continue;
      }
      got.push_back(row->power_saving_pct);
      c.expect(std::abs(row->power_saving_pct - want[i]) <= 8.0,
               std::string(to_string(v)) + " s=" + fmt(fractions[i], 1) + " saving " +
                   fmt(row->power_saving_pct, 1) + "% vs " + fmt(want[i], 0) + "%");
    }
    std::string line = std::string(to_string(v)) + " {";
    for (std::size_t i = 0; i < got.size(); ++i) line += (i ? ", " : "") + fmt(got[i], 1);
    c.note(line + "}%");
    if (v == Variant::LPv1 || v == Variant::LPv4) {
      const double ratio = got[1] / got[0];
      c.expect(ratio >= 1.7 && ratio <= 2.2,
               std::string(to_string(v)) + " saving ratio 0.4/0.2 = " + fmt(ratio));
    }
  }
}

void ac9(Criterion& c) {
  const GridRun& grid = standard_grid();
  const std::map<int, std::size_t> full{{4, 8}, {6, 27}, {8, 64}};
  for (const auto& [k, flows] : full) {
    const std::string tag = "k=" + std::to_string(k) + " ";
    std::map<Variant, const ExperimentRow*> row;
    bool complete = true;
    for (Variant v : all_variants()) {
      row[v] = grid.find(k, v, flows, 0.6);
      if (!row[v] || !row[v]->error.empty()) complete = false;
    }
    if (!complete) {
      c.expect(false, tag + "missing rows");
      continue;
    }
    auto pc = [&](Variant v) { return row[v]->total_pc; };
    auto ttc = [&](Variant v) { return row[v]->ttc_mean_s; };
    const double cap = pc(Variant::SmartSP) * 1.01;
    c.expect(pc(Variant::LPv4) <= pc(Variant::LPv1), tag + "PC(LPv4) > PC(LPv1)");
    c.expect(pc(Variant::LPv1) <= pc(Variant::LPv2), tag + "PC(LPv1) > PC(LPv2)");
    c.expect(pc(Variant::LPv2) <= cap, tag + "PC(LPv2) > 1.01 PC(SmartSP)");
    c.expect(pc(Variant::LPv3) <= cap, tag + "PC(LPv3) > 1.01 PC(SmartSP)");
    c.expect(ttc(Variant::SmartSP) <= ttc(Variant::SP), tag + "TTC(SmartSP) > TTC(SP)");
    c.expect(ttc(Variant::LPv4) >= ttc(Variant::LPv3), tag + "TTC(LPv4) < TTC(LPv3)");

    auto deg = [&](Variant v) { return row[v]->degradation_pct.value_or(NAN); };
    const double d1 = deg(Variant::LPv1), d2 = deg(Variant::LPv2), d3 = deg(Variant::LPv3);
    c.expect(d1 <= 15.0, tag + "LPv1 degradation " + fmt(d1, 1) + "%");
    c.expect(d2 >= 35.0 && d2 <= 70.0, tag + "LPv2 degradation " + fmt(d2, 1) + "%");
    c.expect(d3 >= 35.0 && d3 <= 70.0, tag + "LPv3 degradation " + fmt(d3, 1) + "%");
    c.note(tag + "degradation lpv1/lpv2/lpv3 " + fmt(d1, 1) + "/" + fmt(d2, 1) + "/" + fmt(d3, 1) +
           "%, TTC lpv4/smart-sp " + fmt(ttc(Variant::LPv4) / ttc(Variant::SmartSP), 3));
  }
}

void ac10(Criterion& c) {
  const PowerProfile profile = PowerProfile::calibrated_default();
  std::size_t requests = 0;
  for (int k : {4, 6, 8}) {
    const FatTreeTopology t = build_fat_tree(k);
    for (Variant v : all_variants()) {
      Scheduler s(t, profile, {v});
      for (const FlowRequest& r : full_load(t, 1)) {
        const ScheduleDecision d = s.schedule(r);
        ++requests;
        c.expect(d.candidates_evaluated <= 3 * d.path_count,
                 "k=" + std::to_string(k) + " " + std::string(to_string(v)) + " evaluated " +
                     std::to_string(d.candidates_evaluated) + " candidates");
      }
    }
  }

  const FatTreeTopology t8 = build_fat_tree(8);
  const TrafficScenario sc = generate_one_to_one_far(t8, 1, 1.0, 38 * kDecimalGB);
  double slowest = 0.0;
  for (Variant v : all_variants()) {
    const auto start = Clock::now();
    run_variant(t8, profile, v, sc);
    slowest = std::max(slowest, seconds_since(start));
  }
  c.expect(slowest < 10.0, "k=8 64-flow scenario took " + fmt(slowest) + " s");

  const GridRun& grid = standard_grid();
  c.expect(grid.seconds < 600.0, "full grid took " + fmt(grid.seconds, 1) + " s");
  std::size_t errors = 0;
  for (const ExperimentRow& r : grid.rows) errors += !r.error.empty();
  c.expect(errors == 0, std::to_string(errors) + " grid rows failed");
  c.note(std::to_string(requests) + " requests bounded, k=8 scenario " + fmt(slowest, 2) +
         " s, full grid " + fmt(grid.seconds, 1) + " s (" + std::to_string(grid.rows.size()) +
         " rows)");
}

void ac11(Criterion& c) {
  const PowerProfile profile = PowerProfile::calibrated_default();
  std::size_t checks = 0;
  for (int k : {4, 6, 8}) {
    const FatTreeTopology t = build_fat_tree(k);
    for (Variant v : all_variants()) {
      Scheduler s(t, profile, {v});
      const std::string tag = "k=" + std::to_string(k) + " " + std::string(to_string(v)) + " ";
      for (const FlowRequest& r : full_load(t, 1)) {
        const ScheduleDecision d = s.schedule(r);
        const NetworkState& n = s.network();
        ++checks;

        const std::vector<bool> used = footprint(t, n.installed);
        for (std::size_t sw = 0; sw < used.size(); ++sw)
          if (used[sw] && n.modes[sw] == SwitchMode::Sleeping)
            c.expect(false, tag + "sleeping switch " + std::to_string(sw) + " carries a flow");

        const auto load = channel_loads(t, n.installed, n.allocation);
        for (double l : load)
          if (l > t.link_rate() * (1 + 1e-12)) c.expect(false, tag + "channel over capacity");

        double bw = 0.0;
        for (const auto& [id, rate] : n.allocation) bw += rate;
        const double pc = s.total_power();
        if (std::abs(d.total_pc - pc) > 1e-9 * pc || std::abs(d.sum_bw - bw) > 1e-9 * bw)
          c.expect(false, tag + "cached metrics drift after flow " + std::to_string(r.id));
      }
    }
  }

  ExperimentConfig config;
  config.ks = {4, 6};
  config.flow_counts = {{4, {8}}, {6, {10}}};
  config.sleep_fractions = {0.4, 0.6};
  config.seeds = {1, 2};
  auto csv = [&config](unsigned threads) {
    config.threads = threads;
    std::ostringstream out;
    write_csv_header(out);
    for (const ExperimentRow& r : run_experiment(config)) write_csv_row(out, r);
    return out.str();
  };
  const std::string first = csv(1);
  c.expect(first == csv(1) && first == csv(3), "CSV bytes differ between identical runs");
  c.note(std::to_string(checks) + " scheduling states checked, replay byte-identical");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"AC1 topology exactness", ac1},
      {"AC2 path enumeration vs BFS oracle", ac2},
      {"AC3 combination-count law", ac3},
      {"AC4 pruned vs exhaustive", ac4},
      {"AC5 max-min vs water-filling oracle", ac5},
      {"AC6 TTC arithmetic", ac6},
      {"AC7 power calibration", ac7},
      {"AC8 sleep-saving sweep at k=6, 27 flows", ac8},
      {"AC9 variant ordering", ac9},
      {"AC10 scalability", ac10},
      {"AC11 invariant suites", ac11},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Criterion c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.passed();
    std::printf("[%s] %s: %s\n", c.passed() ? "PASS" : "FAIL", name.c_str(), c.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
