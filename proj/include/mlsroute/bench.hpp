#pragma once

// Benchmark harness: random labeling, admissible flow sampling, capacity
// profiles and per-mode conflict statistics.

#include <array>
#include <chrono>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mlsroute/routing_io.hpp"

namespace mlsroute {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingExhausted : public BenchError {
 public:
  using BenchError::BenchError;
};

/// Derives an independent child seed (splitmix64 finalizer over seed and stream).
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline bool is_host(const Node& n) { return n.role != NodeRole::Forwarder; }

/// Uniform random level in 1..levels for every node; hosts also get a random
/// nonempty category subset.
inline Topology assign_labels(Topology t, int levels, std::uint64_t seed) {
  if (levels < 2 || levels > t.level_count()) {
    throw BenchError("levels must be in 2.." + std::to_string(t.level_count()));
  }
  const std::size_t ncat = t.universe()->size();
  if (ncat == 0) throw BenchError("category universe is empty");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(1, levels);
  const std::uint64_t full = t.universe()->full_mask();
  std::uniform_int_distribution<std::uint64_t> subset(1, full);
  for (NodeIndex i = 0; i < t.node_count(); ++i) {
    Label label{SecurityLevel(level(rng)), CategorySet(t.universe())};
    if (is_host(t.node(i))) label.categories = CategorySet(t.universe(), subset(rng));
    t.set_label(i, std::move(label));
  }
  return t;
}

struct SamplingOptions {
  std::vector<ObjectMode> modes{ObjectMode::Provider};  // drawn uniformly per flow
  Capacity demand{1};
  std::size_t attempts_per_flow = 10000;
};

/// Rejection-samples host pairs until `count` admissible flows are drawn.
/// Each flow carries the categories both endpoints hold.
inline std::vector<FlowRequest> sample_flows(const Topology& t, std::size_t count, std::uint64_t seed,
                                             const SamplingOptions& opt = {}) {
  std::vector<NodeIndex> hosts;
  for (NodeIndex i = 0; i < t.node_count(); ++i) {
    if (t.node(i).can_initiate() || t.node(i).role == NodeRole::Object) hosts.push_back(i);
  }
  if (hosts.size() < 2 || opt.modes.empty()) throw SamplingExhausted("fewer than two candidate endpoints");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, hosts.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_mode(0, opt.modes.size() - 1);
  std::vector<FlowRequest> out;
  std::size_t misses = 0;
  while (out.size() < count) {
    if (misses > opt.attempts_per_flow) {
      throw SamplingExhausted("no admissible pair after " + std::to_string(misses) + " attempts");
    }
    const NodeIndex s = hosts[pick(rng)];
    const NodeIndex o = hosts[pick(rng)];
    const ObjectMode mode = opt.modes[pick_mode(rng)];
    if (s == o || !t.node(s).can_initiate() || !t.node(o).serves(mode)) {
      ++misses;
      continue;
    }
    FlowRequest f;
    f.id = "f" + std::to_string(out.size());
    f.subject = t.node(s).id;
    f.object = t.node(o).id;
    f.mode = mode;
    f.demand = opt.demand;
    f.required_categories = t.node(s).label.categories.intersect(t.node(o).label.categories);
    if (f.required_categories.empty() || !access_permitted(f, t)) {
      ++misses;
      continue;
    }
    misses = 0;
    out.push_back(std::move(f));
  }
  return out;
}

enum class CapacityProfile { Ample, Congested };

inline std::string_view to_string(CapacityProfile p) { return p == CapacityProfile::Ample ? "ample" : "congested"; }

struct BenchmarkConfig {
  int fat_tree_k = 8;
  std::optional<Topology> topology;  // overrides fat_tree_k when set
  std::vector<int> levels{2, 3, 4};
  std::uint64_t seed = 1;
  std::size_t flow_count = 200;
  std::size_t runs = 30;
  SamplingOptions sampling;
  CapacityProfile profile = CapacityProfile::Ample;
  double congestion_load = 1.5;  // target mean link load / capacity
  std::vector<RoutingMode> modes{RoutingMode::StrictMaximize, RoutingMode::MinimizeConflict};
  std::optional<int> gamma;

  void validate() const {
    if (flow_count < 1) throw BenchError("flow count must be at least 1");
    if (runs < 1) throw BenchError("run count must be at least 1");
    if (levels.empty() || modes.empty()) throw BenchError("levels and modes must be nonempty");
    if (congestion_load <= 0) throw BenchError("congestion load must be positive");
  }
};

/// Counts pooled over runs for one (mode, levels) cell. buckets[d] counts
/// routed flows whose worst conflict is d levels (0 = conflict free).
struct BenchCell {
  RoutingMode mode = RoutingMode::MinimizeConflict;
  int levels = 2;
  std::size_t runs = 0;
  std::size_t flows = 0;
  std::size_t admitted = 0;
  std::size_t routed = 0;
  std::array<std::size_t, 4> buckets{};
  std::size_t rejected = 0;  // admitted but not routed
  double seconds = 0;

  [[nodiscard]] double fraction(std::size_t n, bool over_admitted = true) const {
    const std::size_t d = over_admitted ? admitted : flows;
    return d == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(d);
  }
  [[nodiscard]] double zero_conflict() const { return fraction(buckets[0]); }
};

struct BenchFailure {
  int levels;
  std::size_t run;
  std::string what;
};

struct BenchmarkReport {
  std::size_t flow_count = 0;
  std::size_t runs = 0;
  CapacityProfile profile = CapacityProfile::Ample;
  std::string topology;
  std::vector<BenchCell> cells;  // levels-major, then mode
  std::vector<BenchFailure> failures;

  [[nodiscard]] const BenchCell* cell(RoutingMode m, int levels) const {
    for (const auto& c : cells) {
      if (c.mode == m && c.levels == levels) return &c;
    }
    return nullptr;
  }
};

namespace bench_detail {

/// Sets every link to a uniform capacity so that mean load / capacity is
/// about `load`, measured against a capacity-free conflict-minimizing routing.
/// Loads are folded onto twins the same way reservations are.
inline void congest(Topology& t, const std::vector<FlowRequest>& flows, double load, std::optional<int> gamma) {
  Topology roomy = t;
  Capacity big(0);
  for (const auto& f : flows) big += f.demand;
  for (LinkIndex l = 0; l < roomy.link_count(); ++l) roomy.set_capacity(l, big);
  RoutingConfig cfg;
  cfg.gamma = gamma;
  const auto ref = route_all(roomy, flows, cfg);
  Capacity used(0);
  std::size_t loaded = 0;
  std::vector<Capacity> per_link(t.link_count(), Capacity(0));
  for (const auto& [l, fi] : ref.link_usage(t)) {
    per_link[l] += flows[fi].demand;
    if (const auto& tw = t.link(l).twin) per_link[*tw] += flows[fi].demand;
  }
  for (const auto& u : per_link) {
    if (u > 0) {
      used += u;
      ++loaded;
    }
  }
  if (loaded == 0) return;
  const double mean = to_double(used) / static_cast<double>(loaded);
  const auto cap = static_cast<std::int64_t>(std::max(1.0, std::floor(mean / load)));
  for (LinkIndex l = 0; l < t.link_count(); ++l) t.set_capacity(l, Capacity(cap));
}

}  // namespace bench_detail

inline BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const Topology base = cfg.topology ? *cfg.topology : fat_tree(cfg.fat_tree_k, Capacity(1000000));
  BenchmarkReport report;
  report.flow_count = cfg.flow_count;
  report.runs = cfg.runs;
  report.profile = cfg.profile;
  report.topology = cfg.topology ? "file" : "fat_tree(" + std::to_string(cfg.fat_tree_k) + ")";
  for (int levels : cfg.levels) {
    std::vector<BenchCell> row;
    for (RoutingMode m : cfg.modes) row.push_back(BenchCell{m, levels});
    for (std::size_t run = 0; run < cfg.runs; ++run) {
      const std::uint64_t run_seed = split_seed(split_seed(cfg.seed, static_cast<std::uint64_t>(levels)), run);
      try {
        Topology t = assign_labels(base, levels, split_seed(run_seed, 0));
        auto flows = sample_flows(t, cfg.flow_count, split_seed(run_seed, 1), cfg.sampling);
        if (cfg.profile == CapacityProfile::Congested) bench_detail::congest(t, flows, cfg.congestion_load, cfg.gamma);
        for (auto& cell : row) {
          RoutingConfig rc;
          rc.mode = cell.mode;
          rc.gamma = cfg.gamma;
          const auto start = std::chrono::steady_clock::now();
          const auto outcome = route_all(t, flows, rc);
          cell.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          ++cell.runs;
          cell.flows += flows.size();
          for (const auto& f : outcome.flows) {
            if (f.rejection == RouteRejection::AccessDenied) continue;
            ++cell.admitted;
            if (!f.routed) {
              ++cell.rejected;
              continue;
            }
            ++cell.routed;
            cell.buckets[static_cast<std::size_t>(std::min(3, f.cost.max_severity()))] += 1;
          }
        }
      } catch (const std::exception& e) {
        report.failures.push_back({levels, run, e.what()});
      }
    }
    for (auto& c : row) report.cells.push_back(c);
  }
  return report;
}

/// JSON report. Wall-clock times are included only on request so that the
/// default output is byte-stable.
inline nlohmann::ordered_json report_to_json(const BenchmarkReport& r, bool with_times = false) {
  using detail::ojson;
  ojson doc;
  doc["topology"] = r.topology;
  doc["flow_count"] = r.flow_count;
  doc["runs"] = r.runs;
  doc["profile"] = std::string(to_string(r.profile));
  ojson cells = ojson::array();
  for (const auto& c : r.cells) {
    ojson j;
    j["mode"] = std::string(to_string(c.mode));
    j["levels"] = c.levels;
    j["runs"] = c.runs;
    j["flows"] = c.flows;
    j["admitted"] = c.admitted;
    j["routed"] = c.routed;
    j["rejected"] = c.rejected;
    j["buckets"] = c.buckets;
    ojson adm = ojson::array();
    ojson all = ojson::array();
    for (std::size_t d = 0; d < c.buckets.size(); ++d) {
      adm.push_back(c.fraction(c.buckets[d], true));
      all.push_back(c.fraction(c.buckets[d], false));
    }
    j["fraction_of_admitted"] = std::move(adm);
    j["fraction_of_all"] = std::move(all);
    j["rejected_fraction_of_admitted"] = c.fraction(c.rejected, true);
    if (with_times) j["seconds"] = c.seconds;
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  ojson fails = ojson::array();
  for (const auto& f : r.failures) fails.push_back({{"levels", f.levels}, {"run", f.run}, {"error", f.what}});
  doc["failures"] = std::move(fails);
  return doc;
}

inline std::string report_to_csv(const BenchmarkReport& r, bool with_times = false) {
  std::ostringstream os;
  os << "# topology=" << r.topology << " flows=" << r.flow_count << " runs=" << r.runs
     << " profile=" << to_string(r.profile) << "\n";
  os << "mode,levels,flows,admitted,routed,conflict_0,conflict_1,conflict_2,conflict_3,rejected";
  if (with_times) os << ",seconds";
  os << "\n";
  os.setf(std::ios::fixed);
  os.precision(4);
  for (const auto& c : r.cells) {
    os << to_string(c.mode) << "," << c.levels << "," << c.flows << "," << c.admitted << "," << c.routed;
    for (std::size_t d = 0; d < c.buckets.size(); ++d) os << "," << c.fraction(c.buckets[d]);
    os << "," << c.fraction(c.rejected);
    if (with_times) os << "," << c.seconds;
    os << "\n";
  }
  return os.str();
}

inline std::string report_to_text(const BenchmarkReport& r, bool with_times = false) {
  std::ostringstream os;
  os << r.topology << ", " << r.flow_count << " flows x " << r.runs << " runs, " << to_string(r.profile)
     << " capacity\n";
  os.setf(std::ios::fixed);
  os.precision(1);
  for (const auto& c : r.cells) {
    os << to_string(c.mode) << " " << c.levels << " levels:";
    os << " no conflict " << 100 * c.zero_conflict() << "%";
    for (std::size_t d = 1; d < c.buckets.size(); ++d) {
      if (static_cast<int>(d) < c.levels) os << ", " << d << " lev. diff. " << 100 * c.fraction(c.buckets[d]) << "%";
    }
    os << ", rejected " << 100 * c.fraction(c.rejected) << "%";
    if (with_times) os << ", " << c.seconds << " s";
    os << "\n";
  }
  for (const auto& f : r.failures) os << "failure (" << f.levels << " levels, run " << f.run << "): " << f.what << "\n";
  return os.str();
}

}  // namespace mlsroute
