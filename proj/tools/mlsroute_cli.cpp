// mlsroute: command-line front end.
//
// Exit status: 0 success, 1 usage error, 2 input or parse error,
// 3 only rejections (admission or routing) or an infeasible exact instance.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlsroute/mlsroute.hpp"

namespace {

using namespace mlsroute;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kRejected = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string gamma = "auto";
  std::string mode = "min-conflict";
  std::string out;
  std::string format = "json";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw InputError("cannot write '" + g.out + "'");
  out << text;
}

std::optional<int> gamma_of(const Globals& g) {
  if (g.gamma == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(g.gamma, &used);
    if (used == g.gamma.size() && v >= 2) return v;
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--gamma", "expected 'auto' or an integer >= 2");
}

RoutingMode mode_of(const Globals& g) {
  if (g.mode == "strict") return RoutingMode::StrictMaximize;
  return RoutingMode::MinimizeConflict;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

struct Inputs {
  std::string topo;
  std::string flows;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool need_flows = true) {
  cmd->add_option("--topo", in.topo, "Topology file (JSON)")->required();
  auto* f = cmd->add_option("--flows", in.flows, "Flow request file (JSON)");
  if (need_flows) f->required();
}

Topology load_topo(const Inputs& in) { return load_topology(read_file(in.topo)); }

int cmd_gen_topo(const Globals& g, int k, int levels, const std::string& capacity, const std::string& flows_out,
                 std::size_t flow_count) {
  Capacity cap;
  try {
    cap = parse_capacity(capacity);
  } catch (const CapacityParseError& e) {
    throw InputError(std::string("--capacity: ") + e.what());
  }
  Topology t = fat_tree(k, cap);
  if (levels > 0) t = assign_labels(std::move(t), levels, split_seed(g.seed, 0));
  emit(g, save_topology(t));
  if (!flows_out.empty()) {
    const auto flows = sample_flows(t, flow_count, split_seed(g.seed, 1));
    std::ofstream out(flows_out, std::ios::binary);
    if (!out) throw InputError("cannot write '" + flows_out + "'");
    out << save_flows(flows);
  }
  return kOk;
}

int cmd_admit(const Globals& g, const Inputs& in) {
  const Topology t = load_topo(in);
  const auto flows = load_flows(read_file(in.flows), t.universe());
  const auto r = admissible_flows(flows, t);
  if (g.format == "csv") {
    emit(g, admission_to_csv(flows, r));
  } else if (g.format == "text") {
    std::string text = std::to_string(r.admitted.size()) + " admitted, " + std::to_string(r.rejected.size()) +
                       " rejected\n";
    for (const auto& [f, reason] : r.rejected) text += f.id + ": " + std::string(to_string(reason)) + "\n";
    emit(g, text);
  } else {
    emit(g, dump(admission_to_json(flows, r)));
  }
  return !flows.empty() && r.admitted.empty() ? kRejected : kOk;
}

int cmd_route(const Globals& g, const Inputs& in, bool shuffle) {
  const Topology t = load_topo(in);
  const auto flows = load_flows(read_file(in.flows), t.universe());
  RoutingConfig cfg;
  cfg.gamma = gamma_of(g);
  cfg.mode = mode_of(g);
  cfg.seed = g.seed;
  cfg.order = shuffle ? FlowOrder::SeededShuffle : FlowOrder::InputOrder;
  const auto r = route_all(t, flows, cfg);
  if (g.format == "csv") {
    emit(g, outcome_to_csv(t, r));
  } else if (g.format == "text") {
    emit(g, outcome_to_text(t, r));
  } else {
    emit(g, dump(outcome_to_json(t, r)));
  }
  return !flows.empty() && r.routed_count() == 0 ? kRejected : kOk;
}

int cmd_exact(const Globals& g, const Inputs& in, const std::string& problem) {
  const Topology t = load_topo(in);
  auto flows = load_flows(read_file(in.flows), t.universe());
  ExactSolution s;
  if (problem == "max-flows") {
    s = exact_max_flows(t, flows);
  } else {
    flows = admissible_flows(flows, t).admitted;
    const int gamma = gamma_of(g).value_or(default_gamma(t));
    try {
      s = exact_min_conflict(t, flows, gamma);
    } catch (const InfeasibleInstance& e) {
      std::cerr << "mlsroute: " << e.what() << "\n";
      return kRejected;
    }
  }
  if (g.format == "csv") {
    emit(g, solution_to_csv(t, s));
  } else {
    emit(g, dump(solution_to_json(t, s, problem)));
  }
  return problem == "max-flows" && !flows.empty() && s.objective == 0 ? kRejected : kOk;
}

int cmd_emit_rules(const Globals& g, const Inputs& in, const std::string& outcome_file, bool drops) {
  const Topology t = load_topo(in);
  const auto flows = load_flows(read_file(in.flows), t.universe());
  const auto outcome = outcome_from_json(detail::parse_document(read_file(outcome_file)), t);
  std::vector<FlowRule> rules;
  for (const auto& o : outcome.flows) {
    if (!o.routed) continue;
    const auto it = std::find_if(flows.begin(), flows.end(), [&](const auto& f) { return f.id == o.flow_id; });
    if (it == flows.end()) throw InputError("outcome names unknown flow '" + o.flow_id + "'");
    for (auto& r : rules_for_path(o.path, *it, t)) rules.push_back(std::move(r));
    if (drops) {
      for (auto& r : drop_rules_for_path(o.path, *it, t)) rules.push_back(std::move(r));
    }
  }
  emit(g, serialize_rules(rules));
  return rules.empty() ? kRejected : kOk;
}

struct BenchArgs {
  int k = 8;
  std::string topo;
  std::vector<int> levels{2, 3, 4};
  std::size_t flows = 200;
  std::size_t runs = 30;
  std::string profile = "ample";
  double load = 1.5;
  bool timing = false;
};

int cmd_bench(const Globals& g, const BenchArgs& a) {
  BenchmarkConfig cfg;
  cfg.fat_tree_k = a.k;
  if (!a.topo.empty()) cfg.topology = load_topology(read_file(a.topo));
  cfg.levels = a.levels;
  cfg.seed = g.seed;
  cfg.flow_count = a.flows;
  cfg.runs = a.runs;
  cfg.profile = a.profile == "congested" ? CapacityProfile::Congested : CapacityProfile::Ample;
  cfg.congestion_load = a.load;
  cfg.gamma = gamma_of(g);
  const auto r = run_benchmark(cfg);
  if (g.format == "csv") {
    emit(g, report_to_csv(r, a.timing));
  } else if (g.format == "text") {
    emit(g, report_to_text(r, a.timing));
  } else {
    emit(g, dump(report_to_json(r, a.timing)));
  }
  return kOk;
}

int cmd_export_lp(const Globals& g, const Inputs& in, const std::string& problem) {
  const Topology t = load_topo(in);
  auto flows = load_flows(read_file(in.flows), t.universe());
  if (problem == "max-flows") {
    emit(g, export_max_flow_lp(t, flows));
  } else {
    flows = admissible_flows(flows, t).admitted;
    emit(g, export_min_conflict_lp(t, flows, gamma_of(g).value_or(default_gamma(t))));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel-security-aware flow routing"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--gamma", g.gamma, "Conflict weight base: 'auto' (diameter + 1) or an integer >= 2");
  app.add_option("--mode", g.mode, "Routing mode")->check(CLI::IsMember({"strict", "min-conflict"}));
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));

  int k = 0;
  int levels = 0;
  std::string capacity = "1000";
  std::string flows_out;
  std::size_t flow_count = 20;
  auto* gen = app.add_subcommand("gen-topo", "Generate a fat-tree topology");
  gen->add_option("--fat-tree", k, "Fat-tree arity k (even, >= 2)")->required();
  gen->add_option("--levels", levels, "Assign random labels over this many levels");
  gen->add_option("--capacity", capacity, "Capacity of every link");
  gen->add_option("--flows-out", flows_out, "Also sample admissible flows into this file");
  gen->add_option("--flow-count", flow_count, "Number of sampled flows");

  Inputs in;
  auto* admit = app.add_subcommand("admit", "Access control over a flow file");
  add_inputs(admit, in);

  bool shuffle = false;
  auto* route = app.add_subcommand("route", "Route flows one at a time");
  add_inputs(route, in);
  route->add_flag("--shuffle", shuffle, "Process flows in a seeded random order");

  std::string problem = "min-conflict";
  auto* exact = app.add_subcommand("exact", "Solve a small instance exactly");
  add_inputs(exact, in);
  exact->add_option("--problem", problem)->check(CLI::IsMember({"max-flows", "min-conflict"}));

  std::string outcome_file;
  bool drops = false;
  auto* rules = app.add_subcommand("emit-rules", "Flow rules for a routing outcome");
  add_inputs(rules, in);
  rules->add_option("--outcome", outcome_file, "Outcome file written by 'route'")->required();
  rules->add_flag("--drops", drops, "Also emit drop rules for uncovered categories");

  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "Run the labeling and routing benchmark");
  bench->add_option("--fat-tree", b.k, "Fat-tree arity k");
  bench->add_option("--topo", b.topo, "Topology file instead of a fat tree");
  bench->add_option("--levels", b.levels, "Level counts to evaluate")->delimiter(',');
  bench->add_option("--flow-count", b.flows, "Flows per run");
  bench->add_option("--runs", b.runs, "Repetitions per level count");
  bench->add_option("--profile", b.profile)->check(CLI::IsMember({"ample", "congested"}));
  bench->add_option("--load", b.load, "Target mean link load factor for the congested profile");
  bench->add_flag("--timing", b.timing, "Include wall-clock times (output is then not byte-stable)");

  auto* lp = app.add_subcommand("export-lp", "Write the integer program in LP format");
  add_inputs(lp, in);
  lp->add_option("--problem", problem)->check(CLI::IsMember({"max-flows", "min-conflict"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen_topo(g, k, levels, capacity, flows_out, flow_count);
    if (*admit) return cmd_admit(g, in);
    if (*route) return cmd_route(g, in, shuffle);
    if (*exact) return cmd_exact(g, in, problem);
    if (*rules) return cmd_emit_rules(g, in, outcome_file, drops);
    if (*bench) return cmd_bench(g, b);
    if (*lp) return cmd_export_lp(g, in, problem);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "mlsroute: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "mlsroute: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}
