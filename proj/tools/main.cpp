// wtsk: rate regions, scalar capacities, formula comparisons, and coding
// simulations for finite-alphabet wiretap channels with channel state.
//
// Exit codes (stable contract): 0 success, 1 I/O, 2 validation/usage,
// 3 infeasible config, 4 guard exceeded.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wtsk/bounds.hpp"
#include "wtsk/channel.hpp"
#include "wtsk/errors.hpp"
#include "wtsk/info.hpp"
#include "wtsk/region.hpp"
#include "wtsk/sim.hpp"

using nlohmann::json;
using namespace wtsk;

namespace {

constexpr const char* tool_version = "wtsk 1.0.0";

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Shortest exact decimal form; CSV artifacts must be byte-reproducible.
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Provenance {
  std::string invocation;
  std::uint64_t seed = 0;
  std::string hash;  // fnv1a of the invocation string
};

Provenance make_provenance(const std::string& invocation, std::uint64_t seed) {
  return {invocation, seed, hex64(fnv1a64(invocation))};
}

std::string csv_header(const Provenance& p) {
  std::string s;
  s += std::string("# ") + tool_version + "\n";
  s += "# invocation: " + p.invocation + "\n";
  s += "# seed: " + std::to_string(p.seed) + "\n";
  s += "# config_hash: " + p.hash + "\n";
  return s;
}

json provenance_json(const Provenance& p) {
  return json{{"tool", tool_version},
              {"invocation", p.invocation},
              {"seed", p.seed},
              {"config_hash", p.hash}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out.good()) throw io_error("write failed: " + path);
}

std::string with_suffix(const std::string& path, const std::string& tag,
                        const std::string& new_ext = "") {
  auto pos = path.rfind('.');
  std::string stem = pos == std::string::npos ? path : path.substr(0, pos);
  std::string ext = new_ext.empty()
                        ? (pos == std::string::npos ? "" : path.substr(pos))
                        : new_ext;
  return stem + tag + ext;
}

json tensor_to_json(const Tensor& t) {
  // nested arrays, trailing axis innermost
  std::size_t flat = 0;
  std::function<json(int)> rec = [&](int axis) -> json {
    json arr = json::array();
    if (axis == t.rank() - 1) {
      for (int i = 0; i < t.dim(axis); ++i) arr.push_back(t[flat++]);
    } else {
      for (int i = 0; i < t.dim(axis); ++i) arr.push_back(rec(axis + 1));
    }
    return arr;
  };
  if (t.rank() == 0) return json::array();
  return rec(0);
}

json design_json(const WiretapChannel& ch, const Design& d) {
  json out;
  out["bound"] = to_string(d.bound);
  if (is_input_only(d.bound)) {
    out["kind"] = "state_input";
    out["p_sx"] = tensor_to_json(design_to_psx(ch, d));
  } else {
    out["kind"] = "aux";
    out["aux"] = json::parse(aux_to_json(design_to_aux(ch, d)));
  }
  return out;
}

struct SearchFlags {
  int grid = 4, restarts = 24, refine = 40, directions = 33, threads = 1;
  int max_u = 0, max_v = 0;
  std::uint64_t seed = 1;
  bool hull = false, stoch = false;
};

void add_search_flags(CLI::App* cmd, SearchFlags& f, bool with_hull) {
  cmd->add_option("--grid", f.grid, "simplex grid resolution (weights are multiples of 1/grid)")
      ->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--restarts", f.restarts, "random restart count")->check(CLI::NonNegativeNumber);
  cmd->add_option("--refine", f.refine, "refinement pass budget")->check(CLI::NonNegativeNumber);
  cmd->add_option("--directions", f.directions, "scalarization directions over [0,90] degrees")
      ->check(CLI::Range(1, 1 << 20));
  cmd->add_option("--max-u", f.max_u, "aux |U| cap (0 = catalog default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-v", f.max_v, "aux |V| cap (0 = catalog default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "search seed");
  cmd->add_option("--threads", f.threads, "worker threads (results identical for any count)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--stochastic-selectors", f.stoch, "also search stochastic selector rows");
  if (with_hull) cmd->add_flag("--hull", f.hull, "also emit the concave time-sharing envelope");
}

SearchConfig to_config(const SearchFlags& f) {
  SearchConfig cfg;
  cfg.grid_resolution = f.grid;
  cfg.random_restarts = f.restarts;
  cfg.refine_iterations = f.refine;
  cfg.directions = f.directions;
  cfg.threads = f.threads;
  cfg.max_u = f.max_u;
  cfg.max_v = f.max_v;
  cfg.seed = f.seed;
  cfg.hull = f.hull;
  cfg.stochastic_selectors = f.stoch;
  return cfg;
}

// channel arguments accept either a JSON file path or a builtin example
// name (fig5, fig6, fig7, fig7:<flip>)
WiretapChannel load_channel_arg(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe.good()) return load_channel(arg);
  if (arg.rfind("fig", 0) == 0) return builtin_example(arg);
  throw io_error("cannot open " + arg);
}

void warn_if_not_degraded(const WiretapChannel& ch, BoundId b) {
  if (b != BoundId::D_Region_T4 && b != BoundId::E_Outer_T5) return;
  Degradedness d = check_degraded(ch);
  if (d != Degradedness::Degraded)
    std::cerr << "warning: " << to_string(b)
              << " characterizes a capacity only for degraded channels; this channel is "
              << to_string(d) << "\n";
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) throw validation_error(std::string(what) + ": empty entry in list");
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw validation_error(std::string(what) + ": not a number: " + part);
    }
    if (used != part.size())
      throw validation_error(std::string(what) + ": trailing junk in: " + part);
    out.push_back(v);
  }
  if (out.empty()) throw validation_error(std::string(what) + ": empty list");
  return out;
}

// ---------------------------------------------------------------- validate

int run_validate(const std::string& path) {
  json diag;
  try {
    WiretapChannel ch = load_channel_arg(path);
    ch.validate();
    diag["status"] = "ok";
    diag["alphabets"] = {{"S", ch.ns}, {"X", ch.nx}, {"Y", ch.ny}, {"Z", ch.nz}};
    diag["degradedness"] = to_string(check_degraded(ch));
    std::cout << diag.dump(1) << "\n";
    return 0;
  } catch (const io_error& e) {
    diag["status"] = "io_error";
    diag["detail"] = e.what();
    std::cout << diag.dump(1) << "\n";
    return 1;
  } catch (const validation_error& e) {
    diag["status"] = "invalid";
    diag["detail"] = e.what();
    std::cout << diag.dump(1) << "\n";
    return 2;
  }
}

// ------------------------------------------------------------------ region

std::string frontier_csv(const Provenance& prov, const RegionFrontier& f) {
  std::string csv = csv_header(prov);
  csv += "R_M,R_K,provenance_id\n";
  for (const auto& v : f.vertices) {
    int pid = v.poly >= 0 ? f.polys[static_cast<std::size_t>(v.poly)].design_ref : -1;
    csv += fmt17(v.rm) + "," + fmt17(v.rk) + "," + std::to_string(pid) + "\n";
  }
  return csv;
}

int run_region(const Provenance& prov, const std::string& channel_path,
               const std::string& bound_name, const SearchFlags& flags,
               const std::string& out_path) {
  WiretapChannel ch = load_channel_arg(channel_path);
  ch.validate();
  BoundId bound = bound_id_from_string(bound_name);
  warn_if_not_degraded(ch, bound);

  RegionResult res = optimize_region(ch, bound, to_config(flags));

  write_file(out_path, frontier_csv(prov, res.frontier));
  std::string wrote = out_path;

  std::string designs_path = with_suffix(out_path, "", ".designs.json");
  json designs = json::object();
  for (std::size_t i = 0; i < res.designs.size(); ++i)
    designs[std::to_string(i)] = design_json(ch, res.designs[i]);
  json artifact = provenance_json(prov);
  artifact["bound"] = to_string(bound);
  artifact["used_u"] = res.used_u;
  artifact["used_v"] = res.used_v;
  artifact["evaluations"] = res.evaluations;
  artifact["designs"] = designs;
  write_file(designs_path, artifact.dump(1) + "\n");
  wrote += ", " + designs_path;

  if (flags.hull && res.hulled) {
    std::string hull_path = with_suffix(out_path, "_hull");
    write_file(hull_path, frontier_csv(prov, *res.hulled));
    wrote += ", " + hull_path;
  }

  std::printf("bound: %s\n", to_string(bound).c_str());
  std::printf("endpoints: SM=%s SK=%s\n", fmt17(res.frontier.sm_endpoint()).c_str(),
              fmt17(res.frontier.sk_endpoint()).c_str());
  std::printf("vertices: %zu\n", res.frontier.vertices.size());
  std::printf("aux sizes used: U=%d V=%d\n", res.used_u, res.used_v);
  std::printf("evaluations: %ld\n", res.evaluations);
  std::printf("wrote: %s\n", wrote.c_str());
  return 0;
}

// ---------------------------------------------------------------- capacity

int run_capacity(const Provenance& prov, const std::string& channel_path,
                 const std::string& bound_name, const std::string& objective_name,
                 const SearchFlags& flags, const std::string& out_path) {
  WiretapChannel ch = load_channel_arg(channel_path);
  ch.validate();
  BoundId bound = bound_id_from_string(bound_name);
  warn_if_not_degraded(ch, bound);

  ScalarObjective obj;
  if (objective_name == "sm")
    obj = ScalarObjective::SM;
  else if (objective_name == "sk")
    obj = ScalarObjective::SK;
  else if (objective_name == "sk-signed")
    obj = ScalarObjective::SKSigned;
  else if (objective_name == "gp")
    obj = ScalarObjective::GP;
  else
    throw validation_error("unknown objective: " + objective_name +
                           " (valid: sm, sk, sk-signed, gp)");

  ScalarResult res = optimize_scalar(ch, bound, obj, to_config(flags));

  json artifact = provenance_json(prov);
  artifact["bound"] = to_string(bound);
  artifact["objective"] = objective_name;
  artifact["value"] = res.value;
  artifact["feasible"] = res.feasible;
  artifact["evaluations"] = res.evaluations;
  if (res.feasible) artifact["design"] = design_json(ch, res.design);
  write_file(out_path, artifact.dump(1) + "\n");

  std::printf("bound: %s\n", to_string(bound).c_str());
  std::printf("objective: %s\n", objective_name.c_str());
  std::printf("value: %s\n", fmt17(res.value).c_str());
  std::printf("feasible: %s\n", res.feasible ? "yes" : "no");
  std::printf("wrote: %s\n", out_path.c_str());
  if (!res.feasible) {
    std::cerr << "infeasible: no design passed the key feasibility gate\n";
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- compare

int run_compare(const Provenance& prov, const std::string& channel_path,
                const std::vector<std::string>& bound_names, const SearchFlags& flags,
                const std::string& out_path) {
  constexpr double tol = 1e-6;
  WiretapChannel ch = load_channel_arg(channel_path);
  ch.validate();
  if (bound_names.empty()) throw validation_error("--bounds needs at least one BoundId");

  std::vector<BoundId> bounds;
  for (const auto& name : bound_names) bounds.push_back(bound_id_from_string(name));
  for (BoundId b : bounds) warn_if_not_degraded(ch, b);

  struct Entry {
    BoundId bound;
    RegionFrontier frontier;
    double sm = 0, sk = 0;
    double sk_signed = 0;
    bool sk_feasible = false;
  };
  std::vector<Entry> entries;
  SearchConfig cfg = to_config(flags);
  for (BoundId b : bounds) {
    Entry e;
    e.bound = b;
    e.frontier = optimize_region(ch, b, cfg).frontier;
    e.sm = e.frontier.sm_endpoint();
    e.sk = e.frontier.sk_endpoint();
    ScalarResult signed_sk = optimize_scalar(ch, b, ScalarObjective::SKSigned, cfg);
    e.sk_signed = signed_sk.value;
    e.sk_feasible = signed_sk.feasible;
    entries.push_back(std::move(e));
  }

  std::size_t nb = entries.size();
  std::vector<std::vector<bool>> dom(nb, std::vector<bool>(nb, false));
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      dom[i][j] = frontier_dominates(entries[i].frontier, entries[j].frontier, tol);

  std::printf("%-18s %12s %12s %12s %9s\n", "bound", "SM", "SK", "SK_signed", "gate");
  for (const auto& e : entries)
    std::printf("%-18s %12.6f %12.6f %12s %9s\n", to_string(e.bound).c_str(), e.sm, e.sk,
                e.sk_feasible ? fmt17(e.sk_signed).c_str() : "-",
                e.sk_feasible ? "pass" : "fail");
  std::printf("\ndominance (row covers column, tol %g):\n", tol);
  std::printf("%-18s", "");
  for (const auto& e : entries) std::printf(" %-18s", to_string(e.bound).c_str());
  std::printf("\n");
  for (std::size_t i = 0; i < nb; ++i) {
    std::printf("%-18s", to_string(entries[i].bound).c_str());
    for (std::size_t j = 0; j < nb; ++j) std::printf(" %-18s", dom[i][j] ? "yes" : "no");
    std::printf("\n");
  }

  json directions = json::array();
  auto relation = [&](double a, double b) -> std::string {
    if (a < b - tol) return "<";
    if (a > b + tol) return ">";
    return "~";
  };
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i + 1; j < nb; ++j) {
      const Entry &a = entries[i], &b = entries[j];
      std::string sm_rel = relation(a.sm, b.sm);
      std::printf("SM direction: %s (%s) %s %s (%s)\n", to_string(a.bound).c_str(),
                  fmt17(a.sm).c_str(), sm_rel.c_str(), to_string(b.bound).c_str(),
                  fmt17(b.sm).c_str());
      directions.push_back(json{{"axis", "SM"},
                                {"a", to_string(a.bound)},
                                {"b", to_string(b.bound)},
                                {"a_value", a.sm},
                                {"b_value", b.sm},
                                {"relation", sm_rel}});
      // key direction uses the signed projection: a clamped 0-vs-0 tie would
      // hide which gate-passing design family actually has the larger cap
      std::string sk_rel;
      if (a.sk_feasible && b.sk_feasible) {
        sk_rel = relation(a.sk_signed, b.sk_signed);
        std::printf("SK direction: %s (%s) %s %s (%s)\n", to_string(a.bound).c_str(),
                    fmt17(a.sk_signed).c_str(), sk_rel.c_str(), to_string(b.bound).c_str(),
                    fmt17(b.sk_signed).c_str());
      } else {
        sk_rel = "gate-infeasible";
        std::printf("SK direction: %s vs %s: %s\n", to_string(a.bound).c_str(),
                    to_string(b.bound).c_str(),
                    a.sk_feasible ? "second gate infeasible" : "first gate infeasible");
      }
      directions.push_back(json{{"axis", "SK_signed"},
                                {"a", to_string(a.bound)},
                                {"b", to_string(b.bound)},
                                {"a_value", a.sk_feasible ? json(a.sk_signed) : json()},
                                {"b_value", b.sk_feasible ? json(b.sk_signed) : json()},
                                {"relation", sk_rel}});
    }

  json artifact = provenance_json(prov);
  artifact["tol"] = tol;
  json jbounds = json::array();
  for (const auto& e : entries) {
    json vertices = json::array();
    for (const auto& v : e.frontier.vertices) vertices.push_back(json::array({v.rm, v.rk}));
    jbounds.push_back(json{{"bound", to_string(e.bound)},
                           {"sm", e.sm},
                           {"sk", e.sk},
                           {"sk_signed", e.sk_feasible ? json(e.sk_signed) : json()},
                           {"sk_gate_feasible", e.sk_feasible},
                           {"vertices", vertices}});
  }
  artifact["bounds"] = jbounds;
  json jdom = json::array();
  for (std::size_t i = 0; i < nb; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < nb; ++j) row.push_back(dom[i][j]);
    jdom.push_back(row);
  }
  artifact["dominates"] = jdom;
  artifact["directions"] = directions;
  write_file(out_path, artifact.dump(1) + "\n");
  std::printf("wrote: %s\n", out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------- simulate

json report_json(const SimReport& r) {
  json j;
  j["mode"] = r.mode;
  j["n"] = r.n;
  j["rates"] = {{"R1", r.rates.R1}, {"R2", r.rates.R2}, {"RK", r.rates.RK}, {"RM", r.rates.RM}};
  j["error_prob"] = r.error_prob;
  j["key_tv"] = r.key_tv;
  j["leakage_bits"] = r.leakage_bits;
  j["covering_div_bits"] = r.covering_div_bits;
  j["halfwidths"] = {{"error", r.hw_error},
                     {"key_tv", r.hw_key_tv},
                     {"leakage", r.hw_leakage},
                     {"covering", r.hw_covering}};
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["atypical_state_prob"] = r.atypical_state_prob;
  j["failure_none"] = r.failure_none;
  j["failure_multiple"] = r.failure_multiple;
  return j;
}

int run_simulate(const Provenance& prov, const std::string& channel_path,
                 const std::string& aux_path, int n, const std::string& rates_text,
                 long trials, std::uint64_t seed, double eps, const std::string& out_path) {
  WiretapChannel ch = load_channel_arg(channel_path);
  ch.validate();
  AuxiliaryScheme aux = load_aux(aux_path);
  aux.validate(ch);
  // causal schemes run through the equivalent enlarged-alphabet code
  if (aux.mode != AuxMode::NonCausal) aux = expand_to_noncausal(ch, aux);
  JointSystem j = build_joint(ch, aux);

  std::vector<double> rv = parse_double_list(rates_text, "--rates");
  if (rv.size() != 4) throw validation_error("--rates needs R1,R2,RK,RM (4 values)");
  for (double r : rv)
    if (r < 0) throw validation_error("--rates entries must be nonnegative");
  SimRates rates{rv[0], rv[1], rv[2], rv[3]};
  if (n < 1) throw validation_error("--n must be >= 1");
  if (trials < 0) throw validation_error("--trials must be >= 0");
  if (!(eps > 0)) throw validation_error("--eps must be > 0");

  SimReport rep = run_trials(ch, j, n, rates, trials, seed, eps);

  json artifact = provenance_json(prov);
  json jr = report_json(rep);
  for (auto it = jr.begin(); it != jr.end(); ++it) artifact[it.key()] = it.value();
  std::string text = artifact.dump(1) + "\n";
  write_file(out_path, text);
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------- softcover

int run_softcover(const Provenance& prov, const std::string& input_path,
                  const std::string& aux_path, int n, double R1, double R2,
                  const std::string& mode_name, long samples, std::uint64_t seed,
                  const std::string& sweep_var, const std::string& sweep_values_text,
                  const std::string& out_path) {
  // the positional file is either a channel (then --aux-file supplies the
  // scheme) or a self-contained noncausal scheme whose (S,U,V) mass function
  // is all the soft-covering computation needs
  json head;
  std::ifstream in(input_path);
  if (!in) {
    if (input_path.rfind("fig", 0) != 0) throw io_error("cannot open " + input_path);
    head["kernel"] = nullptr;  // builtin channel name
  } else {
    try {
      head = json::parse(in);
    } catch (const json::exception& e) {
      throw io_error("cannot parse " + input_path + ": " + e.what());
    }
  }

  JointSystem j;
  if (head.contains("kernel") || head.contains("alphabets")) {
    if (aux_path.empty())
      throw validation_error("channel input needs --aux-file with the scheme to cover with");
    WiretapChannel ch = load_channel_arg(input_path);
    ch.validate();
    AuxiliaryScheme aux = load_aux(aux_path);
    aux.validate(ch);
    if (aux.mode != AuxMode::NonCausal) aux = expand_to_noncausal(ch, aux);
    j = build_joint(ch, aux);
  } else if (head.contains("mode")) {
    AuxiliaryScheme aux = aux_from_json(head.dump());
    if (aux.mode != AuxMode::NonCausal)
      throw validation_error(
          "a causal scheme file has no state distribution; pass the channel file and --aux-file");
    const Tensor& p_suv = aux.input;
    if (p_suv.rank() != 3) throw validation_error("scheme input_dist must have shape (S,U,V)");
    p_suv.validate_distribution();
    j.ns = p_suv.dim(0);
    j.nu = p_suv.dim(1);
    j.nv = p_suv.dim(2);
    j.nx = j.ny = j.nz = 1;
    j.mode = AuxMode::NonCausal;
    j.p = Tensor({j.ns, j.nu, j.nv, 1, 1, 1}, p_suv.data());
  } else {
    throw validation_error(input_path + " is neither a channel nor a scheme file");
  }

  SoftCoverMode mode;
  if (mode_name == "exact")
    mode = SoftCoverMode::exact;
  else if (mode_name == "mc")
    mode = SoftCoverMode::mc;
  else
    throw validation_error("unknown mode: " + mode_name + " (valid: exact, mc)");

  if (!sweep_var.empty() && sweep_var != "n" && sweep_var != "R1" && sweep_var != "R2")
    throw validation_error("--sweep must be one of: n, R1, R2");
  if (!sweep_var.empty() && sweep_values_text.empty())
    throw validation_error("--sweep needs --sweep-values");
  if (n < 1) throw validation_error("--n must be >= 1");
  if (R1 < 0 || R2 < 0) throw validation_error("rates must be nonnegative");
  if (samples < 1) throw validation_error("--samples must be >= 1");

  Tensor p_suv = j.p.marginal({0, 1, 2});
  double i_us = mutual_information(p_suv, {1}, {0});
  double i_uvs = mutual_information(p_suv, {1, 2}, {0});

  struct Row {
    int n;
    double R1, R2;
  };
  std::vector<Row> rows;
  if (sweep_var.empty()) {
    rows.push_back({n, R1, R2});
  } else {
    for (double v : parse_double_list(sweep_values_text, "--sweep-values")) {
      Row r{n, R1, R2};
      if (sweep_var == "n") {
        if (v < 1 || v != static_cast<double>(static_cast<int>(v)))
          throw validation_error("--sweep-values for n must be positive integers");
        r.n = static_cast<int>(v);
      } else if (sweep_var == "R1") {
        if (v < 0) throw validation_error("rates must be nonnegative");
        r.R1 = v;
      } else {
        if (v < 0) throw validation_error("rates must be nonnegative");
        r.R2 = v;
      }
      rows.push_back(r);
    }
  }

  std::string csv = csv_header(prov);
  csv += "# I_US: " + fmt17(i_us) + "\n";
  csv += "# I_UVS: " + fmt17(i_uvs) + "\n";
  csv += "n,R1,R2,divergence_bits,std_error,codebooks\n";
  for (const Row& r : rows) {
    SoftCoverResult res = soft_cover_divergence(j, r.n, r.R1, r.R2, mode, seed, samples);
    csv += std::to_string(r.n) + "," + fmt17(r.R1) + "," + fmt17(r.R2) + "," + fmt17(res.bits) +
           "," + fmt17(res.std_error) + "," + std::to_string(res.codebooks) + "\n";
  }
  write_file(out_path, csv);
  std::cout << csv;
  return 0;
}

// --------------------------------------------------------------- transform

int run_transform(const Provenance& prov, const std::string& channel_path,
                  const std::string& side_info_path, const std::string& out_path) {
  WiretapChannel ch = load_channel_arg(channel_path);
  ch.validate();
  Tensor side = load_side_info(side_info_path, ch.ns);
  WiretapChannel reduced = transform_general_csi(ch, side);
  reduced.validate();

  save_channel(reduced, out_path);
  // re-open to splice the provenance block into the artifact
  std::ifstream in(out_path);
  if (!in) throw io_error("cannot reopen " + out_path);
  json body = json::parse(in);
  in.close();
  body["provenance"] = provenance_json(prov);
  write_file(out_path, body.dump(1) + "\n");

  std::printf("reduced alphabets: S=%d X=%d Y=%d Z=%d\n", reduced.ns, reduced.nx, reduced.ny,
              reduced.nz);
  std::printf("degradedness: %s\n", to_string(check_degraded(reduced)).c_str());
  std::printf("wrote: %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (!args.empty()) args[0] = "wtsk";  // artifact invocations are path-independent
  std::string invocation;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) invocation += " ";
    invocation += args[i];
  }

  CLI::App app{"wiretap-channel rate regions, bounds, and coding simulations"};
  app.require_subcommand(1);

  // validate
  std::string v_channel;
  auto* cmd_validate = app.add_subcommand("validate", "check a channel file, report diagnostics");
  cmd_validate->add_option("channel", v_channel, "channel JSON file")->required();

  // region
  std::string r_channel, r_bound, r_out = "region.csv";
  SearchFlags r_flags;
  auto* cmd_region = app.add_subcommand("region", "optimize an achievable region frontier");
  cmd_region->add_option("channel", r_channel, "channel JSON file")->required();
  cmd_region->add_option("--bound", r_bound, "BoundId to optimize")->required();
  cmd_region->add_option("--out", r_out, "frontier CSV path");
  add_search_flags(cmd_region, r_flags, true);

  // capacity
  std::string c_channel, c_bound, c_objective = "sm", c_out = "capacity.json";
  SearchFlags c_flags;
  auto* cmd_capacity = app.add_subcommand("capacity", "optimize a scalar endpoint");
  cmd_capacity->add_option("channel", c_channel, "channel JSON file")->required();
  cmd_capacity->add_option("--bound", c_bound, "BoundId to optimize")->required();
  cmd_capacity->add_option("--objective", c_objective, "sm | sk | sk-signed | gp");
  cmd_capacity->add_option("--out", c_out, "result JSON path");
  add_search_flags(cmd_capacity, c_flags, false);

  // compare
  std::string p_channel, p_out = "compare.json";
  std::vector<std::string> p_bounds;
  SearchFlags p_flags;
  auto* cmd_compare = app.add_subcommand("compare", "endpoints and dominance across bounds");
  cmd_compare->add_option("channel", p_channel, "channel JSON file")->required();
  cmd_compare->add_option("--bounds", p_bounds, "comma-separated BoundIds")
      ->required()
      ->delimiter(',');
  cmd_compare->add_option("--out", p_out, "comparison JSON path");
  add_search_flags(cmd_compare, p_flags, false);

  // simulate
  std::string s_channel, s_aux, s_rates, s_out = "simreport.json";
  int s_n = 1;
  long s_trials = 0;
  std::uint64_t s_seed = 1;
  double s_eps = 0.1;
  auto* cmd_simulate = app.add_subcommand("simulate", "run the coding scheme, report metrics");
  cmd_simulate->add_option("channel", s_channel, "channel JSON file")->required();
  cmd_simulate->add_option("--aux-file", s_aux, "scheme JSON file")->required();
  cmd_simulate->add_option("--n", s_n, "blocklength")->required();
  cmd_simulate->add_option("--rates", s_rates, "R1,R2,RK,RM")->required();
  cmd_simulate->add_option("--trials", s_trials,
                           "Monte-Carlo trials (0 = exact enumeration when it fits the guard)");
  cmd_simulate->add_option("--seed", s_seed, "simulation seed");
  cmd_simulate->add_option("--eps", s_eps, "decoder typicality tolerance");
  cmd_simulate->add_option("--out", s_out, "report JSON path");

  // softcover
  std::string f_input, f_aux, f_mode = "exact", f_sweep, f_sweep_values, f_out = "softcover.csv";
  int f_n = 1;
  double f_r1 = 0, f_r2 = 0;
  long f_samples = 64;
  std::uint64_t f_seed = 1;
  auto* cmd_softcover =
      app.add_subcommand("softcover", "state-distribution covering divergence of the code ensemble");
  cmd_softcover->add_option("input", f_input, "channel JSON file, or a noncausal scheme file")
      ->required();
  cmd_softcover->add_option("--aux-file", f_aux, "scheme JSON file (when input is a channel)");
  cmd_softcover->add_option("--n", f_n, "blocklength");
  cmd_softcover->add_option("--R1", f_r1, "first-layer rate")->required();
  cmd_softcover->add_option("--R2", f_r2, "second-layer rate")->required();
  cmd_softcover->add_option("--mode", f_mode, "exact | mc");
  cmd_softcover->add_option("--samples", f_samples, "codebook samples in mc mode");
  cmd_softcover->add_option("--seed", f_seed, "codebook seed");
  cmd_softcover->add_option("--sweep", f_sweep, "sweep variable: n | R1 | R2");
  cmd_softcover->add_option("--sweep-values", f_sweep_values, "comma-separated sweep values");
  cmd_softcover->add_option("--out", f_out, "CSV path");

  // transform
  std::string t_channel, t_side, t_out;
  auto* cmd_transform =
      app.add_subcommand("transform", "reduce imperfect/partial state information to perfect CSI");
  cmd_transform->add_option("channel", t_channel, "channel JSON file")->required();
  cmd_transform->add_option("--side-info", t_side, "side-information kernel JSON file")->required();
  cmd_transform->add_option("--out", t_out, "reduced channel JSON path")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    if (cmd_validate->parsed()) return run_validate(v_channel);
    if (cmd_region->parsed())
      return run_region(make_provenance(invocation, r_flags.seed), r_channel, r_bound, r_flags,
                        r_out);
    if (cmd_capacity->parsed())
      return run_capacity(make_provenance(invocation, c_flags.seed), c_channel, c_bound,
                          c_objective, c_flags, c_out);
    if (cmd_compare->parsed())
      return run_compare(make_provenance(invocation, p_flags.seed), p_channel, p_bounds, p_flags,
                         p_out);
    if (cmd_simulate->parsed())
      return run_simulate(make_provenance(invocation, s_seed), s_channel, s_aux, s_n, s_rates,
                          s_trials, s_seed, s_eps, s_out);
    if (cmd_softcover->parsed())
      return run_softcover(make_provenance(invocation, f_seed), f_input, f_aux, f_n, f_r1, f_r2,
                           f_mode, f_samples, f_seed, f_sweep, f_sweep_values, f_out);
    if (cmd_transform->parsed())
      return run_transform(make_provenance(invocation, 0), t_channel, t_side, t_out);
    return 2;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const guard_error& e) {
    std::cerr << "guard exceeded: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
