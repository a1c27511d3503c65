#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "wtsk/info.hpp"

// WTSK_BIN is injected by the build: absolute path of the wtsk executable.

namespace {

struct CmdResult {
  int rc = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult res;
  std::string full = cmd + " 2>&1";
  FILE* p = popen(full.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), p)) > 0) res.out.append(buf, got);
  int st = pclose(p);
  res.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return res;
}

const std::string& scratch_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/wtsk_cli_XXXXXX";
    char* r = mkdtemp(tmpl);
    REQUIRE(r != nullptr);
    return std::string(r);
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  std::string path = scratch_dir() + "/" + name;
  std::ofstream f(path);
  f << text;
  REQUIRE(f.good());
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string cli_bin() { return std::string(WTSK_BIN); }

// y = x xor s with a blind tap
const char* kXorChannel = R"({
  "alphabets": {"S": 2, "X": 2, "Y": 2, "Z": 1},
  "state_dist": [0.5, 0.5],
  "kernel": [[[[1],[0]],[[0],[1]]],[[[0],[1]],[[1],[0]]]]
})";

// x = v xor s, state embedded in V at decode time
const char* kXorCase2 = R"({
  "mode": "case2", "U": 1, "V": 2,
  "input_dist": [[0.5, 0.5]],
  "selector": [[[[1,0],[0,1]]],[[[0,1],[1,0]]]]
})";

// standalone correlated design: U tracks S through a 0.1 flip, V uniform
const char* kSuvScheme = R"({
  "mode": "noncausal", "U": 2, "V": 2,
  "input_dist": [[[0.225,0.225],[0.025,0.025]],[[0.025,0.025],[0.225,0.225]]],
  "selector": [[[[1],[1]],[[1],[1]]],[[[1],[1]],[[1],[1]]]]
})";

// state independent of the aux pair: covering divergence is identically zero
const char* kIndepScheme = R"({
  "mode": "noncausal", "U": 1, "V": 2,
  "input_dist": [[[0.25, 0.25]], [[0.25, 0.25]]],
  "selector": [[[[1],[1]]],[[[1],[1]]]]
})";

const char* kPerfectSideInfo = R"({
  "Sa": 2, "Sb": 2, "Se": 2,
  "kernel": [[[[1,0],[0,0]],[[0,0],[0,0]]],[[[0,0],[0,0]],[[0,0],[0,1]]]]
})";

double parse_after(const std::string& text, const std::string& tag) {
  auto pos = text.find(tag);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + tag.size()));
}

// last CSV data row, split on commas
std::vector<std::string> last_row(const std::string& csv) {
  std::stringstream ss(csv);
  std::string line, keep;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find("n,R1") == 0 || line.find("R_M") == 0) continue;
    keep = line;
  }
  REQUIRE(!keep.empty());
  std::vector<std::string> cells;
  std::stringstream ls(keep);
  std::string cell;
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  return cells;
}

const std::string kSmallSearch = " --grid 2 --restarts 2 --refine 5 --directions 5";

}  // namespace

TEST_CASE("cli: validate reports ok, io_error, and named invalid rows") {
  std::string ch = write_scratch("xor.json", kXorChannel);
  CmdResult ok = run_cmd(cli_bin() + " validate " + ch);
  CHECK(ok.rc == 0);
  CHECK(ok.out.find("\"status\": \"ok\"") != std::string::npos);

  CmdResult miss = run_cmd(cli_bin() + " validate " + scratch_dir() + "/absent.json");
  CHECK(miss.rc == 1);
  CHECK(miss.out.find("io_error") != std::string::npos);

  std::string bad = write_scratch("bad.json", R"({
    "alphabets": {"S": 2, "X": 2, "Y": 2, "Z": 1},
    "state_dist": [0.5, 0.5],
    "kernel": [[[[1],[0.25]],[[0],[1]]],[[[0],[1]],[[1],[0]]]]
  })");
  CmdResult inv = run_cmd(cli_bin() + " validate " + bad);
  CHECK(inv.rc == 2);
  CHECK(inv.out.find("invalid") != std::string::npos);
  CHECK(inv.out.find("s=0") != std::string::npos);
}

TEST_CASE("cli: region emits reproducible artifacts with provenance") {
  std::string out = scratch_dir() + "/r.csv";
  std::string cmd = cli_bin() + " region fig6 --bound D_Region_T4 --hull --out " + out;
  CmdResult r = run_cmd(cmd);
  CHECK(r.rc == 0);
  double sm = parse_after(r.out, "endpoints: SM=");
  CHECK(sm == doctest::Approx(wtsk::binary_entropy(0.1)).epsilon(1e-3));

  std::string first = slurp(out);
  CHECK(first.find("R_M,R_K,provenance_id") != std::string::npos);
  CHECK(first.find("# config_hash: ") != std::string::npos);
  CHECK(slurp(scratch_dir() + "/r.designs.json").find("\"kind\"") != std::string::npos);
  CHECK(slurp(scratch_dir() + "/r_hull.csv").find("R_M,R_K") != std::string::npos);

  CmdResult again = run_cmd(cmd);
  CHECK(again.rc == 0);
  CHECK(slurp(out) == first);  // byte-for-byte stable

  CmdResult unknown = run_cmd(cli_bin() + " region fig6 --bound Nope --out " + out);
  CHECK(unknown.rc == 2);
  CHECK(unknown.out.find("NC_Inner_T1") != std::string::npos);
}

TEST_CASE("cli: capacity endpoints and the infeasible exit path") {
  std::string ch = write_scratch("xor2.json", kXorChannel);
  CmdResult gp = run_cmd(cli_bin() + " capacity " + ch +
                         " --bound NC_Inner_T1 --objective gp --max-u 1 --max-v 2" + kSmallSearch +
                         " --out " + scratch_dir() + "/cap.json");
  CHECK(gp.rc == 0);
  CHECK(parse_after(gp.out, "value: ") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(gp.out.find("feasible: yes") != std::string::npos);

  // state entropy exceeds every message cap on this family member
  CmdResult inf = run_cmd(cli_bin() + " capacity fig7:0.35 --bound C_Case2A --objective sk --max-v 2" +
                          kSmallSearch + " --out " + scratch_dir() + "/cap2.json");
  CHECK(inf.rc == 3);
  CHECK(inf.out.find("infeasible") != std::string::npos);
}

TEST_CASE("cli: simulate produces exact-mode reports and rejects bad rates") {
  std::string ch = write_scratch("xor3.json", kXorChannel);
  std::string aux = write_scratch("case2.json", kXorCase2);
  std::string out = scratch_dir() + "/sim.json";
  std::string cmd = cli_bin() + " simulate " + ch + " --aux-file " + aux +
                    " --n 2 --rates 0,1,0,1 --seed 5 --out " + out;
  CmdResult r = run_cmd(cmd);
  CHECK(r.rc == 0);
  nlohmann::json rep = nlohmann::json::parse(slurp(out));
  CHECK(rep["mode"] == "exact");
  CHECK(rep["leakage_bits"].get<double>() == 0.0);  // the tap is constant
  CHECK(rep["n"] == 2);
  CHECK(rep["seed"] == 5);
  CHECK(rep.contains("config_hash"));

  std::string first = slurp(out);
  CmdResult again = run_cmd(cmd);
  CHECK(again.rc == 0);
  CHECK(slurp(out) == first);

  CmdResult neg = run_cmd(cli_bin() + " simulate " + ch + " --aux-file " + aux +
                          " --n 2 --rates 0,-1,0,1 --out " + scratch_dir() + "/sim2.json");
  CHECK(neg.rc == 2);
}

TEST_CASE("cli: softcover single points, sweeps, and the enumeration guard") {
  std::string scheme = write_scratch("suv.json", kSuvScheme);
  CmdResult one = run_cmd(cli_bin() + " softcover " + scheme + " --R1 0 --R2 0 --n 1 --out " +
                          scratch_dir() + "/sc.csv");
  CHECK(one.rc == 0);
  CHECK(one.out.find("# I_UVS:") != std::string::npos);
  auto row = last_row(one.out);
  REQUIRE(row.size() == 6);
  // single codeword: divergence equals I(UV;S) = 1 - h(0.1)
  CHECK(std::stod(row[3]) ==
        doctest::Approx(1.0 - wtsk::binary_entropy(0.1)).epsilon(1e-10));

  std::string indep = write_scratch("indep.json", kIndepScheme);
  CmdResult zero = run_cmd(cli_bin() + " softcover " + indep + " --R1 0.5 --R2 0.5 --n 2 --out " +
                           scratch_dir() + "/sc0.csv");
  CHECK(zero.rc == 0);
  CHECK(std::stod(last_row(zero.out)[3]) == 0.0);

  CmdResult sweep = run_cmd(cli_bin() + " softcover " + scheme +
                            " --R1 2 --R2 1 --sweep n --sweep-values 1,2,3 --out " +
                            scratch_dir() + "/scn.csv");
  CHECK(sweep.rc == 0);
  auto lastn = last_row(sweep.out);
  CHECK(lastn[0] == "3");

  CmdResult guard = run_cmd(cli_bin() + " softcover " + scheme + " --R1 2 --R2 2 --n 12 --out " +
                            scratch_dir() + "/scg.csv");
  CHECK(guard.rc == 4);
}

TEST_CASE("cli: transform reduces side information to a perfect-CSI channel") {
  std::string ch = write_scratch("xor4.json", kXorChannel);
  std::string si = write_scratch("si.json", kPerfectSideInfo);
  std::string out = scratch_dir() + "/reduced.json";
  CmdResult r = run_cmd(cli_bin() + " transform " + ch + " --side-info " + si + " --out " + out);
  CHECK(r.rc == 0);
  CHECK(r.out.find("reduced alphabets: S=2 X=2 Y=4 Z=2") != std::string::npos);

  CmdResult check = run_cmd(cli_bin() + " validate " + out);
  CHECK(check.rc == 0);
  CHECK(check.out.find("\"status\": \"ok\"") != std::string::npos);

  CmdResult miss =
      run_cmd(cli_bin() + " transform " + ch + " --side-info " + scratch_dir() + "/no_si.json --out " + out);
  CHECK(miss.rc == 1);
}

TEST_CASE("cli: compare tabulates endpoints and dominance") {
  std::string out = scratch_dir() + "/cmp.json";
  CmdResult r = run_cmd(cli_bin() + " compare fig5 --bounds C_Case2A,C_Case2B --max-u 2 --max-v 2" +
                        kSmallSearch + " --out " + out);
  CHECK(r.rc == 0);
  CHECK(r.out.find("SK direction:") != std::string::npos);
  nlohmann::json cmp = nlohmann::json::parse(slurp(out));
  REQUIRE(cmp["bounds"].size() == 2);
  REQUIRE(cmp["dominates"].size() == 2);
  CHECK(cmp["dominates"][0].size() == 2);
  CHECK(cmp["dominates"][0][0].get<bool>());
  CHECK(cmp["dominates"][1][1].get<bool>());
}
