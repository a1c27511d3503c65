// Acceptance gate: one printed line per criterion, exit code = number of
// failures. Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wtsk/bounds.hpp"
#include "wtsk/channel.hpp"
#include "wtsk/errors.hpp"
#include "wtsk/info.hpp"
#include "wtsk/region.hpp"
#include "wtsk/sim.hpp"

using namespace wtsk;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

WiretapChannel xor_channel() {
  WiretapChannel ch;
  ch.ns = 2;
  ch.nx = 2;
  ch.ny = 2;
  ch.nz = 1;
  ch.state_dist = {0.5, 0.5};
  ch.kernel = Tensor({2, 2, 2, 1});
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x) ch.kernel.at({s, x, x ^ s, 0}) = 1.0;
  return ch;
}

// binary aux pair with I(U;S) = 1 - h(0.1), V independent, over a channel
// with degenerate outputs (soft covering and the exponent only read p_SUV)
JointSystem covering_joint() {
  WiretapChannel ch;
  ch.ns = 2;
  ch.nx = 1;
  ch.ny = 1;
  ch.nz = 1;
  ch.state_dist = {0.5, 0.5};
  ch.kernel = Tensor({2, 1, 1, 1}, {1.0, 1.0});
  AuxiliaryScheme aux;
  aux.mode = AuxMode::NonCausal;
  aux.nu = 2;
  aux.nv = 2;
  aux.input = Tensor({2, 2, 2});
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v) aux.input.at({s, u, v}) = ((s == u) ? 0.45 : 0.05) * 0.5;
  aux.selector = Tensor({2, 2, 2, 1});
  for (std::size_t i = 0; i < aux.selector.size(); ++i) aux.selector[i] = 1.0;
  return build_joint(ch, aux);
}

Design psx_design(double p00, double p01, double p10, double p11) {
  Design d;
  d.bound = BoundId::D_Region_T4;
  d.nu = 1;
  d.nv = 1;
  d.weights = {p00, p01, p10, p11};  // two blocks of p(x|s)
  return d;
}

// ---------------------------------------------------------------------- 1
// On degraded channels the causal decoder-side region, the correlated
// encoder+decoder region, and the direct state-input region coincide; the
// searches must land within 0.02 bits of each other.
Outcome criterion1() {
  auto t0 = Clock::now();
  constexpr double tol_bits = 0.02;
  constexpr double budget_s = 300.0;
  std::mt19937_64 rng(4001);
  double worst = 0.0;

  for (int trial = 0; trial < 5; ++trial) {
    WiretapChannel ch = oracle::random_degraded_channel(rng);

    SearchConfig cfg4;
    cfg4.grid_resolution = 12;
    cfg4.random_restarts = 8;
    cfg4.refine_iterations = 30;
    cfg4.directions = 21;
    RegionResult rt4 = optimize_region(ch, BoundId::D_Region_T4, cfg4);

    // lift the state-input winners: Shannon-strategy table for the causal
    // search (v = (x at s=0, x at s=1), selector evaluates the component),
    // identity V=X for the correlated search
    std::vector<Design> warm_c4, warm_t3;
    for (const auto& d : rt4.designs) {
      Tensor psx = design_to_psx(ch, d);
      double px[2][2];
      for (int s = 0; s < 2; ++s) {
        double row = psx.at({s, 0}) + psx.at({s, 1});
        for (int x = 0; x < 2; ++x) px[s][x] = row > 0 ? psx.at({s, x}) / row : 0.5;
      }
      AuxiliaryScheme strat;
      strat.mode = AuxMode::Case1;
      strat.nu = 1;
      strat.nv = 4;
      strat.input = Tensor({1, 4});
      strat.selector = Tensor({2, 1, 4, 2});
      for (int v = 0; v < 4; ++v) {
        int x0 = v >> 1, x1 = v & 1;
        strat.input.at({0, v}) = px[0][x0] * px[1][x1];
        strat.selector.at({0, 0, v, x0}) = 1.0;
        strat.selector.at({1, 0, v, x1}) = 1.0;
      }
      warm_c4.push_back(design_from_aux(ch, BoundId::C_ED_Cor4, strat));

      AuxiliaryScheme ident;
      ident.mode = AuxMode::NonCausal;
      ident.nu = 1;
      ident.nv = 2;
      ident.input = Tensor({2, 1, 2});
      ident.selector = Tensor({2, 1, 2, 2});
      for (int s = 0; s < 2; ++s)
        for (int v = 0; v < 2; ++v) {
          ident.input.at({s, 0, v}) = ch.state_dist[static_cast<std::size_t>(s)] * px[s][v];
          ident.selector.at({s, 0, v, v}) = 1.0;
        }
      warm_t3.push_back(design_from_aux(ch, BoundId::NC_ED_Region_T3, ident));
    }

    SearchConfig cfg_c4;
    cfg_c4.max_u = 1;
    cfg_c4.max_v = 4;
    cfg_c4.grid_resolution = 4;
    cfg_c4.random_restarts = 6;
    cfg_c4.refine_iterations = 20;
    cfg_c4.directions = 13;
    RegionResult rc4 = optimize_region(ch, BoundId::C_ED_Cor4, cfg_c4, warm_c4);

    SearchConfig cfg_t3;
    cfg_t3.max_u = 1;
    cfg_t3.max_v = 2;
    cfg_t3.grid_resolution = 6;
    cfg_t3.random_restarts = 6;
    cfg_t3.refine_iterations = 20;
    cfg_t3.directions = 13;
    RegionResult rt3 = optimize_region(ch, BoundId::NC_ED_Region_T3, cfg_t3, warm_t3);

    // feed the aux winners back so the state-input search sees their inputs
    std::vector<Design> warm_t4;
    for (const auto* rr : {&rc4, &rt3})
      for (const auto& d : rr->designs) {
        Tensor psx = build_joint(ch, design_to_aux(ch, d)).p.marginal({ax::S, ax::X});
        warm_t4.push_back(psx_design(psx.at({0, 0}), psx.at({0, 1}), psx.at({1, 0}), psx.at({1, 1})));
        auto& w = warm_t4.back().weights;
        double b0 = w[0] + w[1], b1 = w[2] + w[3];
        if (b0 > 0) { w[0] /= b0; w[1] /= b0; }
        if (b1 > 0) { w[2] /= b1; w[3] /= b1; }
      }
    RegionResult rt4b = optimize_region(ch, BoundId::D_Region_T4, cfg4, warm_t4);

    double h = std::max({hausdorff_frontier_distance(rt4b.frontier, rc4.frontier),
                         hausdorff_frontier_distance(rt4b.frontier, rt3.frontier),
                         hausdorff_frontier_distance(rc4.frontier, rt3.frontier)});
    worst = std::max(worst, h);
  }

  double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst <= tol_bits && secs <= budget_s;
  o.detail = "worst pairwise frontier distance " + fmt(worst) + " bits over 5 degraded channels, " +
             fmt(secs) + " s";
  return o;
}

// ---------------------------------------------------------------------- 2
// Key/message endpoint orderings across the worked reversely-degraded and
// degraded instances, including one parameter-family member flipping the
// key-rate order.
Outcome criterion2() {
  SearchConfig cfg;
  cfg.grid_resolution = 4;
  cfg.random_restarts = 8;
  cfg.refine_iterations = 25;
  cfg.directions = 9;
  cfg.max_u = 2;
  cfg.max_v = 2;

  WiretapChannel f5 = builtin_example("fig5");
  WiretapChannel f6 = builtin_example("fig6");
  double h01 = binary_entropy(0.1);

  ScalarResult k1 = optimize_scalar(f5, BoundId::C_Case2A, ScalarObjective::SKSigned, cfg);
  ScalarResult k2 = optimize_scalar(f5, BoundId::C_Case2B, ScalarObjective::SKSigned, cfg);
  bool part_a = k1.feasible && k2.feasible && (k2.value - k1.value >= 1e-3);

  ScalarResult k1p = optimize_scalar(f6, BoundId::C_ED_Cor4, ScalarObjective::SK, cfg);
  ScalarResult k2p = optimize_scalar(f6, BoundId::C_ED_Cor5, ScalarObjective::SK, cfg);
  bool part_b = k1p.feasible && k1p.value >= h01 - 1e-3 && k2p.feasible &&
                std::abs(k2p.value) <= 1e-9;

  ScalarResult m2 = optimize_scalar(f5, BoundId::C_ED_Cor5, ScalarObjective::SM, cfg);
  ScalarResult m1 = optimize_scalar(f5, BoundId::C_ED_Cor4, ScalarObjective::SM, cfg);
  bool part_c = m2.value >= 1.0 - h01 - 1e-3 && m2.value > m1.value;

  int exhibits = 0;
  bool far_member_gated = false;
  for (double flip : {0.05, 0.1, 0.15, 0.3}) {
    char name[32];
    std::snprintf(name, sizeof(name), "fig7:%g", flip);
    WiretapChannel ch = builtin_example(name);
    ScalarResult a = optimize_scalar(ch, BoundId::C_Case2A, ScalarObjective::SKSigned, cfg);
    ScalarResult b = optimize_scalar(ch, BoundId::C_Case2B, ScalarObjective::SKSigned, cfg);
    if (a.feasible && b.feasible && a.value < b.value - 1e-6) ++exhibits;
    if (flip == 0.3 && !a.feasible) far_member_gated = true;
  }
  bool part_d = exhibits >= 1;

  Outcome o;
  o.pass = part_a && part_b && part_c && part_d;
  o.detail = "K1=" + fmt(k1.value) + " < K2=" + fmt(k2.value) + (part_a ? "" : " [violated]") +
             "; K1'=" + fmt(k1p.value) + " K2'=" + fmt(k2p.value) + (part_b ? "" : " [violated]") +
             "; M2'=" + fmt(m2.value) + " M1'=" + fmt(m1.value) + (part_c ? "" : " [violated]") +
             "; family members with K1<K2: " + std::to_string(exhibits) +
             (far_member_gated ? " (flip 0.3 gate infeasible)" : "");
  return o;
}

// ---------------------------------------------------------------------- 3
// State-cancellation degenerate case: with a blind tap and y = x xor s the
// message endpoint is a full bit, found by search and by an independent
// brute force over deterministic designs.
Outcome criterion3() {
  WiretapChannel ch = xor_channel();
  SearchConfig cfg;
  cfg.max_u = 1;
  cfg.max_v = 2;
  cfg.grid_resolution = 4;
  cfg.random_restarts = 6;
  cfg.refine_iterations = 10;
  cfg.directions = 5;

  ScalarResult t1 = optimize_scalar(ch, BoundId::NC_Inner_T1, ScalarObjective::SM, cfg);
  ScalarResult c1 = optimize_scalar(ch, BoundId::C_Case1, ScalarObjective::SM, cfg);

  // brute force: weights on a quarter grid, all deterministic selectors,
  // joints assembled and scored by the independent oracle only
  auto brute = [&](bool correlated) {
    double best = 0.0;
    for (int w0 = 0; w0 <= 4; ++w0)
      for (int w1 = 0; w1 <= 4; ++w1) {
        if (!correlated && w1 != w0) continue;  // causal case: one shared p_V
        double pv[2][2] = {{w0 / 4.0, 1.0 - w0 / 4.0}, {w1 / 4.0, 1.0 - w1 / 4.0}};
        for (int sel = 0; sel < 16; ++sel) {
          oracle::Joint J;
          J.dims = {2, 1, 2, 2, 2, 1};
          J.p.assign(32, 0.0);
          for (int s = 0; s < 2; ++s)
            for (int v = 0; v < 2; ++v) {
              int x = (sel >> (s * 2 + v)) & 1;
              int y = x ^ s;
              std::size_t flat = static_cast<std::size_t>(
                  ((((s * 1 + 0) * 2 + v) * 2 + x) * 2 + y) * 1 + 0);
              J.p[flat] = 0.5 * pv[s][v];
            }
          oracle::Caps caps = oracle::caps_for(
              correlated ? BoundId::NC_Inner_T1 : BoundId::C_Case1, J);
          double sm = std::min(caps.c_m, caps.c_sum);
          best = std::max(best, sm);
        }
      }
    return best;
  };
  double brute_t1 = brute(true);
  double brute_c1 = brute(false);

  Outcome o;
  o.pass = std::abs(t1.value - 1.0) <= 1e-3 && std::abs(c1.value - 1.0) <= 1e-3 &&
           std::abs(brute_t1 - 1.0) <= 1e-3 && std::abs(brute_c1 - 1.0) <= 1e-3;
  o.detail = "search SM: correlated " + fmt(t1.value) + ", causal " + fmt(c1.value) +
             "; brute force: " + fmt(brute_t1) + ", " + fmt(brute_c1);
  return o;
}

// ---------------------------------------------------------------------- 4
// Exact ensemble covering divergence: collapses to n*I(UV;S) for a single
// codeword and decreases strictly in n once both layer rates clear their
// thresholds.
Outcome criterion4() {
  auto t0 = Clock::now();
  constexpr double budget_s = 60.0;
  JointSystem j = covering_joint();
  oracle::Joint oj = oracle::from_tensor(j.p.marginal({ax::S, ax::U, ax::V}));
  double i_uvs = oj.mi(1u, 2u | 4u);

  double worst_gap = 0.0;
  std::vector<double> dec;
  for (int n = 1; n <= 3; ++n) {
    SoftCoverResult one = soft_cover_divergence(j, n, 0.0, 0.0, SoftCoverMode::exact, 1);
    worst_gap = std::max(worst_gap, std::abs(one.bits - n * i_uvs));
    SoftCoverResult two = soft_cover_divergence(j, n, 2.0, 1.0, SoftCoverMode::exact, 1);
    dec.push_back(two.bits);
  }
  bool decreasing = dec[0] > dec[1] && dec[1] > dec[2];
  double secs = seconds_since(t0);

  Outcome o;
  o.pass = worst_gap <= 1e-10 && decreasing && secs <= budget_s;
  o.detail = "single-codeword gap " + fmt(worst_gap) + "; D(n)=" + fmt(dec[0]) + "," + fmt(dec[1]) +
             "," + fmt(dec[2]) + (decreasing ? " strictly decreasing" : " NOT decreasing") + "; " +
             fmt(secs) + " s";
  return o;
}

// ---------------------------------------------------------------------- 5
// State-resolution exponent: zero limit, information slope, and the
// two-layer exponential bound dominating the exact ensemble divergence on an
// instance far beyond naive enumeration.
Outcome criterion5() {
  JointSystem j = covering_joint();
  oracle::Joint oj = oracle::from_tensor(j.p.marginal({ax::S, ax::U, ax::V}));
  double i_uvs = oj.mi(1u, 2u | 4u);

  double at_zero = std::abs(gallager_e0(j, 1e-6));
  double slope = gallager_e0(j, 1e-3) / 1e-3;
  bool slope_ok = std::abs(slope + i_uvs) <= 0.01 * i_uvs;

  const int n = 3;
  const double R1 = 2.0, R2 = 1.0;
  SoftCoverResult ex = soft_cover_divergence(j, n, R1, R2, SoftCoverMode::exact, 1);
  long L = rate_index_size(n, R1), N = rate_index_size(n, R2);
  // naive ensemble enumeration would visit |U|^(nL) * |V|^(nLN) codebooks
  double naive_log2 = static_cast<double>(n) * (static_cast<double>(L) * std::log2(2.0) +
                                               static_cast<double>(L * N) * std::log2(2.0));
  bool big_enough = naive_log2 >= 20.0;

  bool dominated = true;
  double tightest = 1e300;
  for (int k = 1; k <= 19; ++k) {
    double rho = 0.05 * k;
    double f = (1.0 / rho) * (std::exp2(-n * (rho * R1 + gallager_e0_u(j, rho))) +
                              std::exp2(-n * (rho * (R1 + R2) + gallager_e0(j, rho))));
    if (f < ex.bits - 1e-12) dominated = false;
    tightest = std::min(tightest, f);
  }

  Outcome o;
  o.pass = at_zero <= 1e-5 && slope_ok && dominated && big_enough;
  o.detail = "|E0(1e-6)|=" + fmt(at_zero) + "; slope " + fmt(slope) + " vs -I " + fmt(-i_uvs) +
             "; exact D=" + fmt(ex.bits) + " <= tightest bound " + fmt(tightest) +
             " (ensemble 2^" + fmt(naive_log2) + " codebooks)";
  return o;
}

// ---------------------------------------------------------------------- 6
// The causal streaming encoder and the likelihood encoder induce identical
// ensemble-averaged outcome laws (conditioning the latter on candidate
// selection succeeding), verified by enumerating every codebook.
Outcome criterion6() {
  WiretapChannel ch = xor_channel();
  AuxiliaryScheme aux;
  aux.mode = AuxMode::Case2;
  aux.nu = 1;
  aux.nv = 2;
  aux.input = Tensor({1, 2}, {0.5, 0.5});
  aux.selector = Tensor({2, 1, 2, 2});
  for (int s = 0; s < 2; ++s)
    for (int v = 0; v < 2; ++v) aux.selector.at({s, 0, v, v ^ s}) = 1.0;
  JointSystem j = build_joint(ch, expand_to_noncausal(ch, aux));

  const int n = 2;
  Codebook cb;
  cb.joint = j;
  cb.n = n;
  cb.L = 1;
  cb.N = 2;
  cb.K = 1;
  cb.M = 2;
  cb.u_layer = {{0, 0}};
  cb.v_layer.assign(4, std::vector<int>(2, 0));

  // uniform p(v') over 4 symbols: each of the 16^4 codebooks has equal mass
  const double cb_prob = 1.0 / 65536.0;
  double worst_tv = 0.0;
  for (long m = 0; m < cb.M; ++m) {
    for (int sf = 0; sf < 4; ++sf) {
      std::vector<int> s_seq{sf >> 1, sf & 1};
      std::vector<double> cau_avg(8, 0.0), lik_avg(8, 0.0);
      double p_success = 0.0;
      for (long code = 0; code < 65536; ++code) {
        long rest = code;
        for (int w = 0; w < 4; ++w) {
          int word = static_cast<int>(rest & 15);
          rest >>= 4;
          cb.v_layer[static_cast<std::size_t>(w)] = {word >> 2, word & 3};
        }
        std::vector<double> cau = causal_encoder_outcome_law(cb, m, s_seq);
        for (std::size_t i = 0; i < 8; ++i) cau_avg[i] += cb_prob * cau[i];
        bool success = false;
        std::vector<double> lik = likelihood_encoder_outcome_law(cb, m, s_seq, &success);
        if (success) {
          p_success += cb_prob;
          for (std::size_t i = 0; i < 8; ++i) lik_avg[i] += cb_prob * lik[i];
        }
      }
      double tv = 0.0;
      for (std::size_t i = 0; i < 8; ++i) tv += std::abs(cau_avg[i] - lik_avg[i] / p_success);
      worst_tv = std::max(worst_tv, 0.5 * tv);
    }
  }

  Outcome o;
  o.pass = worst_tv <= 1e-12;
  o.detail = "worst TV over (message, state sequence) pairs: " + fmt(worst_tv) +
             " across 65536 codebooks";
  return o;
}

// ---------------------------------------------------------------------- 7
// Frontier containments: type-I causal inside the state-reproducing outer,
// every causal case inside the correlated inner under extended search, and
// the encoder-only outer inside the state-input region on degraded channels.
Outcome criterion7() {
  constexpr double tol = 1e-6;
  std::mt19937_64 rng(7001);
  SearchConfig cfg;
  cfg.grid_resolution = 3;
  cfg.random_restarts = 4;
  cfg.refine_iterations = 8;
  cfg.directions = 7;
  cfg.max_u = 2;
  cfg.max_v = 2;

  const BoundId causal_ids[] = {BoundId::C_Case1, BoundId::C_TypeI_Case2, BoundId::C_Case2A,
                                BoundId::C_Case2B, BoundId::C_TypeII_Case3};
  const BoundId type1_ids[] = {BoundId::C_TypeI_Case2, BoundId::C_Case2A, BoundId::C_Case2B};

  int repro_fail = 0, t1_fail = 0, outer_fail = 0;
  for (int trial = 0; trial < 10; ++trial) {
    WiretapChannel ch = oracle::random_channel(rng, 2, 2, 2, 2);

    std::vector<RegionResult> causal;
    std::vector<Design> warm_t1, warm_repro;
    for (BoundId id : causal_ids) {
      causal.push_back(optimize_region(ch, id, cfg));
      for (const auto& d : causal.back().designs) {
        AuxiliaryScheme big = expand_to_noncausal(ch, design_to_aux(ch, d));
        warm_t1.push_back(design_from_aux(ch, BoundId::NC_Inner_T1, big));
        bool type1 = id == BoundId::C_TypeI_Case2 || id == BoundId::C_Case2A ||
                     id == BoundId::C_Case2B;
        if (type1) warm_repro.push_back(design_from_aux(ch, BoundId::StateRepro_Outer, big));
      }
    }
    RegionResult t1 = optimize_region(ch, BoundId::NC_Inner_T1, cfg, warm_t1);
    RegionResult repro = optimize_region(ch, BoundId::StateRepro_Outer, cfg, warm_repro);

    for (std::size_t i = 0; i < 5; ++i)
      if (!frontier_dominates(t1.frontier, causal[i].frontier, tol)) ++t1_fail;
    for (BoundId id : type1_ids) {
      std::size_t i = 0;
      while (causal_ids[i] != id) ++i;
      if (!frontier_dominates(repro.frontier, causal[i].frontier, tol)) ++repro_fail;
    }
  }

  std::mt19937_64 rng2(7002);
  for (int trial = 0; trial < 10; ++trial) {
    WiretapChannel ch = oracle::random_degraded_channel(rng2);
    SearchConfig dcfg;
    dcfg.grid_resolution = 8;
    dcfg.random_restarts = 4;
    dcfg.refine_iterations = 12;
    dcfg.directions = 9;
    RegionResult rt5 = optimize_region(ch, BoundId::E_Outer_T5, dcfg);
    std::vector<Design> warm;
    for (const auto& d : rt5.designs) {
      warm.push_back(d);
      warm.back().bound = BoundId::D_Region_T4;
    }
    RegionResult rt4 = optimize_region(ch, BoundId::D_Region_T4, dcfg, warm);
    bool ok = frontier_dominates(rt4.frontier, rt5.frontier, tol) &&
              rt5.frontier.sk_endpoint() <= rt4.frontier.sk_endpoint() + tol;
    for (const auto& d : rt5.designs) {
      Tensor psx = design_to_psx(ch, d);
      if (eval_outer_e(ch, psx).c_sum > eval_degraded_region(ch, psx).c_sum + 1e-12) ok = false;
    }
    if (!ok) ++outer_fail;
  }

  Outcome o;
  o.pass = repro_fail == 0 && t1_fail == 0 && outer_fail == 0;
  o.detail = "violations: state-repro " + std::to_string(repro_fail) + "/30, correlated-inner " +
             std::to_string(t1_fail) + "/50, degraded-outer " + std::to_string(outer_fail) + "/10";
  return o;
}

// ---------------------------------------------------------------------- 8
// Exact leakage: identically zero when the tap ignores the input, strictly
// positive when the tap equals the main output and a message is carried.
Outcome criterion8() {
  // tap depends on the state only
  WiretapChannel blind;
  blind.ns = 2;
  blind.nx = 2;
  blind.ny = 2;
  blind.nz = 2;
  blind.state_dist = {0.5, 0.5};
  blind.kernel = Tensor({2, 2, 2, 2});
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) {
          double py = (y == (x ^ s)) ? 0.9 : 0.1;
          double pz = (z == s) ? 0.8 : 0.2;
          blind.kernel.at({s, x, y, z}) = py * pz;
        }
  AuxiliaryScheme aux;
  aux.mode = AuxMode::NonCausal;
  aux.nu = 1;
  aux.nv = 2;
  aux.input = Tensor({2, 1, 2}, {0.25, 0.25, 0.25, 0.25});
  aux.selector = Tensor({2, 1, 2, 2});
  for (int s = 0; s < 2; ++s)
    for (int v = 0; v < 2; ++v) aux.selector.at({s, 0, v, v}) = 1.0;
  SimReport quiet = run_trials(blind, build_joint(blind, aux), 2, SimRates{0.0, 1.0, 0.0, 1.0}, 0, 11);
  bool zero_ok = quiet.mode == "exact" && quiet.leakage_bits <= 1e-12;

  // tap wired to the main output
  WiretapChannel open_tap;
  open_tap.ns = 1;
  open_tap.nx = 2;
  open_tap.ny = 2;
  open_tap.nz = 2;
  open_tap.state_dist = {1.0};
  open_tap.kernel = Tensor({1, 2, 2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) open_tap.kernel.at({0, x, y, y}) = (y == x) ? 0.9 : 0.1;
  AuxiliaryScheme oaux;
  oaux.mode = AuxMode::NonCausal;
  oaux.nu = 1;
  oaux.nv = 2;
  oaux.input = Tensor({1, 1, 2}, {0.5, 0.5});
  oaux.selector = Tensor({1, 1, 2, 2});
  for (int v = 0; v < 2; ++v) oaux.selector.at({0, 0, v, v}) = 1.0;
  JointSystem jo = build_joint(open_tap, oaux);
  double leak = 0.0;
  std::uint64_t used_seed = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SimReport rep = run_trials(open_tap, jo, 2, SimRates{0.0, 0.0, 0.0, 1.0}, 0, seed);
    if (rep.leakage_bits > leak) {
      leak = rep.leakage_bits;
      used_seed = seed;
    }
    if (leak > 1e-6) break;
  }
  bool pos_ok = leak > 1e-6;

  Outcome o;
  o.pass = zero_ok && pos_ok;
  o.detail = "input-independent tap leakage " + fmt(quiet.leakage_bits) +
             "; wired tap leakage " + fmt(leak) + " (seed " + std::to_string(used_seed) + ")";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int num;
    Outcome (*fn)();
  };
  const Entry entries[] = {{1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
                           {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};
  int failures = 0;
  for (const auto& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    std::printf("criterion %d: %s (%s)\n", e.num, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures;
}
