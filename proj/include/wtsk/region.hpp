#ifndef WTSK_REGION_HPP
#define WTSK_REGION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "wtsk/bounds.hpp"
#include "wtsk/channel.hpp"

namespace wtsk {

// A frontier is the R_K profile of a union of rate polytopes:
//   staircase: between stored vertices the curve runs at slope -1 into the
//     next vertex (each polytope's boundary is a 45-degree segment), with
//     implicit vertical drops; vertices are the Pareto-minimal description.
//   envelope: straight interpolation between vertices (output of the upper
//     concave envelope, i.e. time sharing).
enum class FrontierKind { staircase, envelope };

struct FrontierVertex {
  double rm = 0.0, rk = 0.0;
  int poly = -1;  // index into RegionFrontier::polys, -1 for the trivial origin
};

struct RegionFrontier {
  FrontierKind kind = FrontierKind::staircase;
  std::vector<FrontierVertex> vertices;  // sorted by rm, rk non-increasing
  std::vector<RatePolytope> polys;       // surviving polytopes (provenance)

  // Largest R_K on the frontier at the given R_M; 0 where nothing reaches.
  double value_at(double rm) const;
  double max_rm() const;
  double sm_endpoint() const { return max_rm(); }
  double sk_endpoint() const { return value_at(0.0); }
};

// Union of clamped polytopes as a Pareto staircase. Empty input or all-empty
// regions give the single vertex (0,0).
RegionFrontier pareto_union(const std::vector<RatePolytope>& polys);

// Upper concave envelope of a staircase frontier (time-sharing closure).
RegionFrontier upper_concave_envelope(const RegionFrontier& f);

// True iff a covers b: at every vertex of b, a's profile is >= rk - tol.
bool frontier_dominates(const RegionFrontier& a, const RegionFrontier& b, double tol);

// max_RM |a(RM) - b(RM)| sampled on an even grid over the larger extent.
double hausdorff_frontier_distance(const RegionFrontier& a, const RegionFrontier& b,
                                   int grid_points = 200);

struct SearchConfig {
  // Aux alphabet caps; 0 means the catalog default for the bound, which is
  // the cardinality bound |U| <= (|X|-1)|S|+3,
  // |V| <= (|X|-1)^2 |S|^2 + 3(|X|-1)|S| + 2 (with the per-bound forced
  // singletons applied). Provenance records the caps actually used.
  int max_u = 0;
  int max_v = 0;
  int grid_resolution = 4;      // stratified simplex grid: weights k/resolution
  int random_restarts = 24;
  int refine_iterations = 40;   // accept-if-improve passes with halving step
  std::uint64_t seed = 1;
  bool hull = false;            // also emit the concave envelope
  bool stochastic_selectors = false;  // opt-in; deterministic selectors always searched
  int directions = 33;          // scalarization sweep over [0,90] degrees
  std::size_t max_grid_designs = 20000;  // stride-subsampled if the grid is larger
  std::size_t det_selector_cap = 512;
  int threads = 1;              // results are identical for any thread count
};

// A point in the search space, sufficient to rebuild the scheme:
//   aux bounds, causal modes: weights = p_UV (nu*nv);
//   aux bounds, noncausal:    weights = |S| blocks of p_{UV|s};
//   input-only bounds:        weights = |S| blocks of p_{X|s}.
// det_selector maps (s,u,v) -> x; empty means stoch_selector rows are used.
struct Design {
  BoundId bound = BoundId::NC_Inner_T1;
  AuxMode mode = AuxMode::NonCausal;
  int nu = 1, nv = 1;
  std::vector<double> weights;
  std::vector<int> det_selector;
  std::vector<double> stoch_selector;
};

AuxiliaryScheme design_to_aux(const WiretapChannel& ch, const Design& d);
Tensor design_to_psx(const WiretapChannel& ch, const Design& d);
RatePolytope evaluate_design(const WiretapChannel& ch, const Design& d);

// Rebuild a Design from an aux scheme (selector kept as stochastic rows).
// Lets one bound's winner seed another bound's search after a layout change
// such as expand_to_noncausal.
Design design_from_aux(const WiretapChannel& ch, BoundId bound, const AuxiliaryScheme& aux);

// Aux sizes the search will use for this bound under cfg (forced singletons
// and caps applied).
std::pair<int, int> search_aux_sizes(const WiretapChannel& ch, BoundId id,
                                     const SearchConfig& cfg);

struct RegionResult {
  RegionFrontier frontier;  // staircase union of all visited designs
  std::optional<RegionFrontier> hulled;
  std::vector<Design> designs;  // indexed by polys[i].design_ref
  long evaluations = 0;
  int used_u = 1, used_v = 1;
};

// Deterministic given (channel, bound, cfg, warm_start): stratified grid,
// then random restarts, then per-direction scalarized refinement; every
// evaluated design's polytope joins the union. warm_start designs (e.g.
// winners of a related search) are evaluated first.
RegionResult optimize_region(const WiretapChannel& ch, BoundId bound, const SearchConfig& cfg,
                             const std::vector<Design>& warm_start = {});

enum class ScalarObjective {
  SM,        // clamped message endpoint
  SK,        // clamped key endpoint behind the R_M=0 gate
  SKSigned,  // gated but unclamped (diagnostic comparisons)
  GP,        // signed c_m of NC_Inner_T1: max I(UV;Y)-I(UV;S)
};

struct ScalarResult {
  double value = 0.0;
  Design design;
  bool feasible = false;  // false if every visited design failed the gate
  long evaluations = 0;
};

ScalarResult optimize_scalar(const WiretapChannel& ch, BoundId bound, ScalarObjective obj,
                             const SearchConfig& cfg,
                             const std::vector<Design>& warm_start = {});

}  // namespace wtsk

#endif
