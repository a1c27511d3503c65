#ifndef WTSK_BOUNDS_HPP
#define WTSK_BOUNDS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wtsk/channel.hpp"

namespace wtsk {

// Catalog of achievable-region / outer-bound evaluators. Each evaluator maps
// a fully expanded joint (or a state-input distribution for the two
// input-only bounds) to the two caps of
//   { R_M >= 0, R_K >= 0, R_M <= c_m, R_M + R_K <= c_sum }.
// Caps are reported signed; clamping to the nonnegative quadrant happens at
// region assembly, and the secret-key feasibility gates read the sign.
enum class BoundId {
  NC_Inner_T1,       // non-causal inner: c_m = I(UV;Y)-I(UV;S),
                     // c_sum = I(V;Y|U)-I(V;Z|U)-[I(U;S)-I(U;Y)]+
  NC_ED_Region_T3,   // state at encoder+decoder, capacity region:
                     // c_m = I(UV;Y|S), c_sum = I(V;Y|SU)-I(V;Z|SU)+H(S|ZU)
  C_Case1,           // causal, plain (U,V) indep of S: both caps I(V;Y)-I(V;Z)
  C_TypeI_Case2,     // causal, state embedded in V:
                     // c_m = I(USV;Y)-H(S), c_sum = I(SV;Y|U)-I(SV;Z|U)
  C_Case2A,          // type-I with U omitted: c_m = I(SV;Y)-H(S),
                     // c_sum = I(SV;Y)-I(SV;Z)
  C_Case2B,          // type-I with V omitted: c_m = I(U;Y)-H(S|UY),
                     // c_sum = H(S|UZ)-H(S|UY)
  C_TypeII_Case3,    // causal, state embedded in U: c_m = I(USV;Y)-H(S),
                     // c_sum = I(V;Y|SU)-I(V;Z|SU)-[H(S)-I(SU;Y)]+
  C_ED_Cor4,         // causal with state also at decoder:
                     // c_m = I(V;Y|S), c_sum = I(V;Y|S)-I(V;Z|S)+H(S|Z)
  C_ED_Cor5,         // key-oriented variant: c_m = I(U;Y|S), c_sum = H(S|UZ)
  D_Region_T4,       // degraded channels, capacity (input-only design p_SX):
                     // c_m = I(X;Y|S), c_sum = I(X;Y|S)-I(X;Z|S)+H(S|Z)
  E_Outer_T5,        // outer bound, CSI at encoder only: T4 minus H(S|Y)
  StateRepro_Outer,  // outer bound for state-reproducing schemes: type-I
                     // formulas over fully correlated p_SUV
};

std::string to_string(BoundId id);
BoundId bound_id_from_string(const std::string& s);
const std::vector<BoundId>& all_bound_ids();

// True for bounds whose design is a plain p_SX instead of an aux scheme.
bool is_input_only(BoundId id);

// Aux mode a joint must have been built with to evaluate this bound, if the
// bound is mode-specific.
std::optional<AuxMode> required_mode(BoundId id);

struct RatePolytope {
  double c_m = 0.0;    // signed cap on R_M
  double c_sum = 0.0;  // signed cap on R_M + R_K
  BoundId id = BoundId::NC_Inner_T1;
  int design_ref = -1;  // provenance index assigned by the optimizer

  double clamped_m() const { return c_m > 0.0 ? c_m : 0.0; }
  double clamped_sum() const { return c_sum > 0.0 ? c_sum : 0.0; }
  // Largest achievable R_M in the clamped region.
  double max_rm() const {
    double m = clamped_m(), s = clamped_sum();
    return m < s ? m : s;
  }
};

RatePolytope eval_nc_inner(const JointSystem& j);
RatePolytope eval_nc_ed(const JointSystem& j);
RatePolytope eval_causal_case(BoundId case_id, const JointSystem& j);
RatePolytope eval_causal_ed(BoundId id, const JointSystem& j);
RatePolytope eval_state_repro_outer(const JointSystem& j);

// Input-only bounds; p_sx has shape (S,X). The degraded-region caps are a
// capacity only when check_degraded says Degraded; callers surface that as a
// warning, evaluation itself is unconditional.
RatePolytope eval_degraded_region(const WiretapChannel& ch, const Tensor& p_sx);
RatePolytope eval_outer_e(const WiretapChannel& ch, const Tensor& p_sx);

// Dispatcher for all aux-scheme bounds (throws validation_error for the
// input-only ids).
RatePolytope eval_bound(BoundId id, const JointSystem& j);

enum class RateAxis { SM, SK };

// Boundary tolerance of the key-rate feasibility gate: designs with
// c_m >= -sk_gate_tol count as allowing R_M = 0.
inline constexpr double sk_gate_tol = 1e-9;

// SM: min(c_m, c_sum) clamped to >= 0. SK: c_sum clamped to >= 0 when the
// gate passes, nullopt (infeasible, excluded from maxima) otherwise.
std::optional<double> scalar_projection(const RatePolytope& p, RateAxis axis);

// Same gates, but the value keeps its sign; used by the comparison probes
// where negative key caps are meaningful diagnostics.
std::optional<double> scalar_projection_signed(const RatePolytope& p, RateAxis axis);

// Key-rate formula with the U layer versus with U marginalized out:
//   first  = I(V;Y|SU) - I(V;Z|SU) + H(S|ZU)
//   second = I(V;Y|S)  - I(V;Z|S)  + H(S|Z)
// The second is the conjectured simplification that is not tight in general;
// it is exposed only for comparison.
std::pair<double, double> compare_sk_formulas(const JointSystem& j);

}  // namespace wtsk

#endif
