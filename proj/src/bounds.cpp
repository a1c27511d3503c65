#include "wtsk/bounds.hpp"

#include <algorithm>

#include "wtsk/errors.hpp"

namespace wtsk {

namespace {

using ax::S;
using ax::U;
using ax::V;
using ax::X;
using ax::Y;
using ax::Z;

double pos(double v) { return v > 0.0 ? v : 0.0; }

void require_mode(const JointSystem& j, AuxMode m, const char* what) {
  if (j.mode != m)
    throw validation_error(std::string(what) + " requires a joint built in mode " +
                           to_string(m) + ", got " + to_string(j.mode));
}

void require_causal(const JointSystem& j, const char* what) {
  if (j.mode == AuxMode::NonCausal)
    throw validation_error(std::string(what) + " requires a causal-mode joint");
}

}  // namespace

std::string to_string(BoundId id) {
  switch (id) {
    case BoundId::NC_Inner_T1: return "NC_Inner_T1";
    case BoundId::NC_ED_Region_T3: return "NC_ED_Region_T3";
    case BoundId::C_Case1: return "C_Case1";
    case BoundId::C_TypeI_Case2: return "C_TypeI_Case2";
    case BoundId::C_Case2A: return "C_Case2A";
    case BoundId::C_Case2B: return "C_Case2B";
    case BoundId::C_TypeII_Case3: return "C_TypeII_Case3";
    case BoundId::C_ED_Cor4: return "C_ED_Cor4";
    case BoundId::C_ED_Cor5: return "C_ED_Cor5";
    case BoundId::D_Region_T4: return "D_Region_T4";
    case BoundId::E_Outer_T5: return "E_Outer_T5";
    case BoundId::StateRepro_Outer: return "StateRepro_Outer";
  }
  return "?";
}

const std::vector<BoundId>& all_bound_ids() {
  static const std::vector<BoundId> ids = {
      BoundId::NC_Inner_T1,   BoundId::NC_ED_Region_T3, BoundId::C_Case1,
      BoundId::C_TypeI_Case2, BoundId::C_Case2A,        BoundId::C_Case2B,
      BoundId::C_TypeII_Case3, BoundId::C_ED_Cor4,      BoundId::C_ED_Cor5,
      BoundId::D_Region_T4,   BoundId::E_Outer_T5,      BoundId::StateRepro_Outer};
  return ids;
}

BoundId bound_id_from_string(const std::string& s) {
  for (BoundId id : all_bound_ids())
    if (to_string(id) == s) return id;
  std::string valid;
  for (BoundId id : all_bound_ids()) {
    if (!valid.empty()) valid += ", ";
    valid += to_string(id);
  }
  throw validation_error("unknown bound id: " + s + " (valid: " + valid + ")");
}

bool is_input_only(BoundId id) {
  return id == BoundId::D_Region_T4 || id == BoundId::E_Outer_T5;
}

std::optional<AuxMode> required_mode(BoundId id) {
  switch (id) {
    case BoundId::NC_Inner_T1: return AuxMode::NonCausal;
    case BoundId::C_Case1: return AuxMode::Case1;
    case BoundId::C_TypeI_Case2: return AuxMode::Case2;
    case BoundId::C_Case2A: return AuxMode::Case2A;
    case BoundId::C_Case2B: return AuxMode::Case2B;
    case BoundId::C_TypeII_Case3: return AuxMode::Case3;
    default: return std::nullopt;
  }
}

RatePolytope eval_nc_inner(const JointSystem& j) {
  require_mode(j, AuxMode::NonCausal, "NC_Inner_T1");
  const Tensor& p = j.p;
  RatePolytope r;
  r.id = BoundId::NC_Inner_T1;
  r.c_m = mutual_information(p, {U, V}, {Y}) - mutual_information(p, {U, V}, {S});
  r.c_sum = conditional_mutual_information(p, {V}, {Y}, {U}) -
            conditional_mutual_information(p, {V}, {Z}, {U}) -
            pos(mutual_information(p, {U}, {S}) - mutual_information(p, {U}, {Y}));
  return r;
}

RatePolytope eval_nc_ed(const JointSystem& j) {
  const Tensor& p = j.p;
  RatePolytope r;
  r.id = BoundId::NC_ED_Region_T3;
  r.c_m = conditional_mutual_information(p, {U, V}, {Y}, {S});
  r.c_sum = conditional_mutual_information(p, {V}, {Y}, {S, U}) -
            conditional_mutual_information(p, {V}, {Z}, {S, U}) +
            conditional_entropy(p, {S}, {Z, U});
  return r;
}

RatePolytope eval_causal_case(BoundId case_id, const JointSystem& j) {
  const Tensor& p = j.p;
  RatePolytope r;
  r.id = case_id;
  switch (case_id) {
    case BoundId::C_Case1: {
      require_mode(j, AuxMode::Case1, "C_Case1");
      // The message-only constraint is redundant for this case; the single
      // sum constraint defines the polytope.
      double c = mutual_information(p, {V}, {Y}) - mutual_information(p, {V}, {Z});
      r.c_m = c;
      r.c_sum = c;
      break;
    }
    case BoundId::C_TypeI_Case2: {
      require_mode(j, AuxMode::Case2, "C_TypeI_Case2");
      r.c_m = mutual_information(p, {S, U, V}, {Y}) - entropy(p, {S});
      r.c_sum = conditional_mutual_information(p, {S, V}, {Y}, {U}) -
                conditional_mutual_information(p, {S, V}, {Z}, {U});
      break;
    }
    case BoundId::C_Case2A: {
      require_mode(j, AuxMode::Case2A, "C_Case2A");
      r.c_m = mutual_information(p, {S, V}, {Y}) - entropy(p, {S});
      r.c_sum = mutual_information(p, {S, V}, {Y}) - mutual_information(p, {S, V}, {Z});
      break;
    }
    case BoundId::C_Case2B: {
      require_mode(j, AuxMode::Case2B, "C_Case2B");
      r.c_m = mutual_information(p, {U}, {Y}) - conditional_entropy(p, {S}, {U, Y});
      r.c_sum = conditional_entropy(p, {S}, {U, Z}) - conditional_entropy(p, {S}, {U, Y});
      break;
    }
    case BoundId::C_TypeII_Case3: {
      require_mode(j, AuxMode::Case3, "C_TypeII_Case3");
      r.c_m = mutual_information(p, {S, U, V}, {Y}) - entropy(p, {S});
      r.c_sum = conditional_mutual_information(p, {V}, {Y}, {S, U}) -
                conditional_mutual_information(p, {V}, {Z}, {S, U}) -
                pos(entropy(p, {S}) - mutual_information(p, {S, U}, {Y}));
      break;
    }
    default:
      throw validation_error("eval_causal_case: not a causal case id: " + to_string(case_id));
  }
  return r;
}

RatePolytope eval_causal_ed(BoundId id, const JointSystem& j) {
  const Tensor& p = j.p;
  RatePolytope r;
  r.id = id;
  if (id == BoundId::C_ED_Cor4) {
    require_causal(j, "C_ED_Cor4");
    if (j.nu != 1) throw validation_error("C_ED_Cor4 requires |U| = 1");
    r.c_m = conditional_mutual_information(p, {V}, {Y}, {S});
    r.c_sum = conditional_mutual_information(p, {V}, {Y}, {S}) -
              conditional_mutual_information(p, {V}, {Z}, {S}) +
              conditional_entropy(p, {S}, {Z});
  } else if (id == BoundId::C_ED_Cor5) {
    require_causal(j, "C_ED_Cor5");
    if (j.nv != 1) throw validation_error("C_ED_Cor5 requires |V| = 1");
    r.c_m = conditional_mutual_information(p, {U}, {Y}, {S});
    r.c_sum = conditional_entropy(p, {S}, {U, Z});
  } else {
    throw validation_error("eval_causal_ed: bad id: " + to_string(id));
  }
  return r;
}

RatePolytope eval_state_repro_outer(const JointSystem& j) {
  const Tensor& p = j.p;
  RatePolytope r;
  r.id = BoundId::StateRepro_Outer;
  r.c_m = mutual_information(p, {S, U, V}, {Y}) - entropy(p, {S});
  r.c_sum = conditional_mutual_information(p, {S, V}, {Y}, {U}) -
            conditional_mutual_information(p, {S, V}, {Z}, {U});
  return r;
}

namespace {

// Axes of a (S,X,Y,Z) joint.
constexpr int iS = 0, iX = 1, iY = 2, iZ = 3;

}  // namespace

RatePolytope eval_degraded_region(const WiretapChannel& ch, const Tensor& p_sx) {
  Tensor p = build_state_input_joint(ch, p_sx);
  RatePolytope r;
  r.id = BoundId::D_Region_T4;
  r.c_m = conditional_mutual_information(p, {iX}, {iY}, {iS});
  r.c_sum = r.c_m - conditional_mutual_information(p, {iX}, {iZ}, {iS}) +
            conditional_entropy(p, {iS}, {iZ});
  return r;
}

RatePolytope eval_outer_e(const WiretapChannel& ch, const Tensor& p_sx) {
  Tensor p = build_state_input_joint(ch, p_sx);
  RatePolytope r;
  r.id = BoundId::E_Outer_T5;
  r.c_m = conditional_mutual_information(p, {iX}, {iY}, {iS});
  r.c_sum = r.c_m - conditional_mutual_information(p, {iX}, {iZ}, {iS}) +
            conditional_entropy(p, {iS}, {iZ}) - conditional_entropy(p, {iS}, {iY});
  return r;
}

RatePolytope eval_bound(BoundId id, const JointSystem& j) {
  switch (id) {
    case BoundId::NC_Inner_T1: return eval_nc_inner(j);
    case BoundId::NC_ED_Region_T3: return eval_nc_ed(j);
    case BoundId::C_Case1:
    case BoundId::C_TypeI_Case2:
    case BoundId::C_Case2A:
    case BoundId::C_Case2B:
    case BoundId::C_TypeII_Case3: return eval_causal_case(id, j);
    case BoundId::C_ED_Cor4:
    case BoundId::C_ED_Cor5: return eval_causal_ed(id, j);
    case BoundId::StateRepro_Outer: return eval_state_repro_outer(j);
    case BoundId::D_Region_T4:
    case BoundId::E_Outer_T5:
      throw validation_error(to_string(id) + " takes a state-input design, not an aux scheme");
  }
  throw validation_error("eval_bound: bad id");
}

std::optional<double> scalar_projection(const RatePolytope& p, RateAxis axis) {
  if (axis == RateAxis::SM) {
    double v = std::min(p.c_m, p.c_sum);
    return v > 0.0 ? v : 0.0;
  }
  if (p.c_m < -sk_gate_tol) return std::nullopt;
  return p.c_sum > 0.0 ? p.c_sum : 0.0;
}

std::optional<double> scalar_projection_signed(const RatePolytope& p, RateAxis axis) {
  if (axis == RateAxis::SM) return std::min(p.c_m, p.c_sum);
  if (p.c_m < -sk_gate_tol) return std::nullopt;
  return p.c_sum;
}

std::pair<double, double> compare_sk_formulas(const JointSystem& j) {
  const Tensor& p = j.p;
  double with_u = conditional_mutual_information(p, {V}, {Y}, {S, U}) -
                  conditional_mutual_information(p, {V}, {Z}, {S, U}) +
                  conditional_entropy(p, {S}, {Z, U});
  double without_u = conditional_mutual_information(p, {V}, {Y}, {S}) -
                     conditional_mutual_information(p, {V}, {Z}, {S}) +
                     conditional_entropy(p, {S}, {Z});
  return {with_u, without_u};
}

}  // namespace wtsk
