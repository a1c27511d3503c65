#ifndef WTSK_CHANNEL_HPP
#define WTSK_CHANNEL_HPP

#include <string>

#include "wtsk/info.hpp"

namespace wtsk {

// Axis order of every six-way joint tensor built here.
namespace ax {
inline constexpr int S = 0;
inline constexpr int U = 1;
inline constexpr int V = 2;
inline constexpr int X = 3;
inline constexpr int Y = 4;
inline constexpr int Z = 5;
}  // namespace ax

// State-dependent broadcast channel p(y,z|s,x) with i.i.d. state.
struct WiretapChannel {
  int ns = 0, nx = 0, ny = 0, nz = 0;
  ProbVector state_dist;  // |S|
  Tensor kernel;          // shape {S,X,Y,Z}; each (s,x) row is a distribution

  double w(int s, int x, int y, int z) const {
    return kernel.at({s, x, y, z});
  }
  // Throws validation_error naming the offending row/entry.
  void validate(double tol = 1e-9) const;
};

// Auxiliary-variable scheme. Causal modes keep (U,V) independent of S; the
// composite variables of the causal constructions (V=(S,Vt), U=(S,Ut)) are
// never materialized here; bound evaluation reads them off the joint tensor,
// and expand_to_noncausal produces the enlarged-alphabet scheme when an
// explicit composite is needed (cross-checks, codebook simulation).
enum class AuxMode { NonCausal, Case1, Case2, Case2A, Case2B, Case3 };

std::string to_string(AuxMode m);
AuxMode aux_mode_from_string(const std::string& s);

struct AuxiliaryScheme {
  AuxMode mode = AuxMode::NonCausal;
  int nu = 1, nv = 1;
  // NonCausal: shape {S,U,V}, the full p_SUV (S-marginal must equal the
  // channel state distribution). Causal modes: shape {U,V}, the p_UV of the
  // S-independent pair.
  Tensor input;
  // shape {S,U,V,X}; rows are p(x|s,u,v)
  Tensor selector;

  void validate(const WiretapChannel& ch, double tol = 1e-9) const;
};

// Fully expanded joint p(s,u,v,x,y,z) plus the structure it came from.
struct JointSystem {
  Tensor p;  // shape {S,U,V,X,Y,Z}
  AuxMode mode = AuxMode::NonCausal;
  int ns = 0, nu = 0, nv = 0, nx = 0, ny = 0, nz = 0;
};

JointSystem build_joint(const WiretapChannel& ch, const AuxiliaryScheme& aux);

// Joint p(s,x,y,z) (shape {S,X,Y,Z}) for bounds whose designs are plain
// state-input distributions.
Tensor build_state_input_joint(const WiretapChannel& ch, const Tensor& p_sx);

// Rewrites a causal scheme as the equivalent correlated scheme on enlarged
// alphabets: case2/case2a embed the state into V (v' = s*nv + v), case2b sets
// V'=S, case3 embeds it into U (u' = s*nu + u). NonCausal schemes pass
// through unchanged.
AuxiliaryScheme expand_to_noncausal(const WiretapChannel& ch, const AuxiliaryScheme& aux);

// Degradedness of Eve's channel relative to Bob's, decided per state by a
// small linear feasibility problem over stochastic maps (residual tolerance
// 1e-7). Degraded means z can be produced from y; reversal swaps the roles.
enum class Degradedness { Degraded, ReverselyDegraded, Neither };

std::string to_string(Degradedness d);
Degradedness check_degraded(const WiretapChannel& ch, double tol = 1e-7);

// Reduction of imperfect/partial CSI to the perfect-CSI model: side_info is
// p(sa,sb,se|s) with shape {S,Sa,Sb,Se}. The reduced channel has state Sa,
// Bob output (Sb,Y) flattened as sb*ny+y, Eve output (Se,Z) as se*nz+z.
WiretapChannel transform_general_csi(const WiretapChannel& ch, const Tensor& side_info);

// Named instances: "fig5" (reversely degraded binary, state entropy
// 1-h(0.1)), "fig6" (degraded, singleton state), "fig7" or "fig7:<flip>"
// (reversely degraded family, state entropy 1-h(0.2), Bob flip parameter).
WiretapChannel builtin_example(const std::string& name);

// JSON I/O. Channel files: {"alphabets":{"S","X","Y","Z"},
// "state_dist":[...], "kernel":[s][x][y][z]}. Aux files: {"mode","U","V",
// "input_dist" ([u][v] causal, [s][u][v] noncausal), "selector":[s][u][v][x]}.
// Side-info files: {"Sa","Sb","Se","kernel":[s][sa][sb][se]}.
WiretapChannel load_channel(const std::string& path);
void save_channel(const WiretapChannel& ch, const std::string& path);
AuxiliaryScheme load_aux(const std::string& path);
void save_aux(const AuxiliaryScheme& aux, const std::string& path);
std::string aux_to_json(const AuxiliaryScheme& aux);
AuxiliaryScheme aux_from_json(const std::string& text);
Tensor load_side_info(const std::string& path, int ns);

}  // namespace wtsk

#endif
