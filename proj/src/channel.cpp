#include "wtsk/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wtsk/errors.hpp"

namespace wtsk {

void WiretapChannel::validate(double tol) const {
  if (ns <= 0 || nx <= 0 || ny <= 0 || nz <= 0)
    throw validation_error("channel alphabets must be positive");
  if (static_cast<int>(state_dist.size()) != ns)
    throw validation_error("state_dist length does not match |S|");
  double mass = 0.0;
  for (int s = 0; s < ns; ++s) {
    if (state_dist[static_cast<std::size_t>(s)] < -1e-12)
      throw validation_error("state_dist has a negative entry at s=" + std::to_string(s));
    mass += state_dist[static_cast<std::size_t>(s)];
  }
  if (std::abs(mass - 1.0) > tol)
    throw validation_error("state_dist does not sum to 1");
  if (kernel.shape() != std::vector<int>{ns, nx, ny, nz})
    throw validation_error("kernel shape does not match alphabets");
  for (int s = 0; s < ns; ++s) {
    for (int x = 0; x < nx; ++x) {
      double row = 0.0;
      for (int y = 0; y < ny; ++y) {
        for (int z = 0; z < nz; ++z) {
          double v = kernel.at({s, x, y, z});
          if (v < -1e-12)
            throw validation_error("kernel has a negative entry in row (s=" +
                                   std::to_string(s) + ", x=" + std::to_string(x) + ")");
          row += v;
        }
      }
      if (std::abs(row - 1.0) > tol)
        throw validation_error("kernel row (s=" + std::to_string(s) + ", x=" +
                               std::to_string(x) + ") sums to " + std::to_string(row) +
                               ", not 1");
    }
  }
}

std::string to_string(AuxMode m) {
  switch (m) {
    case AuxMode::NonCausal: return "noncausal";
    case AuxMode::Case1: return "case1";
    case AuxMode::Case2: return "case2";
    case AuxMode::Case2A: return "case2a";
    case AuxMode::Case2B: return "case2b";
    case AuxMode::Case3: return "case3";
  }
  return "?";
}

AuxMode aux_mode_from_string(const std::string& s) {
  if (s == "noncausal") return AuxMode::NonCausal;
  if (s == "case1") return AuxMode::Case1;
  if (s == "case2") return AuxMode::Case2;
  if (s == "case2a") return AuxMode::Case2A;
  if (s == "case2b") return AuxMode::Case2B;
  if (s == "case3") return AuxMode::Case3;
  throw validation_error("unknown aux mode: " + s);
}

void AuxiliaryScheme::validate(const WiretapChannel& ch, double tol) const {
  if (nu <= 0 || nv <= 0)
    throw validation_error("aux alphabets must be positive");
  if (mode == AuxMode::Case2A && nu != 1)
    throw validation_error("case2a requires |U| = 1");
  if (mode == AuxMode::Case2B && nv != 1)
    throw validation_error("case2b requires |V| = 1");
  if (mode == AuxMode::NonCausal) {
    if (input.shape() != std::vector<int>{ch.ns, nu, nv})
      throw validation_error("noncausal input_dist must have shape (S,U,V)");
    input.validate_distribution(tol);
    Tensor ps = input.marginal({0});
    for (int s = 0; s < ch.ns; ++s) {
      if (std::abs(ps[static_cast<std::size_t>(s)] -
                   ch.state_dist[static_cast<std::size_t>(s)]) > 1e-9)
        throw validation_error("noncausal input_dist S-marginal differs from state_dist at s=" +
                               std::to_string(s));
    }
  } else {
    if (input.shape() != std::vector<int>{nu, nv})
      throw validation_error("causal input_dist must have shape (U,V)");
    input.validate_distribution(tol);
  }
  if (selector.shape() != std::vector<int>{ch.ns, nu, nv, ch.nx})
    throw validation_error("selector must have shape (S,U,V,X)");
  for (int s = 0; s < ch.ns; ++s)
    for (int u = 0; u < nu; ++u)
      for (int v = 0; v < nv; ++v) {
        double row = 0.0;
        for (int x = 0; x < ch.nx; ++x) {
          double val = selector.at({s, u, v, x});
          if (val < -1e-12)
            throw validation_error("selector has a negative entry in row (s,u,v)=(" +
                                   std::to_string(s) + "," + std::to_string(u) + "," +
                                   std::to_string(v) + ")");
          row += val;
        }
        if (std::abs(row - 1.0) > tol)
          throw validation_error("selector row (s,u,v)=(" + std::to_string(s) + "," +
                                 std::to_string(u) + "," + std::to_string(v) +
                                 ") does not sum to 1");
      }
}

JointSystem build_joint(const WiretapChannel& ch, const AuxiliaryScheme& aux) {
  ch.validate();
  aux.validate(ch);
  JointSystem j;
  j.mode = aux.mode;
  j.ns = ch.ns;
  j.nu = aux.nu;
  j.nv = aux.nv;
  j.nx = ch.nx;
  j.ny = ch.ny;
  j.nz = ch.nz;
  j.p = Tensor({ch.ns, aux.nu, aux.nv, ch.nx, ch.ny, ch.nz});
  const bool causal = aux.mode != AuxMode::NonCausal;
  for (int s = 0; s < ch.ns; ++s)
    for (int u = 0; u < aux.nu; ++u)
      for (int v = 0; v < aux.nv; ++v) {
        double in = causal ? ch.state_dist[static_cast<std::size_t>(s)] * aux.input.at({u, v})
                           : aux.input.at({s, u, v});
        if (in <= support_eps) continue;
        for (int x = 0; x < ch.nx; ++x) {
          double px = aux.selector.at({s, u, v, x});
          if (px <= support_eps) continue;
          for (int y = 0; y < ch.ny; ++y)
            for (int z = 0; z < ch.nz; ++z)
              j.p.at({s, u, v, x, y, z}) = in * px * ch.w(s, x, y, z);
        }
      }
  return j;
}

Tensor build_state_input_joint(const WiretapChannel& ch, const Tensor& p_sx) {
  ch.validate();
  if (p_sx.shape() != std::vector<int>{ch.ns, ch.nx})
    throw validation_error("state-input distribution must have shape (S,X)");
  p_sx.validate_distribution();
  Tensor out({ch.ns, ch.nx, ch.ny, ch.nz});
  for (int s = 0; s < ch.ns; ++s)
    for (int x = 0; x < ch.nx; ++x) {
      double in = p_sx.at({s, x});
      if (in <= support_eps) continue;
      for (int y = 0; y < ch.ny; ++y)
        for (int z = 0; z < ch.nz; ++z)
          out.at({s, x, y, z}) = in * ch.w(s, x, y, z);
    }
  return out;
}

AuxiliaryScheme expand_to_noncausal(const WiretapChannel& ch, const AuxiliaryScheme& aux) {
  aux.validate(ch);
  if (aux.mode == AuxMode::NonCausal) return aux;

  AuxiliaryScheme out;
  out.mode = AuxMode::NonCausal;
  const int ns = ch.ns;
  const auto ws = [&](int s) { return ch.state_dist[static_cast<std::size_t>(s)]; };

  switch (aux.mode) {
    case AuxMode::Case1: {
      out.nu = aux.nu;
      out.nv = aux.nv;
      out.input = Tensor({ns, out.nu, out.nv});
      out.selector = aux.selector;
      for (int s = 0; s < ns; ++s)
        for (int u = 0; u < out.nu; ++u)
          for (int v = 0; v < out.nv; ++v)
            out.input.at({s, u, v}) = ws(s) * aux.input.at({u, v});
      break;
    }
    case AuxMode::Case2:
    case AuxMode::Case2A: {
      // V' = (S,V), flattened v' = s'*nv + v; only s'=s carries mass.
      out.nu = aux.nu;
      out.nv = ns * aux.nv;
      out.input = Tensor({ns, out.nu, out.nv});
      out.selector = Tensor({ns, out.nu, out.nv, ch.nx});
      for (int s = 0; s < ns; ++s)
        for (int u = 0; u < out.nu; ++u)
          for (int sp = 0; sp < ns; ++sp)
            for (int v = 0; v < aux.nv; ++v) {
              int vp = sp * aux.nv + v;
              if (sp == s)
                out.input.at({s, u, vp}) = ws(s) * aux.input.at({u, v});
              for (int x = 0; x < ch.nx; ++x)
                out.selector.at({s, u, vp, x}) = aux.selector.at({s, u, v, x});
            }
      break;
    }
    case AuxMode::Case2B: {
      // V' = S.
      out.nu = aux.nu;
      out.nv = ns;
      out.input = Tensor({ns, out.nu, out.nv});
      out.selector = Tensor({ns, out.nu, out.nv, ch.nx});
      for (int s = 0; s < ns; ++s)
        for (int u = 0; u < out.nu; ++u)
          for (int sp = 0; sp < ns; ++sp) {
            if (sp == s) out.input.at({s, u, sp}) = ws(s) * aux.input.at({u, 0});
            for (int x = 0; x < ch.nx; ++x)
              out.selector.at({s, u, sp, x}) = aux.selector.at({s, u, 0, x});
          }
      break;
    }
    case AuxMode::Case3: {
      // U' = (S,U), flattened u' = s'*nu + u.
      out.nu = ns * aux.nu;
      out.nv = aux.nv;
      out.input = Tensor({ns, out.nu, out.nv});
      out.selector = Tensor({ns, out.nu, out.nv, ch.nx});
      for (int s = 0; s < ns; ++s)
        for (int sp = 0; sp < ns; ++sp)
          for (int u = 0; u < aux.nu; ++u) {
            int up = sp * aux.nu + u;
            for (int v = 0; v < aux.nv; ++v) {
              if (sp == s) out.input.at({s, up, v}) = ws(s) * aux.input.at({u, v});
              for (int x = 0; x < ch.nx; ++x)
                out.selector.at({s, up, v, x}) = aux.selector.at({s, u, v, x});
            }
          }
      break;
    }
    case AuxMode::NonCausal:
      break;
  }
  out.validate(ch);
  return out;
}

namespace {

// Phase-1 simplex for feasibility of A q = b, q >= 0 (dense, tiny systems).
// Returns the minimized sum of artificials; ~0 means feasible.
double phase1_feasibility(const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b, std::vector<double>* q_out) {
  const int m = static_cast<int>(a.size());
  const int n = m > 0 ? static_cast<int>(a[0].size()) : 0;
  const double tol = 1e-11;

  // tableau rows: m constraints + objective; columns: n vars, m artificials, rhs
  std::vector<std::vector<double>> t(static_cast<std::size_t>(m + 1),
                                     std::vector<double>(static_cast<std::size_t>(n + m + 1), 0.0));
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double sign = b[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
    for (int jc = 0; jc < n; ++jc)
      t[static_cast<std::size_t>(i)][static_cast<std::size_t>(jc)] =
          sign * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jc)];
    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + i)] = 1.0;
    t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + m)] =
        sign * b[static_cast<std::size_t>(i)];
    basis[static_cast<std::size_t>(i)] = n + i;
  }
  // objective row: reduced costs for minimizing the artificial sum
  for (int jc = 0; jc <= n + m; ++jc) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += t[static_cast<std::size_t>(i)][static_cast<std::size_t>(jc)];
    double c = (jc >= n && jc < n + m) ? 1.0 : 0.0;
    t[static_cast<std::size_t>(m)][static_cast<std::size_t>(jc)] = c - s;
  }

  const int max_iters = 200 * (n + m + 4);
  for (int it = 0; it < max_iters; ++it) {
    // Bland's rule: smallest column index with negative reduced cost.
    int enter = -1;
    for (int jc = 0; jc < n + m; ++jc) {
      if (t[static_cast<std::size_t>(m)][static_cast<std::size_t>(jc)] < -tol) {
        enter = jc;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      double aij = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (aij > tol) {
        double ratio = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + m)] / aij;
        if (leave < 0 || ratio < best - tol ||
            (ratio < best + tol && basis[static_cast<std::size_t>(i)] <
                                       basis[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded: cannot happen for phase 1
    // pivot
    double piv = t[static_cast<std::size_t>(leave)][static_cast<std::size_t>(enter)];
    for (int jc = 0; jc <= n + m; ++jc)
      t[static_cast<std::size_t>(leave)][static_cast<std::size_t>(jc)] /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
      if (f == 0.0) continue;
      for (int jc = 0; jc <= n + m; ++jc)
        t[static_cast<std::size_t>(i)][static_cast<std::size_t>(jc)] -=
            f * t[static_cast<std::size_t>(leave)][static_cast<std::size_t>(jc)];
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  double art = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] >= n)
      art += t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + m)];
  if (q_out) {
    q_out->assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<std::size_t>(i)] < n)
        (*q_out)[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
            t[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + m)];
  }
  return art;
}

// Is there, for every s, a stochastic map Q(b|a) with sum_a Wa(a|s,x) Q(b|a)
// = Wb(b|s,x)? Wa/Wb are the (s,x)-indexed output kernels.
bool stochastic_map_exists(int ns, int nx, int na, int nb,
                           const std::vector<double>& wa, const std::vector<double>& wb,
                           double tol) {
  auto ia = [&](int s, int x, int a) { return (s * nx + x) * na + a; };
  auto ib = [&](int s, int x, int b) { return (s * nx + x) * nb + b; };
  for (int s = 0; s < ns; ++s) {
    const int nvar = na * nb;  // q[a*nb + b]
    std::vector<std::vector<double>> mat;
    std::vector<double> rhs;
    for (int x = 0; x < nx; ++x)
      for (int b = 0; b < nb; ++b) {
        std::vector<double> row(static_cast<std::size_t>(nvar), 0.0);
        for (int a = 0; a < na; ++a)
          row[static_cast<std::size_t>(a * nb + b)] = wa[static_cast<std::size_t>(ia(s, x, a))];
        mat.push_back(std::move(row));
        rhs.push_back(wb[static_cast<std::size_t>(ib(s, x, b))]);
      }
    for (int a = 0; a < na; ++a) {
      std::vector<double> row(static_cast<std::size_t>(nvar), 0.0);
      for (int b = 0; b < nb; ++b) row[static_cast<std::size_t>(a * nb + b)] = 1.0;
      mat.push_back(std::move(row));
      rhs.push_back(1.0);
    }
    std::vector<double> q;
    phase1_feasibility(mat, rhs, &q);
    // Certify with the recovered map rather than trusting the LP objective.
    double worst = 0.0;
    for (int x = 0; x < nx; ++x)
      for (int b = 0; b < nb; ++b) {
        double lhs = 0.0;
        for (int a = 0; a < na; ++a)
          lhs += wa[static_cast<std::size_t>(ia(s, x, a))] * q[static_cast<std::size_t>(a * nb + b)];
        worst = std::max(worst, std::abs(lhs - wb[static_cast<std::size_t>(ib(s, x, b))]));
      }
    for (int a = 0; a < na; ++a) {
      double rowsum = 0.0;
      for (int b = 0; b < nb; ++b) {
        double v = q[static_cast<std::size_t>(a * nb + b)];
        worst = std::max(worst, std::max(0.0, -v));
        rowsum += v;
      }
      worst = std::max(worst, std::abs(rowsum - 1.0));
    }
    if (worst > tol) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Degradedness d) {
  switch (d) {
    case Degradedness::Degraded: return "degraded";
    case Degradedness::ReverselyDegraded: return "reversely-degraded";
    case Degradedness::Neither: return "neither";
  }
  return "?";
}

Degradedness check_degraded(const WiretapChannel& ch, double tol) {
  ch.validate();
  // Marginal kernels W(y|s,x) and W(z|s,x).
  std::vector<double> wy(static_cast<std::size_t>(ch.ns * ch.nx * ch.ny), 0.0);
  std::vector<double> wz(static_cast<std::size_t>(ch.ns * ch.nx * ch.nz), 0.0);
  for (int s = 0; s < ch.ns; ++s)
    for (int x = 0; x < ch.nx; ++x)
      for (int y = 0; y < ch.ny; ++y)
        for (int z = 0; z < ch.nz; ++z) {
          double v = ch.w(s, x, y, z);
          wy[static_cast<std::size_t>((s * ch.nx + x) * ch.ny + y)] += v;
          wz[static_cast<std::size_t>((s * ch.nx + x) * ch.nz + z)] += v;
        }
  if (stochastic_map_exists(ch.ns, ch.nx, ch.ny, ch.nz, wy, wz, tol))
    return Degradedness::Degraded;
  if (stochastic_map_exists(ch.ns, ch.nx, ch.nz, ch.ny, wz, wy, tol))
    return Degradedness::ReverselyDegraded;
  return Degradedness::Neither;
}

WiretapChannel transform_general_csi(const WiretapChannel& ch, const Tensor& side_info) {
  ch.validate();
  if (side_info.rank() != 4 || side_info.dim(0) != ch.ns)
    throw validation_error("side_info must have shape (S,Sa,Sb,Se)");
  const int nsa = side_info.dim(1), nsb = side_info.dim(2), nse = side_info.dim(3);
  for (int s = 0; s < ch.ns; ++s) {
    double row = 0.0;
    for (int a = 0; a < nsa; ++a)
      for (int b = 0; b < nsb; ++b)
        for (int e = 0; e < nse; ++e) {
          double v = side_info.at({s, a, b, e});
          if (v < -1e-12)
            throw validation_error("side_info has a negative entry in row s=" + std::to_string(s));
          row += v;
        }
    if (std::abs(row - 1.0) > 1e-9)
      throw validation_error("side_info row s=" + std::to_string(s) + " does not sum to 1");
  }

  WiretapChannel out;
  out.ns = nsa;
  out.nx = ch.nx;
  out.ny = nsb * ch.ny;
  out.nz = nse * ch.nz;
  out.state_dist.assign(static_cast<std::size_t>(nsa), 0.0);
  for (int s = 0; s < ch.ns; ++s)
    for (int a = 0; a < nsa; ++a)
      for (int b = 0; b < nsb; ++b)
        for (int e = 0; e < nse; ++e)
          out.state_dist[static_cast<std::size_t>(a)] +=
              ch.state_dist[static_cast<std::size_t>(s)] * side_info.at({s, a, b, e});

  out.kernel = Tensor({out.ns, out.nx, out.ny, out.nz});
  for (int a = 0; a < nsa; ++a) {
    double pa = out.state_dist[static_cast<std::size_t>(a)];
    if (pa <= support_eps) {
      // Unreachable reduced state: keep its rows stochastic with a uniform fill.
      double fill = 1.0 / (static_cast<double>(out.ny) * static_cast<double>(out.nz));
      for (int x = 0; x < out.nx; ++x)
        for (int yy = 0; yy < out.ny; ++yy)
          for (int zz = 0; zz < out.nz; ++zz) out.kernel.at({a, x, yy, zz}) = fill;
      continue;
    }
    for (int s = 0; s < ch.ns; ++s)
      for (int b = 0; b < nsb; ++b)
        for (int e = 0; e < nse; ++e) {
          double post = ch.state_dist[static_cast<std::size_t>(s)] *
                        side_info.at({s, a, b, e}) / pa;  // p(s,sb,se|sa)
          if (post <= support_eps) continue;
          for (int x = 0; x < out.nx; ++x)
            for (int y = 0; y < ch.ny; ++y)
              for (int z = 0; z < ch.nz; ++z)
                out.kernel.at({a, x, b * ch.ny + y, e * ch.nz + z}) +=
                    post * ch.w(s, x, y, z);
        }
  }
  out.validate();
  return out;
}

namespace {

WiretapChannel reversely_degraded_family(double state_entropy, double flip) {
  if (!(flip >= 0.0 && flip <= 0.5))
    throw validation_error("flip parameter must be in [0, 0.5]");
  WiretapChannel ch;
  ch.ns = 2;
  ch.nx = ch.ny = ch.nz = 2;
  double p = binary_entropy_inverse(state_entropy);
  ch.state_dist = {p, 1.0 - p};
  ch.kernel = Tensor({2, 2, 2, 2});
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double by = (y == x) ? 1.0 - flip : flip;
        ch.kernel.at({s, x, y, x}) = by;  // z = x noiselessly
      }
  return ch;
}

}  // namespace

WiretapChannel builtin_example(const std::string& name) {
  std::string base = name;
  std::string param;
  if (auto pos = name.find(':'); pos != std::string::npos) {
    base = name.substr(0, pos);
    param = name.substr(pos + 1);
  }
  if (base == "fig5") {
    if (!param.empty()) throw validation_error("fig5 takes no parameter");
    return reversely_degraded_family(1.0 - binary_entropy(0.1), 0.1);
  }
  if (base == "fig6") {
    if (!param.empty()) throw validation_error("fig6 takes no parameter");
    WiretapChannel ch;
    ch.ns = 1;
    ch.nx = ch.ny = ch.nz = 2;
    ch.state_dist = {1.0};
    ch.kernel = Tensor({1, 2, 2, 2});
    for (int x = 0; x < 2; ++x)
      for (int z = 0; z < 2; ++z)
        ch.kernel.at({0, x, x, z}) = (z == x) ? 0.9 : 0.1;  // y = x, z = flip(y)
    return ch;
  }
  if (base == "fig7") {
    double flip = 0.1;
    if (!param.empty()) {
      try {
        flip = std::stod(param);
      } catch (const std::exception&) {
        throw validation_error("fig7 flip parameter is not a number: " + param);
      }
    }
    return reversely_degraded_family(1.0 - binary_entropy(0.2), flip);
  }
  throw validation_error("unknown builtin channel: " + name);
}

}  // namespace wtsk
