#include "wtsk/region.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <set>
#include <thread>
#include <vector>

#include "wtsk/errors.hpp"
#include "wtsk/rng.hpp"

namespace wtsk {

namespace {

constexpr double kCover = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxMovesPerPass = 2048;

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double RegionFrontier::value_at(double rm) const {
  if (vertices.empty()) return 0.0;
  if (kind == FrontierKind::staircase) {
    bool covered = false;
    double best = 0.0;
    for (const auto& v : vertices) {
      if (v.rm >= rm - kCover) {
        covered = true;
        best = std::max(best, v.rk + (v.rm - rm));
      }
    }
    return covered ? clamp0(best) : 0.0;
  }
  // envelope: linear interpolation on the concave vertex chain
  if (rm <= vertices.front().rm + kCover) return vertices.front().rk;
  if (rm > vertices.back().rm + kCover) return 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    if (rm <= vertices[i].rm + kCover) {
      const auto& a = vertices[i - 1];
      const auto& b = vertices[i];
      double span = b.rm - a.rm;
      if (span <= kCover) return std::min(a.rk, b.rk);
      double t = (rm - a.rm) / span;
      return a.rk + t * (b.rk - a.rk);
    }
  }
  return 0.0;
}

double RegionFrontier::max_rm() const {
  return vertices.empty() ? 0.0 : vertices.back().rm;
}

RegionFrontier pareto_union(const std::vector<RatePolytope>& polys) {
  struct Cand {
    double m, b;
    std::size_t idx;
  };
  std::vector<Cand> cand;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    double b = polys[i].clamped_sum();
    if (b <= kCover) continue;
    cand.push_back({polys[i].max_rm(), b, i});
  }
  std::sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) {
    if (a.b != b.b) return a.b > b.b;
    if (a.m != b.m) return a.m > b.m;
    return a.idx < b.idx;
  });

  RegionFrontier f;
  f.kind = FrontierKind::staircase;
  double max_m = -1.0;
  std::vector<Cand> kept;
  for (const auto& c : cand) {
    if (kept.empty() || c.m > max_m + kCover) {
      kept.push_back(c);
      max_m = c.m;
    }
  }
  if (kept.empty()) {
    f.vertices.push_back({0.0, 0.0, -1});
    return f;
  }
  for (std::size_t k = 0; k < kept.size(); ++k) {
    int pi = static_cast<int>(f.polys.size());
    f.polys.push_back(polys[kept[k].idx]);
    if (k == 0) {
      f.vertices.push_back({0.0, kept[k].b, pi});
      if (kept[k].m > kCover)
        f.vertices.push_back({kept[k].m, kept[k].b - kept[k].m, pi});
    } else {
      f.vertices.push_back({kept[k].m, kept[k].b - kept[k].m, pi});
    }
  }
  return f;
}

RegionFrontier upper_concave_envelope(const RegionFrontier& f) {
  RegionFrontier out;
  out.kind = FrontierKind::envelope;
  out.polys = f.polys;
  if (f.vertices.empty()) {
    out.vertices.push_back({0.0, 0.0, -1});
    return out;
  }
  std::vector<FrontierVertex> hull;
  for (const auto& v : f.vertices) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      // keep b only if it lies strictly above the chord a -> v
      double cross = (v.rm - a.rm) * (b.rk - a.rk) - (v.rk - a.rk) * (b.rm - a.rm);
      if (cross <= 1e-15)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(v);
  }
  out.vertices = std::move(hull);
  return out;
}

bool frontier_dominates(const RegionFrontier& a, const RegionFrontier& b, double tol) {
  for (const auto& v : b.vertices) {
    if (a.value_at(v.rm) < v.rk - tol) return false;
  }
  return true;
}

double hausdorff_frontier_distance(const RegionFrontier& a, const RegionFrontier& b,
                                   int grid_points) {
  if (grid_points < 2) grid_points = 2;
  double maxr = std::max(a.max_rm(), b.max_rm());
  double worst = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    double r = maxr * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    worst = std::max(worst, std::abs(a.value_at(r) - b.value_at(r)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// design evaluation

namespace {

bool design_input_only(const Design& d) { return is_input_only(d.bound); }

int design_blockdim(const WiretapChannel& ch, const Design& d) {
  return design_input_only(d) ? ch.nx : d.nu * d.nv;
}

int design_nblocks(const WiretapChannel& ch, const Design& d) {
  if (design_input_only(d)) return ch.ns;
  return d.mode == AuxMode::NonCausal ? ch.ns : 1;
}

void normalize_block(std::vector<double>& w, std::size_t off, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += w[off + i];
  if (s <= 0.0) {
    for (std::size_t i = 0; i < len; ++i) w[off + i] = 1.0 / static_cast<double>(len);
    return;
  }
  for (std::size_t i = 0; i < len; ++i) w[off + i] /= s;
}

}  // namespace

AuxiliaryScheme design_to_aux(const WiretapChannel& ch, const Design& d) {
  if (design_input_only(d))
    throw validation_error("design for an input-only bound has no aux scheme");
  AuxiliaryScheme aux;
  aux.mode = d.mode;
  aux.nu = d.nu;
  aux.nv = d.nv;
  const int bd = d.nu * d.nv;
  if (d.mode == AuxMode::NonCausal) {
    aux.input = Tensor({ch.ns, d.nu, d.nv});
    for (int s = 0; s < ch.ns; ++s)
      for (int u = 0; u < d.nu; ++u)
        for (int v = 0; v < d.nv; ++v)
          aux.input.at({s, u, v}) = ch.state_dist[static_cast<std::size_t>(s)] *
                                    d.weights[static_cast<std::size_t>(s * bd + u * d.nv + v)];
  } else {
    aux.input = Tensor({d.nu, d.nv}, std::vector<double>(d.weights.begin(), d.weights.end()));
  }
  aux.selector = Tensor({ch.ns, d.nu, d.nv, ch.nx});
  if (!d.det_selector.empty()) {
    for (int s = 0; s < ch.ns; ++s)
      for (int u = 0; u < d.nu; ++u)
        for (int v = 0; v < d.nv; ++v) {
          int pos = (s * d.nu + u) * d.nv + v;
          aux.selector.at({s, u, v, d.det_selector[static_cast<std::size_t>(pos)]}) = 1.0;
        }
  } else {
    aux.selector = Tensor({ch.ns, d.nu, d.nv, ch.nx},
                          std::vector<double>(d.stoch_selector.begin(), d.stoch_selector.end()));
  }
  return aux;
}

Tensor design_to_psx(const WiretapChannel& ch, const Design& d) {
  if (!design_input_only(d))
    throw validation_error("design is not for an input-only bound");
  Tensor p({ch.ns, ch.nx});
  for (int s = 0; s < ch.ns; ++s)
    for (int x = 0; x < ch.nx; ++x)
      p.at({s, x}) = ch.state_dist[static_cast<std::size_t>(s)] *
                     d.weights[static_cast<std::size_t>(s * ch.nx + x)];
  return p;
}

RatePolytope evaluate_design(const WiretapChannel& ch, const Design& d) {
  if (design_input_only(d)) {
    Tensor psx = design_to_psx(ch, d);
    return d.bound == BoundId::D_Region_T4 ? eval_degraded_region(ch, psx)
                                           : eval_outer_e(ch, psx);
  }
  JointSystem j = build_joint(ch, design_to_aux(ch, d));
  return eval_bound(d.bound, j);
}

Design design_from_aux(const WiretapChannel& ch, BoundId bound, const AuxiliaryScheme& aux) {
  if (is_input_only(bound))
    throw validation_error("input-only bounds take p(s,x), not an aux scheme");
  Design d;
  d.bound = bound;
  d.mode = aux.mode;
  d.nu = aux.nu;
  d.nv = aux.nv;
  const int bd = aux.nu * aux.nv;
  if (aux.mode == AuxMode::NonCausal) {
    d.weights.resize(static_cast<std::size_t>(ch.ns * bd));
    for (int s = 0; s < ch.ns; ++s) {
      double ps = ch.state_dist[static_cast<std::size_t>(s)];
      std::size_t off = static_cast<std::size_t>(s * bd);
      for (int u = 0; u < aux.nu; ++u)
        for (int v = 0; v < aux.nv; ++v)
          d.weights[off + static_cast<std::size_t>(u * aux.nv + v)] =
              ps > support_eps ? aux.input.at({s, u, v}) / ps
                               : 1.0 / static_cast<double>(bd);
      normalize_block(d.weights, off, static_cast<std::size_t>(bd));
    }
  } else {
    d.weights.assign(aux.input.data().begin(), aux.input.data().end());
  }
  d.stoch_selector.assign(aux.selector.data().begin(), aux.selector.data().end());
  return d;
}

// ---------------------------------------------------------------------------
// search space plumbing

namespace {

AuxMode search_mode_for(BoundId id) {
  switch (id) {
    case BoundId::C_Case1:
    case BoundId::C_ED_Cor4:
    case BoundId::C_ED_Cor5: return AuxMode::Case1;
    case BoundId::C_TypeI_Case2: return AuxMode::Case2;
    case BoundId::C_Case2A: return AuxMode::Case2A;
    case BoundId::C_Case2B: return AuxMode::Case2B;
    case BoundId::C_TypeII_Case3: return AuxMode::Case3;
    default: return AuxMode::NonCausal;
  }
}

constexpr std::uint64_t kSat = 1000000000000000000ULL;  // 1e18 saturation

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

std::uint64_t binom_sat(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double acc = 1.0L;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(kSat)) return kSat;
  }
  return static_cast<std::uint64_t>(acc + 0.5L);
}

std::uint64_t comp_count(int total, int parts) { return binom_sat(total + parts - 1, parts - 1); }

// Writes `parts` weights summing to 1 for the rank-th composition of
// `total` grid steps. Requires comp_count to be exact (unsaturated).
void comp_unrank(int total, int parts, std::uint64_t rank, int resolution, double* out) {
  int remaining = total;
  for (int pos = 0; pos < parts - 1; ++pos) {
    int chosen = remaining;
    for (int p = 0; p <= remaining; ++p) {
      std::uint64_t c = comp_count(remaining - p, parts - pos - 1);
      if (rank < c) {
        chosen = p;
        break;
      }
      rank -= c;
    }
    out[pos] = static_cast<double>(chosen) / static_cast<double>(resolution);
    remaining -= chosen;
  }
  out[parts - 1] = static_cast<double>(remaining) / static_cast<double>(resolution);
}

std::vector<std::vector<int>> canonical_selectors(int ns, int nu, int nv, int nx) {
  std::vector<std::vector<int>> out;
  auto add_map = [&](auto&& f) {
    std::vector<int> m(static_cast<std::size_t>(ns * nu * nv));
    for (int s = 0; s < ns; ++s)
      for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v)
          m[static_cast<std::size_t>((s * nu + u) * nv + v)] = f(s, u, v) % nx;
    out.push_back(std::move(m));
  };
  add_map([](int, int, int v) { return v; });
  add_map([](int s, int, int v) { return v + s; });
  add_map([](int, int u, int v) { return v + u; });
  add_map([](int s, int u, int v) { return v + u + s; });
  add_map([](int, int u, int) { return u; });
  add_map([](int s, int u, int) { return u + s; });
  add_map([](int s, int, int) { return s; });
  for (int c = 0; c < nx; ++c) add_map([c](int, int, int) { return c; });
  return out;
}

struct Space {
  BoundId bound;
  AuxMode mode = AuxMode::NonCausal;
  bool input_only = false;
  int nu = 1, nv = 1;
  int nblocks = 1, blockdim = 1;
  std::vector<std::vector<int>> selectors;  // deterministic maps, possibly sampled
};

Space make_space(const WiretapChannel& ch, BoundId bound, const SearchConfig& cfg) {
  Space sp;
  sp.bound = bound;
  sp.input_only = is_input_only(bound);
  if (sp.input_only) {
    sp.nblocks = ch.ns;
    sp.blockdim = ch.nx;
    return sp;
  }
  sp.mode = search_mode_for(bound);
  auto sizes = search_aux_sizes(ch, bound, cfg);
  sp.nu = sizes.first;
  sp.nv = sizes.second;
  sp.nblocks = sp.mode == AuxMode::NonCausal ? ch.ns : 1;
  sp.blockdim = sp.nu * sp.nv;

  const int npos = ch.ns * sp.nu * sp.nv;
  std::uint64_t total = 1;
  for (int i = 0; i < npos; ++i) total = sat_mul(total, static_cast<std::uint64_t>(ch.nx));
  if (total <= cfg.det_selector_cap) {
    for (std::uint64_t k = 0; k < total; ++k) {
      std::vector<int> m(static_cast<std::size_t>(npos));
      std::uint64_t r = k;
      for (int pos = npos - 1; pos >= 0; --pos) {
        m[static_cast<std::size_t>(pos)] = static_cast<int>(r % static_cast<std::uint64_t>(ch.nx));
        r /= static_cast<std::uint64_t>(ch.nx);
      }
      sp.selectors.push_back(std::move(m));
    }
  } else {
    std::set<std::vector<int>> seen;
    for (auto& m : canonical_selectors(ch.ns, sp.nu, sp.nv, ch.nx))
      if (seen.insert(m).second) sp.selectors.push_back(m);
    SmallRng rng(substream_seed(cfg.seed, 0x5E1EC7ULL, 0));
    while (sp.selectors.size() < cfg.det_selector_cap) {
      std::vector<int> m(static_cast<std::size_t>(npos));
      for (auto& e : m) e = rng.below(ch.nx);
      if (seen.insert(m).second) sp.selectors.push_back(std::move(m));
    }
  }
  return sp;
}

double design_entropy(const Design& d) {
  double h = 0.0;
  for (double w : d.weights)
    if (w > support_eps) h -= w * std::log2(w);
  for (double w : d.stoch_selector)
    if (w > support_eps) h -= w * std::log2(w);
  return h;
}

Design uniform_design(const WiretapChannel& ch, const Space& sp, const std::vector<int>* sel) {
  Design d;
  d.bound = sp.bound;
  d.mode = sp.mode;
  d.nu = sp.nu;
  d.nv = sp.nv;
  d.weights.assign(static_cast<std::size_t>(sp.nblocks * sp.blockdim),
                   1.0 / static_cast<double>(sp.blockdim));
  if (!sp.input_only && sel) d.det_selector = *sel;
  (void)ch;
  return d;
}

// Accept-if-improve hill climb under an arbitrary polytope objective; every
// evaluated candidate is reported through `record`.
template <typename Objective, typename Record>
void refine_design(const WiretapChannel& ch, Design cur, RatePolytope cur_poly,
                   const SearchConfig& cfg, Objective&& objective, Record&& record,
                   long* evals) {
  double cur_val = objective(cur_poly);
  double cur_ent = design_entropy(cur);
  double step = 0.25;
  const int bd = design_blockdim(ch, cur);
  const int nb = design_nblocks(ch, cur);

  for (int iter = 0; iter < cfg.refine_iterations; ++iter) {
    bool improved = false;
    std::size_t moves_tried = 0;

    auto consider = [&](Design& cand) {
      if (moves_tried >= kMaxMovesPerPass) return;
      ++moves_tried;
      RatePolytope p = evaluate_design(ch, cand);
      ++*evals;
      record(p, cand);
      double val = objective(p);
      double ent = design_entropy(cand);
      if (val > cur_val + 1e-12 ||
          (val > cur_val - 1e-12 && ent < cur_ent - 1e-12)) {
        cur = cand;
        cur_poly = p;
        cur_val = val;
        cur_ent = ent;
        improved = true;
      }
    };

    for (int b = 0; b < nb && moves_tried < kMaxMovesPerPass; ++b) {
      std::size_t off = static_cast<std::size_t>(b) * static_cast<std::size_t>(bd);
      for (int i = 0; i < bd; ++i)
        for (int jj = 0; jj < bd; ++jj) {
          if (i == jj) continue;
          double avail = cur.weights[off + static_cast<std::size_t>(jj)];
          if (avail <= 1e-15) continue;
          double t = std::min(step, avail);
          Design cand = cur;
          cand.weights[off + static_cast<std::size_t>(i)] += t;
          cand.weights[off + static_cast<std::size_t>(jj)] -= t;
          normalize_block(cand.weights, off, static_cast<std::size_t>(bd));
          consider(cand);
          if (moves_tried >= kMaxMovesPerPass) break;
        }
    }
    if (!cur.det_selector.empty()) {
      for (std::size_t pos = 0; pos < cur.det_selector.size() && moves_tried < kMaxMovesPerPass;
           ++pos) {
        for (int x = 0; x < ch.nx; ++x) {
          if (x == cur.det_selector[pos]) continue;
          Design cand = cur;
          cand.det_selector[pos] = x;
          consider(cand);
          if (moves_tried >= kMaxMovesPerPass) break;
        }
      }
    } else if (!cur.stoch_selector.empty() && cfg.stochastic_selectors) {
      std::size_t rows = cur.stoch_selector.size() / static_cast<std::size_t>(ch.nx);
      for (std::size_t r = 0; r < rows && moves_tried < kMaxMovesPerPass; ++r) {
        std::size_t off = r * static_cast<std::size_t>(ch.nx);
        for (int i = 0; i < ch.nx; ++i)
          for (int jj = 0; jj < ch.nx; ++jj) {
            if (i == jj) continue;
            double avail = cur.stoch_selector[off + static_cast<std::size_t>(jj)];
            if (avail <= 1e-15) continue;
            double t = std::min(step, avail);
            Design cand = cur;
            cand.stoch_selector[off + static_cast<std::size_t>(i)] += t;
            cand.stoch_selector[off + static_cast<std::size_t>(jj)] -= t;
            normalize_block(cand.stoch_selector, off, static_cast<std::size_t>(ch.nx));
            consider(cand);
            if (moves_tried >= kMaxMovesPerPass) break;
          }
      }
    }

    if (!improved) {
      step *= 0.5;
      if (step < 1e-4) break;
    }
  }
}

struct PoolEntry {
  RatePolytope poly;
  Design design;
};

// Signed dominance: keeps gate-boundary designs (negative caps) alive so the
// scalar objectives can still read them off the pool.
bool pool_dominates(const RatePolytope& a, const RatePolytope& b) {
  return a.c_m >= b.c_m && a.c_sum >= b.c_sum;
}

void pool_add(std::vector<PoolEntry>& pool, const RatePolytope& p, const Design& d) {
  for (const auto& e : pool)
    if (pool_dominates(e.poly, p)) return;
  pool.erase(std::remove_if(pool.begin(), pool.end(),
                            [&](const PoolEntry& e) { return pool_dominates(p, e.poly); }),
             pool.end());
  pool.push_back({p, d});
}

double support_value(const RatePolytope& p, double cth, double sth) {
  double m = p.max_rm(), b = p.clamped_sum();
  double v = cth * m;
  v = std::max(v, cth * m + sth * (b - m));
  v = std::max(v, sth * b);
  return std::max(v, 0.0);
}

template <typename F>
void parallel_units(int n, int threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> ts;
  int nt = std::min(threads, n);
  ts.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) ts.emplace_back(worker);
  for (auto& t : ts) t.join();
}

Design random_design(const WiretapChannel& ch, const Space& sp, const SearchConfig& cfg,
                     SmallRng& rng, bool stochastic_sel) {
  Design d;
  d.bound = sp.bound;
  d.mode = sp.mode;
  d.nu = sp.nu;
  d.nv = sp.nv;
  d.weights.resize(static_cast<std::size_t>(sp.nblocks * sp.blockdim));
  for (int b = 0; b < sp.nblocks; ++b) {
    std::size_t off = static_cast<std::size_t>(b) * static_cast<std::size_t>(sp.blockdim);
    for (int i = 0; i < sp.blockdim; ++i)
      d.weights[off + static_cast<std::size_t>(i)] = -std::log(1.0 - rng.u01());
    normalize_block(d.weights, off, static_cast<std::size_t>(sp.blockdim));
  }
  if (!sp.input_only) {
    const int npos = ch.ns * sp.nu * sp.nv;
    if (stochastic_sel && cfg.stochastic_selectors) {
      d.stoch_selector.resize(static_cast<std::size_t>(npos * ch.nx));
      for (int r = 0; r < npos; ++r) {
        std::size_t off = static_cast<std::size_t>(r) * static_cast<std::size_t>(ch.nx);
        for (int x = 0; x < ch.nx; ++x)
          d.stoch_selector[off + static_cast<std::size_t>(x)] = -std::log(1.0 - rng.u01());
        normalize_block(d.stoch_selector, off, static_cast<std::size_t>(ch.nx));
      }
    } else {
      d.det_selector.resize(static_cast<std::size_t>(npos));
      for (auto& e : d.det_selector) e = rng.below(ch.nx);
    }
  }
  return d;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

std::pair<int, int> search_aux_sizes(const WiretapChannel& ch, BoundId id,
                                     const SearchConfig& cfg) {
  if (is_input_only(id)) return {1, 1};
  int cap_u = (ch.nx - 1) * ch.ns + 3;
  int cap_v = (ch.nx - 1) * (ch.nx - 1) * ch.ns * ch.ns + 3 * (ch.nx - 1) * ch.ns + 2;
  int u = cfg.max_u > 0 ? cfg.max_u : cap_u;
  int v = cfg.max_v > 0 ? cfg.max_v : cap_v;
  switch (id) {
    case BoundId::C_Case1:   // U is absorbable into V for this formula set
    case BoundId::C_Case2A:
    case BoundId::C_ED_Cor4: u = 1; break;
    case BoundId::C_Case2B:
    case BoundId::C_ED_Cor5: v = 1; break;
    default: break;
  }
  return {u, v};
}

namespace {

struct SearchState {
  std::vector<PoolEntry> pool;
  long evals = 0;
};

// Shared staged search: seeds + grid + restarts, then refinement runs driven
// by `objectives` (one refinement chain per objective). Every evaluation is
// recorded in the Pareto pool.
template <typename ObjectiveList>
SearchState staged_search(const WiretapChannel& ch, const Space& sp, const SearchConfig& cfg,
                          const std::vector<Design>& warm_start,
                          const ObjectiveList& objectives) {
  SearchState st;

  auto record_entry = [&](std::vector<PoolEntry>& pool, const RatePolytope& p, const Design& d) {
    pool_add(pool, p, d);
  };

  // seeds: warm starts, then uniform weights with every selector (or none)
  std::vector<Design> seeds = warm_start;
  if (sp.input_only) {
    seeds.push_back(uniform_design(ch, sp, nullptr));
  } else {
    for (const auto& sel : sp.selectors) seeds.push_back(uniform_design(ch, sp, &sel));
  }
  for (const auto& d : seeds) {
    RatePolytope p = evaluate_design(ch, d);
    ++st.evals;
    record_entry(st.pool, p, d);
  }

  // stratified grid, stride-subsampled to the budget
  {
    int res = cfg.grid_resolution;
    // unranking needs exact composition counts; coarsen huge blocks
    while (res > 1 && comp_count(res, sp.blockdim) >= kSat) --res;
    const std::uint64_t g = comp_count(res, sp.blockdim);  // per-block composition count
    std::uint64_t total_w = 1;
    for (int b = 0; b < sp.nblocks; ++b) total_w = sat_mul(total_w, g);
    std::uint64_t sel_count = sp.input_only ? 1 : static_cast<std::uint64_t>(sp.selectors.size());
    if (sel_count == 0) sel_count = 1;
    std::uint64_t total = sat_mul(total_w, sel_count);
    std::uint64_t budget = cfg.max_grid_designs == 0 ? 1 : cfg.max_grid_designs;
    std::uint64_t stride = total <= budget ? 1 : total / budget;
    while (stride > 1 && gcd_u64(stride, sel_count) != 1) ++stride;

    std::vector<std::uint64_t> ks;
    for (std::uint64_t k = 0; k < total; k += stride) ks.push_back(k);

    const int chunks = std::max(1, std::min<int>(cfg.threads * 8,
                                                 static_cast<int>(ks.size())));
    std::vector<std::vector<PoolEntry>> chunk_pools(static_cast<std::size_t>(chunks));
    std::vector<long> chunk_evals(static_cast<std::size_t>(chunks), 0);
    parallel_units(chunks, cfg.threads, [&](int c) {
      std::size_t lo = ks.size() * static_cast<std::size_t>(c) / static_cast<std::size_t>(chunks);
      std::size_t hi =
          ks.size() * (static_cast<std::size_t>(c) + 1) / static_cast<std::size_t>(chunks);
      for (std::size_t t = lo; t < hi; ++t) {
        std::uint64_t k = ks[t];
        std::uint64_t sel_idx = k % sel_count;
        std::uint64_t w_rank = k / sel_count;
        Design d;
        d.bound = sp.bound;
        d.mode = sp.mode;
        d.nu = sp.nu;
        d.nv = sp.nv;
        d.weights.resize(static_cast<std::size_t>(sp.nblocks * sp.blockdim));
        for (int b = 0; b < sp.nblocks; ++b) {
          std::uint64_t r = w_rank % g;
          w_rank /= g;
          comp_unrank(res, sp.blockdim, r, res,
                      d.weights.data() + static_cast<std::ptrdiff_t>(b) * sp.blockdim);
        }
        if (!sp.input_only) d.det_selector = sp.selectors[static_cast<std::size_t>(sel_idx)];
        RatePolytope p = evaluate_design(ch, d);
        ++chunk_evals[static_cast<std::size_t>(c)];
        record_entry(chunk_pools[static_cast<std::size_t>(c)], p, d);
      }
    });
    for (int c = 0; c < chunks; ++c) {
      st.evals += chunk_evals[static_cast<std::size_t>(c)];
      for (auto& e : chunk_pools[static_cast<std::size_t>(c)])
        pool_add(st.pool, e.poly, e.design);
    }
  }

  // random restarts
  if (cfg.random_restarts > 0) {
    const int n = cfg.random_restarts;
    std::vector<std::vector<PoolEntry>> unit_pools(static_cast<std::size_t>(n));
    std::vector<long> unit_evals(static_cast<std::size_t>(n), 0);
    parallel_units(n, cfg.threads, [&](int i) {
      SmallRng rng(substream_seed(cfg.seed, 0x0E57A27, static_cast<std::uint64_t>(i)));
      bool stoch = cfg.stochastic_selectors && (i % 2 == 1);
      Design d = random_design(ch, sp, cfg, rng, stoch);
      RatePolytope p = evaluate_design(ch, d);
      ++unit_evals[static_cast<std::size_t>(i)];
      record_entry(unit_pools[static_cast<std::size_t>(i)], p, d);
    });
    for (int i = 0; i < n; ++i) {
      st.evals += unit_evals[static_cast<std::size_t>(i)];
      for (auto& e : unit_pools[static_cast<std::size_t>(i)])
        pool_add(st.pool, e.poly, e.design);
    }
  }

  // refinement: one hill climb per objective, starting from the pool's best
  const int nobj = static_cast<int>(objectives.size());
  if (nobj > 0 && cfg.refine_iterations > 0 && !st.pool.empty()) {
    std::vector<std::vector<PoolEntry>> unit_pools(static_cast<std::size_t>(nobj));
    std::vector<long> unit_evals(static_cast<std::size_t>(nobj), 0);
    // snapshot starts before the parallel section so results cannot depend on
    // interleaving
    std::vector<std::size_t> start_idx(static_cast<std::size_t>(nobj), 0);
    for (int o = 0; o < nobj; ++o) {
      double best = kNegInf;
      for (std::size_t i = 0; i < st.pool.size(); ++i) {
        double v = objectives[static_cast<std::size_t>(o)](st.pool[i].poly);
        if (v > best) {
          best = v;
          start_idx[static_cast<std::size_t>(o)] = i;
        }
      }
    }
    parallel_units(nobj, cfg.threads, [&](int o) {
      const PoolEntry& start = st.pool[start_idx[static_cast<std::size_t>(o)]];
      refine_design(
          ch, start.design, start.poly, cfg, objectives[static_cast<std::size_t>(o)],
          [&](const RatePolytope& p, const Design& d) {
            record_entry(unit_pools[static_cast<std::size_t>(o)], p, d);
          },
          &unit_evals[static_cast<std::size_t>(o)]);
    });
    for (int o = 0; o < nobj; ++o) {
      st.evals += unit_evals[static_cast<std::size_t>(o)];
      for (auto& e : unit_pools[static_cast<std::size_t>(o)])
        pool_add(st.pool, e.poly, e.design);
    }
  }

  return st;
}

}  // namespace

namespace {

void check_warm(BoundId bound, const std::vector<Design>& warm) {
  for (const auto& d : warm)
    if (d.bound != bound)
      throw validation_error("warm-start design targets a different bound");
}

void check_config(const SearchConfig& cfg) {
  if (cfg.grid_resolution < 2) throw validation_error("grid_resolution must be >= 2");
  if (cfg.random_restarts < 0) throw validation_error("random_restarts must be >= 0");
  if (cfg.refine_iterations < 0) throw validation_error("refine_iterations must be >= 0");
  if (cfg.directions < 1) throw validation_error("directions must be >= 1");
  if (cfg.max_grid_designs < 1) throw validation_error("max_grid_designs must be >= 1");
  if (cfg.threads < 1) throw validation_error("threads must be >= 1");
  if (cfg.max_u < 0 || cfg.max_v < 0) throw validation_error("aux caps must be >= 0");
}

}  // namespace

RegionResult optimize_region(const WiretapChannel& ch, BoundId bound, const SearchConfig& cfg,
                             const std::vector<Design>& warm_start) {
  ch.validate();
  check_config(cfg);
  check_warm(bound, warm_start);
  Space sp = make_space(ch, bound, cfg);

  std::vector<std::function<double(const RatePolytope&)>> objectives;
  int ndir = std::max(2, cfg.directions);
  for (int d = 0; d < ndir; ++d) {
    double theta = (3.14159265358979323846 / 2.0) * static_cast<double>(d) /
                   static_cast<double>(ndir - 1);
    double cth = std::cos(theta), sth = std::sin(theta);
    objectives.emplace_back(
        [cth, sth](const RatePolytope& p) { return support_value(p, cth, sth); });
  }

  SearchState st = staged_search(ch, sp, cfg, warm_start, objectives);

  RegionResult res;
  res.used_u = sp.nu;
  res.used_v = sp.nv;
  res.evaluations = st.evals;
  std::vector<RatePolytope> polys;
  polys.reserve(st.pool.size());
  for (std::size_t i = 0; i < st.pool.size(); ++i) {
    RatePolytope p = st.pool[i].poly;
    p.design_ref = static_cast<int>(i);
    polys.push_back(p);
    res.designs.push_back(st.pool[i].design);
  }
  res.frontier = pareto_union(polys);
  if (cfg.hull) res.hulled = upper_concave_envelope(res.frontier);
  return res;
}

namespace {

double scalar_value_of(const RatePolytope& p, ScalarObjective o) {
  switch (o) {
    case ScalarObjective::SM: return clamp0(std::min(p.c_m, p.c_sum));
    case ScalarObjective::SK:
      return p.c_m < -sk_gate_tol ? (-1e6 + p.c_m) : clamp0(p.c_sum);
    case ScalarObjective::SKSigned:
      return p.c_m < -sk_gate_tol ? (-1e6 + p.c_m) : p.c_sum;
    case ScalarObjective::GP: return p.c_m;
  }
  return kNegInf;
}

bool scalar_feasible_of(const RatePolytope& p, ScalarObjective o) {
  if (o == ScalarObjective::SK || o == ScalarObjective::SKSigned)
    return p.c_m >= -sk_gate_tol;
  return true;
}

}  // namespace

ScalarResult optimize_scalar(const WiretapChannel& ch, BoundId bound, ScalarObjective obj,
                             const SearchConfig& cfg, const std::vector<Design>& warm_start) {
  ch.validate();
  check_config(cfg);
  check_warm(bound, warm_start);
  if (obj == ScalarObjective::GP && bound != BoundId::NC_Inner_T1)
    throw validation_error("the GP objective applies to NC_Inner_T1 only");
  Space sp = make_space(ch, bound, cfg);

  ScalarResult best;
  best.value = kNegInf;
  double best_ent = 0.0;

  std::vector<std::function<double(const RatePolytope&)>> objectives;
  objectives.emplace_back([obj](const RatePolytope& p) { return scalar_value_of(p, obj); });

  // The pool keeps signed Pareto survivors, so the best feasible design for
  // any of these objectives is still present after pruning.
  SearchState st = staged_search(ch, sp, cfg, warm_start, objectives);
  for (const auto& e : st.pool) {
    double v = scalar_value_of(e.poly, obj);
    double ent = design_entropy(e.design);
    bool feas = scalar_feasible_of(e.poly, obj);
    if (!feas) continue;
    if (v > best.value + 1e-12 ||
        (v > best.value - 1e-12 && (!best.feasible || ent < best_ent - 1e-12))) {
      best.value = v;
      best.design = e.design;
      best.feasible = true;
      best_ent = ent;
    }
  }
  best.evaluations = st.evals;
  if (!best.feasible) best.value = 0.0;
  return best;
}

}  // namespace wtsk
