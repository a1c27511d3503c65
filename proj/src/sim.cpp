#include "wtsk/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "wtsk/errors.hpp"
#include "wtsk/info.hpp"
#include "wtsk/rng.hpp"

namespace wtsk {

namespace {

constexpr std::uint64_t kStageCodebook = 0xC0DEB001ULL;
constexpr std::uint64_t kStageEncode = 0xE4C0DE02ULL;
constexpr std::uint64_t kStageCausal = 0xCA05A103ULL;
constexpr std::uint64_t kStageChannel = 0xC4A77E04ULL;
constexpr std::uint64_t kStageTrial = 0x77121A05ULL;
constexpr std::uint64_t kStageCover = 0x050F7C06ULL;

double plog2(double p) { return p > support_eps ? std::log2(p) : 0.0; }

// Per-symbol conditionals pulled out of the joint once.
struct SimModel {
  int ns = 1, nu = 1, nv = 1, nx = 1, ny = 1, nz = 1;
  std::vector<double> p_s;           // [s]
  std::vector<double> p_u;           // [u]
  std::vector<double> p_v_given_u;   // [u*nv + v]
  std::vector<double> w_s_given_uv;  // [(u*nv + v)*ns + s]
  std::vector<double> selector;      // [((s*nu + u)*nv + v)*nx + x]
  std::vector<double> p_uvy;         // [(u*nv + v)*ny + y], joint
};

SimModel make_model(const JointSystem& j) {
  SimModel md;
  md.ns = j.ns;
  md.nu = j.nu;
  md.nv = j.nv;
  md.nx = j.nx;
  md.ny = j.ny;
  md.nz = j.nz;
  Tensor p_s = j.p.marginal({ax::S});
  Tensor p_u = j.p.marginal({ax::U});
  Tensor p_uv = j.p.marginal({ax::U, ax::V});
  Tensor p_suv = j.p.marginal({ax::S, ax::U, ax::V});
  Tensor p_suvx = j.p.marginal({ax::S, ax::U, ax::V, ax::X});
  Tensor p_uvy = j.p.marginal({ax::U, ax::V, ax::Y});
  md.p_s.assign(p_s.data().begin(), p_s.data().end());
  md.p_u.assign(p_u.data().begin(), p_u.data().end());

  md.p_v_given_u.assign(static_cast<std::size_t>(j.nu * j.nv), 0.0);
  for (int u = 0; u < j.nu; ++u) {
    double pu = p_u.at({u});
    for (int v = 0; v < j.nv; ++v)
      md.p_v_given_u[static_cast<std::size_t>(u * j.nv + v)] =
          pu > support_eps ? p_uv.at({u, v}) / pu : (v == 0 ? 1.0 : 0.0);
  }
  md.w_s_given_uv.assign(static_cast<std::size_t>(j.nu * j.nv * j.ns), 0.0);
  for (int u = 0; u < j.nu; ++u)
    for (int v = 0; v < j.nv; ++v) {
      double puv = p_uv.at({u, v});
      for (int s = 0; s < j.ns; ++s)
        md.w_s_given_uv[static_cast<std::size_t>((u * j.nv + v) * j.ns + s)] =
            puv > support_eps ? p_suv.at({s, u, v}) / puv
                              : md.p_s[static_cast<std::size_t>(s)];
    }
  md.selector.assign(static_cast<std::size_t>(j.ns * j.nu * j.nv * j.nx), 0.0);
  for (int s = 0; s < j.ns; ++s)
    for (int u = 0; u < j.nu; ++u)
      for (int v = 0; v < j.nv; ++v) {
        double mass = p_suv.at({s, u, v});
        std::size_t row = static_cast<std::size_t>(((s * j.nu + u) * j.nv + v) * j.nx);
        for (int x = 0; x < j.nx; ++x)
          md.selector[row + static_cast<std::size_t>(x)] =
              mass > support_eps ? p_suvx.at({s, u, v, x}) / mass
                                 : 1.0 / static_cast<double>(j.nx);  // unreachable row
      }
  md.p_uvy.assign(p_uvy.data().begin(), p_uvy.data().end());
  return md;
}

long ipow_checked(int base, int n, double cap) {
  double d = std::pow(static_cast<double>(base), n);
  if (d > cap) throw guard_error("sequence space exceeds the exact-enumeration guard");
  long r = 1;
  for (int t = 0; t < n; ++t) r *= base;
  return r;
}

void unflatten_seq(long flat, int base, int n, std::vector<int>& seq) {
  for (int t = n - 1; t >= 0; --t) {
    seq[static_cast<std::size_t>(t)] = static_cast<int>(flat % base);
    flat /= base;
  }
}

void check_seq(const std::vector<int>& seq, int n, int base, const char* what) {
  if (static_cast<int>(seq.size()) != n)
    throw validation_error(std::string(what) + ": sequence length does not match blocklength");
  for (int sym : seq)
    if (sym < 0 || sym >= base)
      throw validation_error(std::string(what) + ": symbol out of range");
}

bool law_core(const SimModel& md, const Codebook& cb, long m, const std::vector<int>& s_seq,
              std::vector<double>& law) {
  const long cands = cb.candidates();
  law.assign(static_cast<std::size_t>(cands), 0.0);
  double total = 0.0;
  for (long c = 0; c < cands; ++c) {
    long i = c / (cb.N * cb.K);
    const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
    const auto& vseq = cb.v_layer[static_cast<std::size_t>(c * cb.M + m)];
    double w = 1.0;
    for (int t = 0; t < cb.n && w > 0.0; ++t) {
      int u = useq[static_cast<std::size_t>(t)];
      int v = vseq[static_cast<std::size_t>(t)];
      int s = s_seq[static_cast<std::size_t>(t)];
      w *= md.w_s_given_uv[static_cast<std::size_t>((u * md.nv + v) * md.ns + s)];
    }
    law[static_cast<std::size_t>(c)] = w;
    total += w;
  }
  if (total <= 0.0) return false;
  for (auto& w : law) w /= total;
  return true;
}

void check_message(const Codebook& cb, long m) {
  if (m < 0 || m >= cb.M) throw validation_error("message index out of range");
}

// flat v-layer entry index ((i*N+j)*K+k)*M+m -> (i,j,k,m)
void split_entry(const Codebook& cb, long e, long* i, long* j, long* k, long* m) {
  *m = e % cb.M;
  e /= cb.M;
  *k = e % cb.K;
  e /= cb.K;
  *j = e % cb.N;
  *i = e / cb.N;
}

// V must embed S as its leading factor for causal operation.
int state_embedding_base(const JointSystem& j) {
  if (j.nv % j.ns != 0)
    throw validation_error("causal encoding needs a state-embedding scheme (|S| must divide |V|)");
  int nvb = j.nv / j.ns;
  Tensor p_suv = j.p.marginal({ax::S, ax::U, ax::V});
  for (int s = 0; s < j.ns; ++s)
    for (int u = 0; u < j.nu; ++u)
      for (int v = 0; v < j.nv; ++v)
        if (p_suv.at({s, u, v}) > support_eps && v / nvb != s)
          throw validation_error(
              "causal encoding needs a state-embedding scheme (V does not embed S)");
  return nvb;
}

struct DecoderRef {
  std::vector<double> p_uvy;  // copy for cheap indexing
  std::vector<long> heavy;    // cells whose probability exceeds eps
  int nu = 1, nv = 1, ny = 1;
};

DecoderRef make_decoder_ref(const SimModel& md, double eps) {
  DecoderRef ref;
  ref.p_uvy = md.p_uvy;
  ref.nu = md.nu;
  ref.nv = md.nv;
  ref.ny = md.ny;
  for (std::size_t c = 0; c < ref.p_uvy.size(); ++c)
    if (ref.p_uvy[c] > eps) ref.heavy.push_back(static_cast<long>(c));
  return ref;
}

DecodeResult decode_core(const DecoderRef& ref, const Codebook& cb,
                         const std::vector<int>& y_seq, double eps,
                         std::vector<int>& counts, std::vector<long>& touched) {
  DecodeResult res;
  const long entries = cb.L * cb.N * cb.K * cb.M;
  const double n = static_cast<double>(cb.n);
  bool found = false;
  for (long e = 0; e < entries; ++e) {
    long i = e / (cb.N * cb.K * cb.M);
    const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
    const auto& vseq = cb.v_layer[static_cast<std::size_t>(e)];
    touched.clear();
    for (int t = 0; t < cb.n; ++t) {
      long cell = (static_cast<long>(useq[static_cast<std::size_t>(t)]) * ref.nv +
                   vseq[static_cast<std::size_t>(t)]) *
                      ref.ny +
                  y_seq[static_cast<std::size_t>(t)];
      if (counts[static_cast<std::size_t>(cell)] == 0) touched.push_back(cell);
      ++counts[static_cast<std::size_t>(cell)];
    }
    bool ok = true;
    for (long cell : touched) {
      double p = ref.p_uvy[static_cast<std::size_t>(cell)];
      double f = static_cast<double>(counts[static_cast<std::size_t>(cell)]) / n;
      if (p <= support_eps || std::abs(f - p) > eps) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (long cell : ref.heavy)
        if (counts[static_cast<std::size_t>(cell)] == 0) {
          ok = false;
          break;
        }
    }
    for (long cell : touched) counts[static_cast<std::size_t>(cell)] = 0;
    if (!ok) continue;
    if (found) {
      res.status = DecodeStatus::multiple;
      return res;
    }
    found = true;
    split_entry(cb, e, &res.i, &res.j, &res.k, &res.m);
  }
  res.status = found ? DecodeStatus::ok : DecodeStatus::none;
  return res;
}

double wilson_halfwidth(double phat, double t) {
  if (t <= 0) return 0.0;
  const double z = 1.959963984540054;
  double z2 = z * z;
  double denom = 1.0 + z2 / t;
  return (z * std::sqrt(phat * (1.0 - phat) / t + z2 / (4.0 * t * t))) / denom;
}

}  // namespace

long rate_index_size(int n, double rate) {
  if (n <= 0) throw validation_error("blocklength must be positive");
  if (rate < 0.0) throw validation_error("rates must be nonnegative");
  double t = std::exp2(static_cast<double>(n) * rate);
  if (t > 9e15) throw guard_error("index set size overflows the guard");
  long r = std::llround(t);
  if (std::abs(t - static_cast<double>(r)) > 1e-9 * std::max(1.0, t))
    r = static_cast<long>(std::ceil(t));
  return std::max(1L, r);
}

Codebook generate_codebook(const JointSystem& j, int n, double R1, double R2, double RK,
                           double RM, std::uint64_t seed) {
  if (n <= 0) throw validation_error("blocklength must be positive");
  Codebook cb;
  cb.joint = j;
  cb.n = n;
  cb.seed = seed;
  cb.L = rate_index_size(n, R1);
  cb.N = rate_index_size(n, R2);
  cb.K = rate_index_size(n, RK);
  cb.M = rate_index_size(n, RM);
  double cells = (static_cast<double>(cb.L) +
                  static_cast<double>(cb.L) * static_cast<double>(cb.N) *
                      static_cast<double>(cb.K) * static_cast<double>(cb.M)) *
                 n;
  if (cells > static_cast<double>(sim_guard))
    throw guard_error("codebook tables exceed the memory guard");

  SimModel md = make_model(j);
  SmallRng rng(substream_seed(seed, kStageCodebook, 0));
  cb.u_layer.assign(static_cast<std::size_t>(cb.L), std::vector<int>(static_cast<std::size_t>(n)));
  for (long i = 0; i < cb.L; ++i)
    for (int t = 0; t < n; ++t)
      cb.u_layer[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
          rng.sample_row(md.p_u.data(), md.nu);
  long entries = cb.L * cb.N * cb.K * cb.M;
  cb.v_layer.assign(static_cast<std::size_t>(entries),
                    std::vector<int>(static_cast<std::size_t>(n)));
  for (long e = 0; e < entries; ++e) {
    long i = e / (cb.N * cb.K * cb.M);
    const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
    for (int t = 0; t < n; ++t) {
      int u = useq[static_cast<std::size_t>(t)];
      cb.v_layer[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)] =
          rng.sample_row(md.p_v_given_u.data() + static_cast<std::ptrdiff_t>(u) * md.nv, md.nv);
    }
  }
  return cb;
}

bool likelihood_encoder_law(const Codebook& cb, long m, const std::vector<int>& s_seq,
                            std::vector<double>& law) {
  check_message(cb, m);
  check_seq(s_seq, cb.n, cb.joint.ns, "state sequence");
  SimModel md = make_model(cb.joint);
  return law_core(md, cb, m, s_seq, law);
}

EncodeIndices likelihood_encode(const Codebook& cb, long m, const std::vector<int>& s_seq,
                                std::uint64_t seed) {
  std::vector<double> law;
  if (!likelihood_encoder_law(cb, m, s_seq, law))
    throw infeasible_error("atypical state: all candidate likelihood weights are zero");
  SmallRng rng(substream_seed(seed, kStageEncode, 0));
  long c = rng.sample_row(law.data(), static_cast<int>(law.size()));
  EncodeIndices idx;
  idx.k = c % cb.K;
  idx.j = (c / cb.K) % cb.N;
  idx.i = c / (cb.K * cb.N);
  return idx;
}

namespace {

// appends P(x-seq) over the support to out[base + xflat]
void fill_x_products(const SimModel& md, const Codebook& cb, const std::vector<int>& s_seq,
                     const std::vector<int>& useq, const std::vector<int>& vseq,
                     bool substitute, int nvb, double scale, long base,
                     std::vector<double>& out) {
  const int n = cb.n;
  long xspace = 1;
  for (int t = 0; t < n; ++t) xspace *= md.nx;
  std::vector<int> xs(static_cast<std::size_t>(n));
  for (long xf = 0; xf < xspace; ++xf) {
    unflatten_seq(xf, md.nx, n, xs);
    double p = scale;
    for (int t = 0; t < n && p > 0.0; ++t) {
      int s = s_seq[static_cast<std::size_t>(t)];
      int u = useq[static_cast<std::size_t>(t)];
      int v = vseq[static_cast<std::size_t>(t)];
      if (substitute) v = s * nvb + (v % nvb);
      p *= md.selector[static_cast<std::size_t>(((s * md.nu + u) * md.nv + v) * md.nx +
                                                xs[static_cast<std::size_t>(t)])];
    }
    if (p > 0.0) out[static_cast<std::size_t>(base + xf)] += p;
  }
}

}  // namespace

std::vector<double> likelihood_encoder_outcome_law(const Codebook& cb, long m,
                                                   const std::vector<int>& s_seq,
                                                   bool* success) {
  check_message(cb, m);
  check_seq(s_seq, cb.n, cb.joint.ns, "state sequence");
  SimModel md = make_model(cb.joint);
  long xspace = ipow_checked(md.nx, cb.n, static_cast<double>(sim_guard));
  if (static_cast<double>(cb.candidates()) * static_cast<double>(xspace) >
      static_cast<double>(sim_guard))
    throw guard_error("outcome law exceeds the exact-enumeration guard");
  std::vector<double> out(static_cast<std::size_t>(cb.candidates() * xspace), 0.0);
  std::vector<double> law;
  bool ok = law_core(md, cb, m, s_seq, law);
  if (success) *success = ok;
  if (!ok) return out;
  for (long c = 0; c < cb.candidates(); ++c) {
    if (law[static_cast<std::size_t>(c)] <= 0.0) continue;
    long i = c / (cb.N * cb.K);
    fill_x_products(md, cb, s_seq, cb.u_layer[static_cast<std::size_t>(i)],
                    cb.v_layer[static_cast<std::size_t>(c * cb.M + m)],
                    /*substitute=*/false, 1, law[static_cast<std::size_t>(c)], c * xspace, out);
  }
  return out;
}

std::vector<double> causal_encoder_outcome_law(const Codebook& cb, long m,
                                               const std::vector<int>& s_seq) {
  check_message(cb, m);
  check_seq(s_seq, cb.n, cb.joint.ns, "state sequence");
  int nvb = state_embedding_base(cb.joint);
  SimModel md = make_model(cb.joint);
  long xspace = ipow_checked(md.nx, cb.n, static_cast<double>(sim_guard));
  if (static_cast<double>(cb.candidates()) * static_cast<double>(xspace) >
      static_cast<double>(sim_guard))
    throw guard_error("outcome law exceeds the exact-enumeration guard");
  std::vector<double> out(static_cast<std::size_t>(cb.candidates() * xspace), 0.0);
  double unif = 1.0 / static_cast<double>(cb.candidates());
  for (long c = 0; c < cb.candidates(); ++c) {
    long i = c / (cb.N * cb.K);
    fill_x_products(md, cb, s_seq, cb.u_layer[static_cast<std::size_t>(i)],
                    cb.v_layer[static_cast<std::size_t>(c * cb.M + m)],
                    /*substitute=*/true, nvb, unif, c * xspace, out);
  }
  return out;
}

CausalEncodeResult causal_encode(const Codebook& cb, long m,
                                 const std::vector<int>& state_stream, std::uint64_t seed) {
  check_message(cb, m);
  check_seq(state_stream, cb.n, cb.joint.ns, "state stream");
  int nvb = state_embedding_base(cb.joint);
  SimModel md = make_model(cb.joint);
  SmallRng rng(substream_seed(seed, kStageCausal, 0));
  CausalEncodeResult res;
  res.idx.i = rng.below_long(cb.L);
  res.idx.j = rng.below_long(cb.N);
  res.idx.k = rng.below_long(cb.K);
  const auto& useq = cb.u_layer[static_cast<std::size_t>(res.idx.i)];
  const auto& vseq =
      cb.v_layer[static_cast<std::size_t>(cb.v_index(res.idx.i, res.idx.j, res.idx.k, m))];
  res.x_seq.resize(static_cast<std::size_t>(cb.n));
  for (int t = 0; t < cb.n; ++t) {
    int s = state_stream[static_cast<std::size_t>(t)];
    int u = useq[static_cast<std::size_t>(t)];
    int v = s * nvb + (vseq[static_cast<std::size_t>(t)] % nvb);  // live-state substitution
    res.x_seq[static_cast<std::size_t>(t)] = rng.sample_row(
        md.selector.data() + static_cast<std::ptrdiff_t>(((s * md.nu + u) * md.nv + v)) * md.nx,
        md.nx);
  }
  return res;
}

std::pair<std::vector<int>, std::vector<int>> channel_transmit(const WiretapChannel& ch,
                                                               const std::vector<int>& s_seq,
                                                               const std::vector<int>& x_seq,
                                                               std::uint64_t seed) {
  if (s_seq.size() != x_seq.size())
    throw validation_error("state and input sequences differ in length");
  int n = static_cast<int>(s_seq.size());
  check_seq(s_seq, n, ch.ns, "state sequence");
  check_seq(x_seq, n, ch.nx, "input sequence");
  SmallRng rng(substream_seed(seed, kStageChannel, 0));
  std::vector<int> ys(static_cast<std::size_t>(n)), zs(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(ch.ny * ch.nz));
  for (int t = 0; t < n; ++t) {
    int s = s_seq[static_cast<std::size_t>(t)];
    int x = x_seq[static_cast<std::size_t>(t)];
    for (int y = 0; y < ch.ny; ++y)
      for (int z = 0; z < ch.nz; ++z)
        row[static_cast<std::size_t>(y * ch.nz + z)] = ch.w(s, x, y, z);
    int yz = rng.sample_row(row.data(), ch.ny * ch.nz);
    ys[static_cast<std::size_t>(t)] = yz / ch.nz;
    zs[static_cast<std::size_t>(t)] = yz % ch.nz;
  }
  return {ys, zs};
}

DecodeResult typicality_decode(const Codebook& cb, const std::vector<int>& y_seq, double eps) {
  if (eps <= 0.0) throw validation_error("typicality eps must be positive");
  check_seq(y_seq, cb.n, cb.joint.ny, "output sequence");
  SimModel md = make_model(cb.joint);
  DecoderRef ref = make_decoder_ref(md, eps);
  std::vector<int> counts(static_cast<std::size_t>(md.nu * md.nv * md.ny), 0);
  std::vector<long> touched;
  return decode_core(ref, cb, y_seq, eps, counts, touched);
}

namespace {

// exact max_m D(q_S^(m) || p_S^n) for a fixed codebook, uniform (i,j,k)
double covering_exact(const SimModel& md, const Codebook& cb, long sspace) {
  std::vector<int> ss(static_cast<std::size_t>(cb.n));
  std::vector<double> q(static_cast<std::size_t>(sspace));
  double worst = 0.0;
  for (long m = 0; m < cb.M; ++m) {
    std::fill(q.begin(), q.end(), 0.0);
    double unif = 1.0 / static_cast<double>(cb.candidates());
    for (long c = 0; c < cb.candidates(); ++c) {
      long i = c / (cb.N * cb.K);
      const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
      const auto& vseq = cb.v_layer[static_cast<std::size_t>(c * cb.M + m)];
      for (long sf = 0; sf < sspace; ++sf) {
        unflatten_seq(sf, md.ns, cb.n, ss);
        double w = 1.0;
        for (int t = 0; t < cb.n && w > 0.0; ++t)
          w *= md.w_s_given_uv[static_cast<std::size_t>(
              (useq[static_cast<std::size_t>(t)] * md.nv + vseq[static_cast<std::size_t>(t)]) *
                  md.ns +
              ss[static_cast<std::size_t>(t)])];
        q[static_cast<std::size_t>(sf)] += unif * w;
      }
    }
    double d = 0.0;
    for (long sf = 0; sf < sspace; ++sf) {
      double qv = q[static_cast<std::size_t>(sf)];
      if (qv <= 0.0) continue;
      unflatten_seq(sf, md.ns, cb.n, ss);
      double pn = 1.0;
      for (int t = 0; t < cb.n; ++t) pn *= md.p_s[static_cast<std::size_t>(ss[t])];
      d += qv * (std::log2(qv) - plog2(pn));
    }
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

SimReport run_trials(const WiretapChannel& ch, const JointSystem& j, int n, SimRates rates,
                     long trials, std::uint64_t seed, double decode_eps) {
  ch.validate();
  if (j.ns != ch.ns || j.nx != ch.nx || j.ny != ch.ny || j.nz != ch.nz)
    throw validation_error("joint system dimensions do not match the channel");
  if (decode_eps <= 0.0) throw validation_error("typicality eps must be positive");

  Codebook cb = generate_codebook(j, n, rates.R1, rates.R2, rates.RK, rates.RM,
                                  substream_seed(seed, kStageCodebook, 1));
  SimModel md = make_model(j);
  DecoderRef ref = make_decoder_ref(md, decode_eps);

  SimReport rep;
  rep.n = n;
  rep.rates = rates;
  rep.seed = seed;

  const double g = static_cast<double>(sim_guard);
  double ns_n = std::pow(static_cast<double>(md.ns), n);
  double ny_n = std::pow(static_cast<double>(md.ny), n);
  double nz_n = std::pow(static_cast<double>(md.nz), n);
  double lnk = static_cast<double>(cb.candidates());
  double entries = lnk * static_cast<double>(cb.M);
  int xb = 0;  // widest selector row support
  for (int r = 0; r < md.ns * md.nu * md.nv; ++r) {
    int nnz = 0;
    for (int x = 0; x < md.nx; ++x)
      if (md.selector[static_cast<std::size_t>(r * md.nx + x)] > support_eps) ++nnz;
    xb = std::max(xb, nnz);
  }
  double xb_n = std::pow(static_cast<double>(xb), n);
  double cost_main = static_cast<double>(cb.M) * ns_n * lnk * xb_n * (ny_n + nz_n);
  double cost_decode = ny_n * entries * n;
  double cost_leak = static_cast<double>(cb.M) * static_cast<double>(cb.K) * nz_n;
  double cost_cover = entries * ns_n * n;
  bool cover_ok = cost_cover <= g;
  bool exact_ok = cost_main <= g && cost_decode <= g && cost_leak <= g && cover_ok;

  if (!exact_ok && trials <= 0)
    throw guard_error("exact enumeration exceeds the guard; rerun with trials > 0");

  if (exact_ok) {
    rep.mode = "exact";
    rep.trials = 0;
    long sspace = 1, yspace = 1, zspace = 1, xspace = 1;
    for (int t = 0; t < n; ++t) {
      sspace *= md.ns;
      yspace *= md.ny;
      zspace *= md.nz;
      xspace *= md.nx;
    }

    // decode table over all channel outputs
    std::vector<DecodeResult> table(static_cast<std::size_t>(yspace));
    {
      std::vector<int> counts(static_cast<std::size_t>(md.nu * md.nv * md.ny), 0);
      std::vector<long> touched;
      std::vector<int> ysq(static_cast<std::size_t>(n));
      for (long yf = 0; yf < yspace; ++yf) {
        unflatten_seq(yf, md.ny, n, ysq);
        table[static_cast<std::size_t>(yf)] = decode_core(ref, cb, ysq, decode_eps, counts, touched);
      }
    }

    std::vector<double> err(static_cast<std::size_t>(cb.M), 0.0);
    std::vector<double> keyd(static_cast<std::size_t>(cb.M * cb.K), 0.0);
    std::vector<double> leak(static_cast<std::size_t>(cb.M * cb.K) * static_cast<std::size_t>(zspace),
                             0.0);
    double atyp = 0.0, fail_none = 0.0, fail_mult = 0.0;
    const double m_unif = 1.0 / static_cast<double>(cb.M);

    std::vector<int> ss(static_cast<std::size_t>(n)), xs(static_cast<std::size_t>(n)),
        ysq(static_cast<std::size_t>(n)), zsq(static_cast<std::size_t>(n));
    std::vector<double> law;
    std::vector<std::pair<long, double>> xlist;

    for (long m = 0; m < cb.M; ++m) {
      for (long sf = 0; sf < sspace; ++sf) {
        unflatten_seq(sf, md.ns, n, ss);
        double psn = 1.0;
        for (int t = 0; t < n; ++t) psn *= md.p_s[static_cast<std::size_t>(ss[t])];
        if (psn <= 0.0) continue;
        bool ok = law_core(md, cb, m, ss, law);
        if (!ok) {
          // atypical state: documented fallback to the first candidate
          atyp += psn * m_unif;
          law.assign(static_cast<std::size_t>(cb.candidates()), 0.0);
          law[0] = 1.0;
        }
        for (long c = 0; c < cb.candidates(); ++c) {
          double pc = law[static_cast<std::size_t>(c)];
          if (pc <= 0.0) continue;
          long i = c / (cb.N * cb.K);
          long k = c % cb.K;
          const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
          const auto& vseq = cb.v_layer[static_cast<std::size_t>(c * cb.M + m)];
          keyd[static_cast<std::size_t>(m * cb.K + k)] += psn * pc;

          // enumerate x over the selector support
          xlist.clear();
          for (long xf = 0; xf < xspace; ++xf) {
            unflatten_seq(xf, md.nx, n, xs);
            double px = 1.0;
            for (int t = 0; t < n && px > 0.0; ++t)
              px *= md.selector[static_cast<std::size_t>(
                  ((ss[t] * md.nu + useq[static_cast<std::size_t>(t)]) * md.nv +
                   vseq[static_cast<std::size_t>(t)]) *
                      md.nx +
                  xs[static_cast<std::size_t>(t)])];
            if (px > 0.0) xlist.push_back({xf, px});
          }
          for (const auto& [xf, px] : xlist) {
            unflatten_seq(xf, md.nx, n, xs);
            double wq = psn * pc * px;
            // Bob side
            for (long yf = 0; yf < yspace; ++yf) {
              unflatten_seq(yf, md.ny, n, ysq);
              double py = 1.0;
              for (int t = 0; t < n && py > 0.0; ++t) {
                double acc = 0.0;
                for (int z = 0; z < md.nz; ++z) acc += ch.w(ss[t], xs[t], ysq[t], z);
                py *= acc;
              }
              if (py <= 0.0) continue;
              const DecodeResult& dec = table[static_cast<std::size_t>(yf)];
              long mh = 0, kh = 0;
              if (dec.status == DecodeStatus::ok) {
                mh = dec.m;
                kh = dec.k;
              } else if (dec.status == DecodeStatus::none) {
                fail_none += wq * py * m_unif;
              } else {
                fail_mult += wq * py * m_unif;
              }
              if (mh != m || kh != k) err[static_cast<std::size_t>(m)] += wq * py;
            }
            // Eve side
            for (long zf = 0; zf < zspace; ++zf) {
              unflatten_seq(zf, md.nz, n, zsq);
              double pz = 1.0;
              for (int t = 0; t < n && pz > 0.0; ++t) {
                double acc = 0.0;
                for (int y = 0; y < md.ny; ++y) acc += ch.w(ss[t], xs[t], y, zsq[t]);
                pz *= acc;
              }
              if (pz <= 0.0) continue;
              leak[(static_cast<std::size_t>(m * cb.K + k)) * static_cast<std::size_t>(zspace) +
                   static_cast<std::size_t>(zf)] += wq * pz * m_unif;
            }
          }
        }
      }
    }

    for (long m = 0; m < cb.M; ++m) rep.error_prob = std::max(rep.error_prob, err[m]);
    for (long m = 0; m < cb.M; ++m) {
      double tv = 0.0;
      for (long k = 0; k < cb.K; ++k)
        tv += std::abs(keyd[static_cast<std::size_t>(m * cb.K + k)] -
                       1.0 / static_cast<double>(cb.K));
      rep.key_tv = std::max(rep.key_tv, 0.5 * tv);
    }
    {
      std::vector<double> pmk(static_cast<std::size_t>(cb.M * cb.K), 0.0);
      std::vector<double> pz(static_cast<std::size_t>(zspace), 0.0);
      for (std::size_t mk = 0; mk < pmk.size(); ++mk)
        for (long zf = 0; zf < zspace; ++zf) {
          double p = leak[mk * static_cast<std::size_t>(zspace) + static_cast<std::size_t>(zf)];
          pmk[mk] += p;
          pz[static_cast<std::size_t>(zf)] += p;
        }
      double mi = 0.0;
      for (std::size_t mk = 0; mk < pmk.size(); ++mk)
        for (long zf = 0; zf < zspace; ++zf) {
          double p = leak[mk * static_cast<std::size_t>(zspace) + static_cast<std::size_t>(zf)];
          if (p > support_eps)
            mi += p * (std::log2(p) - std::log2(pmk[mk]) - std::log2(pz[static_cast<std::size_t>(zf)]));
        }
      rep.leakage_bits = std::max(0.0, mi);
    }
    rep.covering_div_bits = covering_exact(md, cb, sspace);
    rep.atypical_state_prob = atyp;
    rep.failure_none = fail_none;
    rep.failure_multiple = fail_mult;
    return rep;
  }

  // Monte-Carlo
  rep.mode = "mc";
  long per_m = std::max(1L, trials / cb.M);
  rep.trials = per_m * cb.M;
  std::vector<long> errc(static_cast<std::size_t>(cb.M), 0);
  std::vector<long> keyc(static_cast<std::size_t>(cb.M * cb.K), 0);
  std::map<std::pair<long, long>, long> zcount;  // ((m*K+k), z_flat) -> count
  long atyp = 0, fail_none = 0, fail_mult = 0;
  std::vector<int> counts(static_cast<std::size_t>(md.nu * md.nv * md.ny), 0);
  std::vector<long> touched;
  std::vector<double> law;
  std::vector<int> ss(static_cast<std::size_t>(n)), xs(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(md.ny * md.nz));

  long unit = 0;
  for (long m = 0; m < cb.M; ++m) {
    for (long t = 0; t < per_m; ++t, ++unit) {
      SmallRng rng(substream_seed(seed, kStageTrial, static_cast<std::uint64_t>(unit)));
      for (int tt = 0; tt < n; ++tt) ss[static_cast<std::size_t>(tt)] = rng.sample_row(md.p_s.data(), md.ns);
      long c = 0;
      if (law_core(md, cb, m, ss, law)) {
        c = rng.sample_row(law.data(), static_cast<int>(law.size()));
      } else {
        ++atyp;
        c = 0;
      }
      long i = c / (cb.N * cb.K);
      long k = c % cb.K;
      const auto& useq = cb.u_layer[static_cast<std::size_t>(i)];
      const auto& vseq = cb.v_layer[static_cast<std::size_t>(c * cb.M + m)];
      for (int tt = 0; tt < n; ++tt)
        xs[static_cast<std::size_t>(tt)] = rng.sample_row(
            md.selector.data() +
                static_cast<std::ptrdiff_t>(
                    (ss[static_cast<std::size_t>(tt)] * md.nu +
                     useq[static_cast<std::size_t>(tt)]) *
                        md.nv +
                    vseq[static_cast<std::size_t>(tt)]) *
                    md.nx,
            md.nx);
      long zflat = 0;
      std::vector<int> ysq(static_cast<std::size_t>(n));
      for (int tt = 0; tt < n; ++tt) {
        int s = ss[static_cast<std::size_t>(tt)];
        int x = xs[static_cast<std::size_t>(tt)];
        for (int y = 0; y < md.ny; ++y)
          for (int z = 0; z < md.nz; ++z)
            row[static_cast<std::size_t>(y * md.nz + z)] = ch.w(s, x, y, z);
        int yz = rng.sample_row(row.data(), md.ny * md.nz);
        ysq[static_cast<std::size_t>(tt)] = yz / md.nz;
        zflat = zflat * md.nz + (yz % md.nz);
      }
      DecodeResult dec = decode_core(ref, cb, ysq, decode_eps, counts, touched);
      long mh = 0, kh = 0;
      if (dec.status == DecodeStatus::ok) {
        mh = dec.m;
        kh = dec.k;
      } else if (dec.status == DecodeStatus::none) {
        ++fail_none;
      } else {
        ++fail_mult;
      }
      if (mh != m || kh != k) ++errc[static_cast<std::size_t>(m)];
      ++keyc[static_cast<std::size_t>(m * cb.K + k)];
      ++zcount[{m * cb.K + k, zflat}];
    }
  }

  double tpm = static_cast<double>(per_m);
  long worst_m = 0;
  for (long m = 0; m < cb.M; ++m)
    if (errc[static_cast<std::size_t>(m)] > errc[static_cast<std::size_t>(worst_m)]) worst_m = m;
  rep.error_prob = static_cast<double>(errc[static_cast<std::size_t>(worst_m)]) / tpm;
  rep.hw_error = wilson_halfwidth(rep.error_prob, tpm);
  for (long m = 0; m < cb.M; ++m) {
    double tv = 0.0;
    for (long k = 0; k < cb.K; ++k)
      tv += std::abs(static_cast<double>(keyc[static_cast<std::size_t>(m * cb.K + k)]) / tpm -
                     1.0 / static_cast<double>(cb.K));
    rep.key_tv = std::max(rep.key_tv, 0.5 * tv);
  }
  {
    // plug-in I(MK; Z^n) from the empirical joint
    double total = static_cast<double>(rep.trials);
    std::map<long, double> pmk, pz;
    for (const auto& [key, cnt] : zcount) {
      pmk[key.first] += static_cast<double>(cnt) / total;
      pz[key.second] += static_cast<double>(cnt) / total;
    }
    double mi = 0.0;
    for (const auto& [key, cnt] : zcount) {
      double p = static_cast<double>(cnt) / total;
      mi += p * (std::log2(p) - std::log2(pmk[key.first]) - std::log2(pz[key.second]));
    }
    rep.leakage_bits = std::max(0.0, mi);
  }
  if (cover_ok) {
    long sspace = 1;
    for (int t = 0; t < n; ++t) sspace *= md.ns;
    rep.covering_div_bits = covering_exact(md, cb, sspace);
  } else {
    rep.covering_div_bits = std::numeric_limits<double>::quiet_NaN();
  }
  rep.atypical_state_prob = static_cast<double>(atyp) / static_cast<double>(rep.trials);
  rep.failure_none = static_cast<double>(fail_none) / static_cast<double>(rep.trials);
  rep.failure_multiple = static_cast<double>(fail_mult) / static_cast<double>(rep.trials);
  return rep;
}

// ---------------------------------------------------------------------------
// soft covering

namespace {

using Dist = std::map<double, double>;  // value -> probability, exact-dedup

void spend(long* budget, long cost) {
  *budget -= cost;
  if (*budget < 0)
    throw guard_error("soft-covering exact enumeration exceeds the guard; use mc mode");
}

// Distribution of the sum of k iid draws from d, expanded over count vectors
// of d's atoms. Every multiset gets exactly one canonically-ordered value, so
// exact-equality dedup cannot be defeated by addition order (pairwise
// convolution would re-derive the same multiset along different fp paths and
// inflate the support).
Dist conv_pow(const Dist& d, long k, long* budget) {
  Dist r;
  if (k <= 0) {
    r[0.0] = 1.0;
    return r;
  }
  std::vector<double> xs, ps;
  xs.reserve(d.size());
  ps.reserve(d.size());
  for (const auto& [v, p] : d) {
    xs.push_back(v);
    ps.push_back(p);
  }
  int m = static_cast<int>(xs.size());
  if (m == 0) throw validation_error("empty distribution in iid sum");
  std::function<void(int, long, double, double)> rec = [&](int i, long rem, double value,
                                                           double prob) {
    spend(budget, 1);
    if (i == m - 1) {
      double pv = prob;
      for (long c = 0; c < rem; ++c) pv *= ps[static_cast<std::size_t>(i)];
      r[value + static_cast<double>(rem) * xs[static_cast<std::size_t>(i)]] += pv;
      return;
    }
    // coef tracks binom(rem, c) * p_i^c along c = 0,1,...
    double coef = 1.0;
    for (long c = 0; c <= rem; ++c) {
      rec(i + 1, rem - c, value + static_cast<double>(c) * xs[static_cast<std::size_t>(i)],
          prob * coef);
      coef *= static_cast<double>(rem - c) / static_cast<double>(c + 1) *
              ps[static_cast<std::size_t>(i)];
    }
  };
  rec(0, k, 0.0, 1.0);
  return r;
}

// one blocklength step: values multiply by the per-symbol likelihood
Dist product_step(const Dist& d, const double* vals, const double* probs, int len,
                  long* budget) {
  spend(budget, static_cast<long>(d.size()) * len);
  Dist r;
  for (const auto& [dv, dp] : d)
    for (int i = 0; i < len; ++i)
      if (probs[i] > 0.0) r[dv * vals[i]] += dp * probs[i];
  return r;
}

}  // namespace

SoftCoverResult soft_cover_divergence(const JointSystem& j, int n, double R1, double R2,
                                      SoftCoverMode mode, std::uint64_t seed, long samples) {
  if (n <= 0) throw validation_error("blocklength must be positive");
  SimModel md = make_model(j);
  const long L = rate_index_size(n, R1);
  const long N = rate_index_size(n, R2);
  SoftCoverResult res;

  if (mode == SoftCoverMode::exact) {
    long budget = sim_guard;
    long sspace = ipow_checked(md.ns, n, static_cast<double>(sim_guard));
    long uspace = ipow_checked(md.nu, n, static_cast<double>(sim_guard));
    std::vector<int> ss(static_cast<std::size_t>(n)), us(static_cast<std::size_t>(n));
    std::vector<double> vals(static_cast<std::size_t>(md.nv)),
        probs(static_cast<std::size_t>(md.nv));
    double total = 0.0;
    for (long sf = 0; sf < sspace; ++sf) {
      unflatten_seq(sf, md.ns, n, ss);
      double psn = 1.0;
      for (int t = 0; t < n; ++t) psn *= md.p_s[static_cast<std::size_t>(ss[t])];
      if (psn <= 0.0) continue;
      std::vector<double> pu_list;
      std::vector<Dist> d_list, r_list;
      Dist block_mix;
      for (long uf = 0; uf < uspace; ++uf) {
        unflatten_seq(uf, md.nu, n, us);
        double pu = 1.0;
        for (int t = 0; t < n; ++t) pu *= md.p_u[static_cast<std::size_t>(us[t])];
        if (pu <= 0.0) continue;
        Dist d{{1.0, 1.0}};
        for (int t = 0; t < n; ++t) {
          int u = us[static_cast<std::size_t>(t)];
          int s = ss[static_cast<std::size_t>(t)];
          for (int v = 0; v < md.nv; ++v) {
            vals[static_cast<std::size_t>(v)] =
                md.w_s_given_uv[static_cast<std::size_t>((u * md.nv + v) * md.ns + s)];
            probs[static_cast<std::size_t>(v)] =
                md.p_v_given_u[static_cast<std::size_t>(u * md.nv + v)];
          }
          d = product_step(d, vals.data(), probs.data(), md.nv, &budget);
        }
        Dist blk = conv_pow(d, N, &budget);
        for (const auto& [bv, bp] : blk) block_mix[bv] += pu * bp;
        pu_list.push_back(pu);
        d_list.push_back(std::move(d));
        r_list.push_back(conv_pow(d_list.back(), N - 1, &budget));
      }
      Dist tdist = conv_pow(block_mix, L - 1, &budget);
      double lnp = static_cast<double>(L) * static_cast<double>(N) * psn;
      for (std::size_t ui = 0; ui < pu_list.size(); ++ui) {
        spend(&budget, static_cast<long>(d_list[ui].size()) *
                           static_cast<long>(r_list[ui].size()) *
                           static_cast<long>(tdist.size()));
        for (const auto& [w, pw] : d_list[ui]) {
          if (w <= 0.0) continue;
          for (const auto& [r, pr] : r_list[ui])
            for (const auto& [t, pt] : tdist)
              total += pu_list[ui] * pw * w * pr * pt * std::log2((w + r + t) / lnp);
        }
      }
    }
    res.bits = total;
    res.codebooks = 0;
    return res;
  }

  // Monte-Carlo over sampled codebooks; per-codebook divergence is exact.
  if (samples <= 0) throw validation_error("mc mode needs at least one codebook sample");
  long sspace = ipow_checked(md.ns, n, static_cast<double>(sim_guard));
  if (static_cast<double>(L) * static_cast<double>(N) * static_cast<double>(sspace) * n >
      static_cast<double>(sim_guard))
    throw guard_error("per-codebook divergence exceeds the guard");
  std::vector<int> ss(static_cast<std::size_t>(n));
  double sum = 0.0, sumsq = 0.0;
  for (long b = 0; b < samples; ++b) {
    SmallRng rng(substream_seed(seed, kStageCover, static_cast<std::uint64_t>(b)));
    std::vector<std::vector<int>> useq(static_cast<std::size_t>(L),
                                       std::vector<int>(static_cast<std::size_t>(n)));
    std::vector<std::vector<int>> vseq(static_cast<std::size_t>(L * N),
                                       std::vector<int>(static_cast<std::size_t>(n)));
    for (long i = 0; i < L; ++i)
      for (int t = 0; t < n; ++t)
        useq[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
            rng.sample_row(md.p_u.data(), md.nu);
    for (long i = 0; i < L; ++i)
      for (long jj = 0; jj < N; ++jj)
        for (int t = 0; t < n; ++t) {
          int u = useq[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
          vseq[static_cast<std::size_t>(i * N + jj)][static_cast<std::size_t>(t)] =
              rng.sample_row(md.p_v_given_u.data() + static_cast<std::ptrdiff_t>(u) * md.nv,
                             md.nv);
        }
    double d = 0.0;
    for (long sf = 0; sf < sspace; ++sf) {
      unflatten_seq(sf, md.ns, n, ss);
      double psn = 1.0;
      for (int t = 0; t < n; ++t) psn *= md.p_s[static_cast<std::size_t>(ss[t])];
      double q = 0.0;
      for (long i = 0; i < L; ++i)
        for (long jj = 0; jj < N; ++jj) {
          double w = 1.0;
          for (int t = 0; t < n && w > 0.0; ++t)
            w *= md.w_s_given_uv[static_cast<std::size_t>(
                (useq[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] * md.nv +
                 vseq[static_cast<std::size_t>(i * N + jj)][static_cast<std::size_t>(t)]) *
                    md.ns +
                ss[static_cast<std::size_t>(t)])];
          q += w;
        }
      q /= static_cast<double>(L) * static_cast<double>(N);
      if (q > 0.0) d += q * (std::log2(q) - plog2(psn));
    }
    sum += d;
    sumsq += d * d;
  }
  res.bits = sum / static_cast<double>(samples);
  res.codebooks = samples;
  if (samples > 1) {
    double var = (sumsq - sum * sum / static_cast<double>(samples)) /
                 static_cast<double>(samples - 1);
    res.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
  }
  return res;
}

// ---------------------------------------------------------------------------
// E0 exponent

namespace {

double e0_generic(const std::vector<double>& input, const std::vector<double>& w, int ni,
                  int ns, double rho) {
  double expo = 1.0 / (1.0 - rho);
  double sum = 0.0;
  for (int s = 0; s < ns; ++s) {
    double inner = 0.0;
    for (int i = 0; i < ni; ++i) {
      double p = input[static_cast<std::size_t>(i)];
      double ws = w[static_cast<std::size_t>(i * ns + s)];
      if (p > 0.0 && ws > 0.0) inner += p * std::pow(ws, expo);
    }
    if (inner > 0.0) sum += std::pow(inner, 1.0 - rho);
  }
  return -std::log2(sum);
}

}  // namespace

double gallager_e0(const JointSystem& j, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw validation_error("rho must lie in (0,1)");
  SimModel md = make_model(j);
  Tensor p_uv = j.p.marginal({ax::U, ax::V});
  std::vector<double> input(p_uv.data().begin(), p_uv.data().end());
  return e0_generic(input, md.w_s_given_uv, md.nu * md.nv, md.ns, rho);
}

double gallager_e0_u(const JointSystem& j, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw validation_error("rho must lie in (0,1)");
  SimModel md = make_model(j);
  std::vector<double> w(static_cast<std::size_t>(md.nu * md.ns), 0.0);
  for (int u = 0; u < md.nu; ++u)
    for (int s = 0; s < md.ns; ++s) {
      double acc = 0.0;
      for (int v = 0; v < md.nv; ++v)
        acc += md.p_v_given_u[static_cast<std::size_t>(u * md.nv + v)] *
               md.w_s_given_uv[static_cast<std::size_t>((u * md.nv + v) * md.ns + s)];
      w[static_cast<std::size_t>(u * md.ns + s)] = acc;
    }
  return e0_generic(md.p_u, w, md.nu, md.ns, rho);
}

}  // namespace wtsk
