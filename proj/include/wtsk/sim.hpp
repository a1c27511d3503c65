#ifndef WTSK_SIM_HPP
#define WTSK_SIM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wtsk/channel.hpp"

namespace wtsk {

// outcome / codebook-state guard for every exact enumeration path
inline constexpr long sim_guard = 1L << 24;

// ceil(2^{n*rate}), at least 1
long rate_index_size(int n, double rate);

// Superposition code: L u-sequences, and per (i,j,k,m) a v-sequence drawn
// i.i.d. from p_{V|U}(.|u_i). Carries the joint it was drawn for so that
// encoder/decoder reference distributions travel with the code.
struct Codebook {
  JointSystem joint;
  int n = 0;
  long L = 1, N = 1, K = 1, M = 1;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> u_layer;  // [i]
  std::vector<std::vector<int>> v_layer;  // [v_index(i,j,k,m)]
  long v_index(long i, long j, long k, long m) const {
    return ((i * N + j) * K + k) * M + m;
  }
  long candidates() const { return L * N * K; }  // (i,j,k) for a fixed message
};

Codebook generate_codebook(const JointSystem& j, int n, double R1, double R2, double RK,
                           double RM, std::uint64_t seed);

struct EncodeIndices {
  long i = 0, j = 0, k = 0;
};

// Selection law over flat candidates c=((i*N+j)*K+k) for message m:
// law[c] proportional to p^n_{S|UV}(s_seq | u_i, v_{ijkm}). Returns false
// (law untouched) when every weight is zero -- the atypical-state event.
bool likelihood_encoder_law(const Codebook& cb, long m, const std::vector<int>& s_seq,
                            std::vector<double>& law);

// Samples from the law; atypical state raises infeasible_error.
EncodeIndices likelihood_encode(const Codebook& cb, long m, const std::vector<int>& s_seq,
                                std::uint64_t seed);

// Law of the full encoder outcome (candidate, x-sequence), flattened as
// c * nx^n + x_flat. The likelihood version conditions on candidate
// selection succeeding (sets *success accordingly); the causal version
// pre-draws (i,j,k) uniformly and substitutes the live state per symbol.
std::vector<double> likelihood_encoder_outcome_law(const Codebook& cb, long m,
                                                   const std::vector<int>& s_seq,
                                                   bool* success);
std::vector<double> causal_encoder_outcome_law(const Codebook& cb, long m,
                                               const std::vector<int>& s_seq);

struct CausalEncodeResult {
  std::vector<int> x_seq;
  EncodeIndices idx;  // key index is fixed before the block starts
};

// Streaming encoder for state-embedding (Case-2 family) schemes: x_t depends
// only on (s_t, pre-drawn codewords). Requires V to embed S.
CausalEncodeResult causal_encode(const Codebook& cb, long m,
                                 const std::vector<int>& state_stream, std::uint64_t seed);

std::pair<std::vector<int>, std::vector<int>> channel_transmit(const WiretapChannel& ch,
                                                               const std::vector<int>& s_seq,
                                                               const std::vector<int>& x_seq,
                                                               std::uint64_t seed);

enum class DecodeStatus { ok, none, multiple };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::none;
  long i = 0, j = 0, k = 0, m = 0;  // valid when status == ok
};

// Entrywise strong typicality on the (u,v,y) joint type; unique hit wins,
// zero or multiple hits report failure (callers map failure to the first
// (m,k) pair when scoring errors).
DecodeResult typicality_decode(const Codebook& cb, const std::vector<int>& y_seq, double eps);

struct SimRates {
  double R1 = 0, R2 = 0, RK = 0, RM = 0;
};

struct SimReport {
  std::string mode;  // "exact" | "mc"
  int n = 0;
  SimRates rates;
  double error_prob = 0;       // max over messages
  double key_tv = 0;           // max over messages
  double leakage_bits = 0;     // I(MK; Z^n), M uniform
  double covering_div_bits = 0;  // max_m D(q_S^(m) || p_S^n), this codebook
  double hw_error = 0, hw_key_tv = 0, hw_leakage = 0, hw_covering = 0;
  std::uint64_t seed = 0;
  long trials = 0;             // 0 in exact mode
  double atypical_state_prob = 0;
  double failure_none = 0, failure_multiple = 0;  // decoder failure taxonomy
};

// Exact mode auto-selected when every enumeration fits under sim_guard;
// otherwise Monte-Carlo with `trials` (trials == 0 then raises guard_error).
SimReport run_trials(const WiretapChannel& ch, const JointSystem& j, int n, SimRates rates,
                     long trials, std::uint64_t seed, double decode_eps = 0.1);

enum class SoftCoverMode { exact, mc };

struct SoftCoverResult {
  double bits = 0;
  double std_error = 0;  // 0 in exact mode
  long codebooks = 0;    // samples used (0 = ensemble expectation)
};

// E over codebooks of D(q^n_S || p^n_S) for the two-layer code with sizes
// ceil(2^{nR1}), ceil(2^{nR2}). Exact mode evaluates the ensemble
// expectation by convolving codeword-likelihood value distributions.
SoftCoverResult soft_cover_divergence(const JointSystem& j, int n, double R1, double R2,
                                      SoftCoverMode mode, std::uint64_t seed,
                                      long samples = 64);

// Single-letter E0 in bits for the state posterior seen from (U,V), and the
// U-layer variant with V averaged out; rho in (0,1).
double gallager_e0(const JointSystem& j, double rho);
double gallager_e0_u(const JointSystem& j, double rho);

}  // namespace wtsk

#endif
