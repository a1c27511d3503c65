#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wtsk/bounds.hpp"
#include "wtsk/channel.hpp"
#include "wtsk/errors.hpp"

using namespace wtsk;

namespace {

AuxiliaryScheme random_aux(std::mt19937_64& rng, AuxMode mode, const WiretapChannel& ch, int nu,
                           int nv) {
  AuxiliaryScheme aux;
  aux.mode = mode;
  aux.nu = nu;
  aux.nv = nv;
  if (mode == AuxMode::NonCausal) {
    aux.input = Tensor({ch.ns, nu, nv});
    for (int s = 0; s < ch.ns; ++s) {
      auto row = oracle::random_row(rng, nu * nv);
      for (int u = 0; u < nu; ++u)
        for (int v = 0; v < nv; ++v)
          aux.input.at({s, u, v}) =
              ch.state_dist[static_cast<std::size_t>(s)] * row[static_cast<std::size_t>(u * nv + v)];
    }
  } else {
    aux.input = Tensor({nu, nv});
    auto row = oracle::random_row(rng, nu * nv);
    for (std::size_t i = 0; i < row.size(); ++i) aux.input[i] = row[i];
  }
  aux.selector = Tensor({ch.ns, nu, nv, ch.nx});
  for (int s = 0; s < ch.ns; ++s)
    for (int u = 0; u < nu; ++u)
      for (int v = 0; v < nv; ++v) {
        auto row = oracle::random_row(rng, ch.nx);
        for (int x = 0; x < ch.nx; ++x)
          aux.selector.at({s, u, v, x}) = row[static_cast<std::size_t>(x)];
      }
  return aux;
}

}  // namespace

TEST_CASE("every aux-design bound matches the independent recomputation") {
  std::mt19937_64 rng(101);
  struct Pick {
    BoundId id;
    AuxMode mode;
    int nu, nv;
  };
  const Pick picks[] = {
      {BoundId::NC_Inner_T1, AuxMode::NonCausal, 2, 2},
      {BoundId::NC_ED_Region_T3, AuxMode::NonCausal, 2, 2},
      {BoundId::C_Case1, AuxMode::Case1, 2, 2},
      {BoundId::C_TypeI_Case2, AuxMode::Case2, 2, 2},
      {BoundId::C_Case2A, AuxMode::Case2A, 1, 2},
      {BoundId::C_Case2B, AuxMode::Case2B, 2, 1},
      {BoundId::C_TypeII_Case3, AuxMode::Case3, 2, 2},
      {BoundId::C_ED_Cor4, AuxMode::Case2, 1, 2},
      {BoundId::C_ED_Cor5, AuxMode::Case2, 2, 1},
      {BoundId::StateRepro_Outer, AuxMode::NonCausal, 2, 2},
  };
  for (const auto& pk : picks) {
    for (int trial = 0; trial < 5; ++trial) {
      WiretapChannel ch = oracle::random_channel(rng, 2, 2, 2, 2);
      AuxiliaryScheme aux = random_aux(rng, pk.mode, ch, pk.nu, pk.nv);
      JointSystem j = build_joint(ch, aux);
      RatePolytope got = eval_bound(pk.id, j);
      oracle::Caps want = oracle::caps_for(pk.id, oracle::from_tensor(j.p));
      INFO(to_string(pk.id), " trial ", trial);
      CHECK(got.c_m == doctest::Approx(want.c_m).epsilon(1e-10));
      CHECK(got.c_sum == doctest::Approx(want.c_sum).epsilon(1e-10));
      if (pk.id == BoundId::C_Case1) CHECK(got.c_m == got.c_sum);
    }
  }
}

TEST_CASE("input-only bounds match the independent recomputation") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 6; ++trial) {
    WiretapChannel ch = oracle::random_channel(rng, 2, 2, 2, 2);
    Tensor p_sx({2, 2});
    auto row = oracle::random_row(rng, 4);
    for (std::size_t i = 0; i < 4; ++i) p_sx[i] = row[i];

    // re-express the four-axis joint on the six-axis layout (singleton U,V)
    // so the mask-based oracle applies unchanged
    Tensor four = build_state_input_joint(ch, p_sx);
    oracle::Joint j6{{2, 1, 1, 2, 2, 2}, four.data()};

    RatePolytope t4 = eval_degraded_region(ch, p_sx);
    oracle::Caps w4 = oracle::caps_for(BoundId::D_Region_T4, j6);
    CHECK(t4.c_m == doctest::Approx(w4.c_m).epsilon(1e-10));
    CHECK(t4.c_sum == doctest::Approx(w4.c_sum).epsilon(1e-10));

    RatePolytope t5 = eval_outer_e(ch, p_sx);
    oracle::Caps w5 = oracle::caps_for(BoundId::E_Outer_T5, j6);
    CHECK(t5.c_m == doctest::Approx(w5.c_m).epsilon(1e-10));
    CHECK(t5.c_sum == doctest::Approx(w5.c_sum).epsilon(1e-10));

    // the outer bound only subtracts a nonnegative term from the sum cap
    CHECK(t5.c_sum <= t4.c_sum + 1e-12);
    CHECK(t5.c_m == doctest::Approx(t4.c_m).epsilon(1e-12));
  }
}

TEST_CASE("scalar projections apply the key feasibility gate") {
  RatePolytope ok{0.5, 0.3, BoundId::NC_Inner_T1, -1};
  CHECK(*scalar_projection(ok, RateAxis::SM) == doctest::Approx(0.3));
  CHECK(*scalar_projection(ok, RateAxis::SK) == doctest::Approx(0.3));

  RatePolytope gated{-0.2, 0.4, BoundId::NC_Inner_T1, -1};
  CHECK(*scalar_projection(gated, RateAxis::SM) == 0.0);
  CHECK(!scalar_projection(gated, RateAxis::SK).has_value());
  CHECK(*scalar_projection_signed(gated, RateAxis::SM) == doctest::Approx(-0.2));
  CHECK(!scalar_projection_signed(gated, RateAxis::SK).has_value());

  // boundary: c_m within the gate tolerance still counts as feasible
  RatePolytope edge{-1e-10, -0.3, BoundId::NC_Inner_T1, -1};
  CHECK(*scalar_projection(edge, RateAxis::SK) == 0.0);
  CHECK(*scalar_projection_signed(edge, RateAxis::SK) == doctest::Approx(-0.3));
}

TEST_CASE("key-rate formula comparison matches a direct recomputation") {
  std::mt19937_64 rng(113);
  WiretapChannel ch = oracle::random_channel(rng, 2, 2, 2, 2);
  AuxiliaryScheme aux = random_aux(rng, AuxMode::NonCausal, ch, 2, 2);
  JointSystem j = build_joint(ch, aux);
  auto [with_u, without_u] = compare_sk_formulas(j);
  oracle::Joint oj = oracle::from_tensor(j.p);
  using namespace oracle;
  double want_first = oj.cmi(mV, mY, mS | mU) - oj.cmi(mV, mZ, mS | mU) + oj.cond(mS, mZ | mU);
  double want_second = oj.cmi(mV, mY, mS) - oj.cmi(mV, mZ, mS) + oj.cond(mS, mZ);
  CHECK(with_u == doctest::Approx(want_first).epsilon(1e-10));
  CHECK(without_u == doctest::Approx(want_second).epsilon(1e-10));
}

TEST_CASE("evaluators reject joints built in the wrong mode") {
  std::mt19937_64 rng(127);
  WiretapChannel ch = oracle::random_channel(rng, 2, 2, 2, 2);

  AuxiliaryScheme causal = random_aux(rng, AuxMode::Case2, ch, 2, 2);
  JointSystem jc = build_joint(ch, causal);
  CHECK_THROWS_AS(eval_nc_inner(jc), validation_error);
  CHECK_THROWS_AS(eval_causal_case(BoundId::C_TypeII_Case3, jc), validation_error);

  AuxiliaryScheme nc = random_aux(rng, AuxMode::NonCausal, ch, 1, 2);
  JointSystem jn = build_joint(ch, nc);
  CHECK_THROWS_AS(eval_causal_ed(BoundId::C_ED_Cor4, jn), validation_error);

  AuxiliaryScheme u2 = random_aux(rng, AuxMode::Case2, ch, 2, 2);
  JointSystem ju = build_joint(ch, u2);
  CHECK_THROWS_AS(eval_causal_ed(BoundId::C_ED_Cor4, ju), validation_error);  // |U| != 1

  CHECK_THROWS_AS(eval_bound(BoundId::D_Region_T4, jn), validation_error);
  CHECK_THROWS_AS(eval_bound(BoundId::E_Outer_T5, jn), validation_error);
}

TEST_CASE("bound id strings round-trip and errors list the vocabulary") {
  for (BoundId id : all_bound_ids()) CHECK(bound_id_from_string(to_string(id)) == id);
  CHECK(is_input_only(BoundId::D_Region_T4));
  CHECK(is_input_only(BoundId::E_Outer_T5));
  CHECK(!is_input_only(BoundId::NC_Inner_T1));
  CHECK(!is_input_only(BoundId::StateRepro_Outer));
  try {
    bound_id_from_string("T1");
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("NC_Inner_T1") != std::string::npos);
    CHECK(msg.find("StateRepro_Outer") != std::string::npos);
  }
}
