#include <cmath>
#include <complex>

#include "doctest.h"
#include "helpers.hpp"
#include "tilespec/spectral.hpp"
#include "tilespec/transition.hpp"

using namespace tilespec;

namespace {
const char* kPhi100 =
    "1.6180339887498948482045868343656381177203091798057628621354486227"
    "052604628189024497072072041893911375";
}

TEST_CASE("algebraic verdicts for the shipped substitutions") {
  AlgebraicVerdict fib = algebraic_verdict(transition_matrix(load_rule("fib.rule")));
  CHECK(fib.char_poly == std::vector<BigInt>{1, -1, -1});
  CHECK(fib.perron_root == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(fib.classification == PisotClass::Pisot);
  CHECK(fib.irreducible_over_q == Ternary::Yes);
  REQUIRE(fib.conjugate_moduli.size() == 1);
  CHECK(fib.conjugate_moduli[0] ==
        doctest::Approx(std::sqrt(5.0) / 2 - 0.5).epsilon(1e-9));

  AlgebraicVerdict c3 = algebraic_verdict(transition_matrix(load_rule("const3.rule")));
  CHECK(c3.classification == PisotClass::Integer);
  CHECK(c3.perron_root == 3.0);
  CHECK(c3.conjugate_moduli == std::vector<double>{2.0});
  CHECK(c3.irreducible_over_q == Ternary::No);

  AlgebraicVerdict k3 = algebraic_verdict(transition_matrix(load_rule("k3.rule")));
  CHECK(k3.perron_root ==
        doctest::Approx((1 + std::sqrt(13.0)) / 2).epsilon(1e-9));
  CHECK(k3.classification == PisotClass::NonPisot);
  CHECK(k3.conjugate_moduli[0] > 1.0);  // strongly non-Pisot

  // a -> aab, b -> a: char poly x^2 - 2x - 1, roots 1 +/- sqrt(2).
  AlgebraicVerdict silver = algebraic_verdict(transition_matrix(load_rule("silver.rule")));
  CHECK(silver.classification == PisotClass::Pisot);
  CHECK(silver.perron_root ==
        doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(silver.conjugate_moduli[0] ==
        doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-9));
  CHECK(silver.irreducible_over_q == Ternary::Yes);
}

TEST_CASE("dekking height") {
  HeightResult tm = dekking_height(load_rule("tm.rule"));
  CHECK(tm.height == 1);
  CHECK(tm.q == 2);
  CHECK_FALSE(tm.periodic_warning);

  HeightResult c3 = dekking_height(load_rule("const3.rule"));
  CHECK(c3.height == 1);
  CHECK(c3.q == 3);

  HeightResult p2 = dekking_height(load_rule("period2.rule"));
  CHECK(p2.periodic_warning);

  CHECK_THROWS_AS(dekking_height(load_rule("fib.rule")), NotConstantLength);
}

TEST_CASE("coincidence for constant-length and block rules") {
  CoincidenceResult c3 = coincidence(load_rule("const3.rule"));
  CHECK(c3.found);
  CHECK(c3.power == 1);
  CHECK(c3.position == 0);  // both images start with a

  // 2-D Thue-Morse is bijective: no coincidence at any power.
  CoincidenceResult tm2d = coincidence(load_rule("tm2d.rule"), 8);
  CHECK_FALSE(tm2d.found);
  CoincidenceResult tm = coincidence(load_rule("tm.rule"), 8);
  CHECK_FALSE(tm.found);

  // pd2d's second block repeats a row, forcing a coincidence.
  CoincidenceResult pd2d = coincidence(load_rule("pd2d.rule"), 8);
  CHECK(pd2d.found);
}

TEST_CASE("strong coincidence for fibonacci") {
  CoincidenceResult sc = strong_coincidence(load_rule("fib.rule"));
  CHECK(sc.found);
  CHECK(sc.power == 1);
  CHECK(sc.position == 0);
  CHECK(sc.mode == "strong");
}

TEST_CASE("bijectivity tables") {
  BijectivityResult tm2d = is_bijective(load_rule("tm2d.rule"));
  CHECK(tm2d.bijective);
  REQUIRE(tm2d.table.size() == 4);
  CHECK(tm2d.table[0] == std::vector<int>{0, 1});  // cell (0,0)
  CHECK(tm2d.table[1] == std::vector<int>{1, 0});  // cell (1,0)

  CHECK(is_bijective(load_rule("tm.rule")).bijective);
  CHECK_FALSE(is_bijective(load_rule("rs2d.rule")).bijective);
  CHECK_FALSE(is_bijective(load_rule("const3.rule")).bijective);
  CHECK_FALSE(is_bijective(load_rule("pd2d.rule")).bijective);
}

TEST_CASE("high-precision perron root matches phi to 60 digits") {
  Real100 phi(kPhi100);
  Real100 root = perron_root_hp(transition_matrix(load_rule("fib.rule")));
  Real100 err = root - phi;
  if (err < 0) err = -err;
  CHECK(err < Real100("1e-60"));
}

TEST_CASE("host eigenvalue test on supertile cardinalities") {
  RuleSpec fib = load_rule("fib.rule");
  Real100 phi(kPhi100);

  EigenvalueTestReport pass = host_test(fib, phi);
  CHECK(pass.verdict == TestVerdict::Pass);
  // Geometric decay rate ~ 1/phi.
  CHECK(pass.rate == doctest::Approx(2 / (1 + std::sqrt(5.0))).epsilon(0.05));

  EigenvalueTestReport fail = host_test(fib, Real100(1) / 3);
  CHECK(fail.verdict == TestVerdict::Fail);

  EigenvalueTestReport zero = host_test(fib, Real100(0));
  CHECK(zero.verdict == TestVerdict::Pass);

  // Z[1/2] eigenvalues of constant-length q = 2 rules: alpha = j / 2^n.
  RuleSpec tm = load_rule("tm.rule");
  for (int n = 0; n <= 10; ++n) {
    for (long long j : {1LL, 3LL, (1LL << n) - 1}) {
      Real100 alpha = Real100(j) / Real100(BigInt(1) << n);
      CAPTURE(n);
      CAPTURE(j);
      CHECK(host_test(tm, alpha).verdict == TestVerdict::Pass);
    }
  }
  // ... and a non-dyadic alpha fails.
  CHECK(host_test(tm, Real100(1) / 3).verdict == TestVerdict::Fail);
}

TEST_CASE("host distances decay like phi^{-n} for fibonacci") {
  RuleSpec fib = load_rule("fib.rule");
  Real100 phi(kPhi100);
  EigenvalueTestReport report = host_test(fib, phi, 1, 40);
  double inv_phi = 2 / (1 + std::sqrt(5.0));
  for (const auto& [n, dist] : report.distances) {
    if (n < 5) continue;
    CHECK(dist < std::pow(inv_phi, n));
  }
}

TEST_CASE("self-similar eigenvalue test on return vectors") {
  RuleSpec doubler = parse_text(
      "rule doubler\nkind symbolic\ndim 1\nalphabet a\nmap a -> a a\n");
  CHECK(selfsimilar_eigen_test(doubler, Real100(1)).verdict ==
        TestVerdict::Pass);
  CHECK(selfsimilar_eigen_test(doubler, Real100(1) / 2).verdict ==
        TestVerdict::Fail);
  CHECK(selfsimilar_eigen_test(doubler, Real100(0)).verdict ==
        TestVerdict::Pass);

  // phi is an eigenvalue of the golden-mean self-similar tiling.
  RuleSpec fib = load_rule("fib.rule");
  CHECK(selfsimilar_eigen_test(fib, Real100(kPhi100)).verdict ==
        TestVerdict::Pass);
}

TEST_CASE("eigenfunction profile and its shift relation") {
  RuleSpec tm = load_rule("tm.rule");
  const double pi = 3.14159265358979323846;
  for (int n = 1; n <= 10; ++n) {
    const double qn = std::pow(2.0, n);
    std::complex<double> rot = std::polar(1.0, 2 * pi / qn);
    double worst = 0;
    for (long long j = 0; j <= 10000; ++j) {
      std::complex<double> here = eigenfunction_profile(tm, n, j);
      std::complex<double> next = eigenfunction_profile(tm, n, j + 1);
      worst = std::max(worst, std::abs(next - rot * here));
    }
    CAPTURE(n);
    CHECK(worst < 1e-12);
  }
  // Period q^n in j.
  CHECK(std::abs(eigenfunction_profile(tm, 5, 7 + 32) -
                 eigenfunction_profile(tm, 5, 7)) < 1e-15);
}

TEST_CASE("weak mixing verdicts follow the pisot classification") {
  CHECK(weak_mixing_verdict(load_rule("fib.rule")) ==
        MixingVerdict::NotWeaklyMixing);
  CHECK(weak_mixing_verdict(load_rule("const3.rule")) ==
        MixingVerdict::NotWeaklyMixing);
  CHECK(weak_mixing_verdict(load_rule("k3.rule")) ==
        MixingVerdict::WeaklyMixing);
}
