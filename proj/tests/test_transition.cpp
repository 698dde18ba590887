#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tilespec/supertile.hpp"
#include "tilespec/transition.hpp"

using namespace tilespec;

namespace {
IntMatrix make2(long long a, long long b, long long c, long long d) {
  IntMatrix m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}
}  // namespace

TEST_CASE("transition matrices of the shipped rules") {
  CHECK(transition_matrix(load_rule("fib.rule")) == make2(1, 1, 1, 0));
  CHECK(transition_matrix(load_rule("const3.rule")) == make2(1, 3, 2, 0));
  CHECK(transition_matrix(load_rule("tm.rule")) == make2(1, 1, 1, 1));
  CHECK(transition_matrix(load_rule("tm2d.rule")) == make2(2, 2, 2, 2));
  CHECK(transition_matrix(load_rule("chacon.rule")) == make2(3, 0, 1, 1));
  CHECK(transition_matrix(load_rule("vf.rule")) == make2(1, 2, 2, 1));
}

TEST_CASE("matrix powers and products") {
  IntMatrix fib = transition_matrix(load_rule("fib.rule"));
  CHECK(fib.pow(2) == make2(2, 1, 1, 1));
  CHECK(fib.pow(10) == make2(89, 55, 55, 34));
  CHECK(fib.pow(0) == IntMatrix::identity(2));

  RuleSpec chacon = load_rule("chacon.rule");
  CHECK(matrix_product(chacon, 0, 2) == make2(9, 0, 4, 1));
  CHECK(matrix_product(chacon, 1, 3) == make2(9, 0, 4, 1));

  RuleSpec fibfusion = load_rule("fibfusion.rule");
  CHECK(matrix_product(fibfusion, 0, 3) == make2(3, 2, 2, 1));

  // s-adic product alternates the two abelianizations.
  RuleSpec sadic = load_rule("sadic.rule");
  CHECK(matrix_product(sadic, 0, 2) == make2(2, 2, 1, 1));
}

TEST_CASE("abelianization agrees with brute-force letter counts") {
  for (const char* name : {"fib.rule", "const3.rule", "k3.rule", "silver.rule",
                           "tm.rule", "tm2d.rule"}) {
    CAPTURE(name);
    RuleSpec rule = load_rule(name);
    const int m = rule.alphabet.size();
    for (int n = 0; n <= 6; ++n) {
      IntMatrix mn = transition_matrix(rule).pow(n);
      for (int seed = 0; seed < m; ++seed) {
        std::vector<long long> counts(m, 0);
        if (rule.kind == RuleKind::Block) {
          for (int c : superblock(rule, seed, n).cells) ++counts[c];
        } else {
          for (int c : superword(rule, seed, n).letters) ++counts[c];
        }
        for (int i = 0; i < m; ++i)
          CHECK(mn(i, seed) == BigInt(counts[i]));
      }
    }
  }
}

TEST_CASE("superword lengths and fusion volumes are exact") {
  RuleSpec fib = load_rule("fib.rule");
  std::vector<BigInt> len = superword_lengths(fib, 90);
  CHECK(len[0] == BigInt("7540113804746346429"));  // F_92
  RuleSpec chacon = load_rule("chacon.rule");
  std::vector<BigInt> vol = fusion_volumes(chacon, 3);
  CHECK(vol[0] == 40);
  CHECK(vol[1] == 1);
}

TEST_CASE("primitivity verdicts") {
  PrimitivityVerdict fib = is_primitive(load_rule("fib.rule"));
  CHECK(fib.verdict == Primitivity::Primitive);
  CHECK(fib.power == 2);

  CHECK(is_primitive(load_rule("const3.rule")).verdict ==
        Primitivity::Primitive);
  CHECK(is_primitive(load_rule("tm.rule")).verdict == Primitivity::Primitive);
  CHECK(is_primitive(load_rule("vf.rule")).verdict == Primitivity::Primitive);
  CHECK(is_primitive(load_rule("fibfusion.rule")).verdict ==
        Primitivity::Primitive);
  CHECK(is_primitive(load_rule("sadic.rule")).verdict ==
        Primitivity::Primitive);

  // Chacon's b column stays (0,1)^T at every level: never primitive.
  CHECK(is_primitive(load_rule("chacon.rule")).verdict ==
        Primitivity::NotPrimitive);
  // The 1x1 matrix [1] is (trivially) positive at power 1.
  CHECK(is_primitive(load_rule("identity.rule")).verdict ==
        Primitivity::Primitive);
}

TEST_CASE("perron data for fibonacci") {
  PerronData pd = perron_data(transition_matrix(load_rule("fib.rule")));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(pd.theta == doctest::Approx(phi).epsilon(1e-12));
  CHECK(pd.residual < 1e-10);
  // Normalizations: sum(r) = 1, l . r = 1.
  CHECK(pd.right.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pd.left.dot(pd.right) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pd.right(0) == doctest::Approx(1 / phi).epsilon(1e-9));
  CHECK(pd.right(1) == doctest::Approx(1 - 1 / phi).epsilon(1e-9));
}

TEST_CASE("integer perron roots are exact") {
  PerronData c3 = perron_data(transition_matrix(load_rule("const3.rule")));
  CHECK(c3.theta == 3.0);
  PerronData tm = perron_data(transition_matrix(load_rule("tm.rule")));
  CHECK(tm.theta == 2.0);
  IntMatrix one(1, 1);
  one(0, 0) = 1;
  CHECK(perron_data(one).theta == 1.0);
}

TEST_CASE("perron data rejects reducible matrices") {
  CHECK_THROWS_AS(perron_data(transition_matrix(load_rule("chacon.rule"))),
                  NotIrreducible);
}

TEST_CASE("M^n / theta^n converges to the rank-one projector r l^T") {
  RuleSpec fib = load_rule("fib.rule");
  PerronData pd = perron_data(transition_matrix(fib));
  IntMatrix mn = transition_matrix(fib).pow(200);
  // Compare ratios of huge integers against r_i * l_j in double.
  const double phi = (1 + std::sqrt(5.0)) / 2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      // theta^200 = phi^200; use entry ratios to avoid overflow.
      double ratio = big_ratio(mn(i, j), mn(0, 0));
      double expected = (pd.right(i) * pd.left(j)) / (pd.right(0) * pd.left(0));
      CHECK(ratio == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("letter frequencies, spectral vs empirical") {
  RuleSpec const3 = load_rule("const3.rule");
  std::vector<double> freq = letter_frequencies(const3);
  CHECK(freq[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(freq[1] == doctest::Approx(0.4).epsilon(1e-12));
  // Exact deviation at level n is 0.4 * (2/3)^n; check it at n = 8 and the
  // 5e-3 band once it is actually reached.
  std::vector<double> emp8 = empirical_frequencies(const3, 0, 8);
  CHECK(emp8[0] == doctest::Approx(0.6 + 0.4 * std::pow(2.0 / 3.0, 8))
                       .epsilon(1e-12));
  std::vector<double> emp12 = empirical_frequencies(const3, 0, 12);
  CHECK(std::abs(emp12[0] - freq[0]) < 5e-3);
  CHECK(std::abs(emp12[1] - freq[1]) < 5e-3);
  // Fibonacci empirical frequencies at n = 20.
  RuleSpec fibr = load_rule("fib.rule");
  std::vector<double> fe = empirical_frequencies(fibr, 0, 20);
  const double golden = (1 + std::sqrt(5.0)) / 2;
  CHECK(std::abs(fe[0] - 1 / golden) < 1e-4);
  CHECK(std::abs(fe[1] - 1 / (golden * golden)) < 1e-4);
  // n = 0 is the indicator of the seed.
  std::vector<double> e0 = empirical_frequencies(const3, 1, 0);
  CHECK(e0[0] == 0.0);
  CHECK(e0[1] == 1.0);

  // Equal row sums force exactly uniform frequencies.
  std::vector<double> tm2d = letter_frequencies(load_rule("tm2d.rule"));
  CHECK(tm2d[0] == 0.5);
  CHECK(tm2d[1] == 0.5);

  // Inflation frequencies are volume-weighted.
  RuleSpec fib = load_rule("fib.rule");
  std::vector<double> fibf = letter_frequencies(fib);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(fibf[0] == doctest::Approx(1 / phi).epsilon(1e-9));
}

TEST_CASE("frequency sequence stabilizes for stationary fusions") {
  RuleSpec fibfusion = load_rule("fibfusion.rule");
  FrequencySequence seq = frequency_sequence(fibfusion, 20);
  REQUIRE(!seq.levels.empty());
  const auto& base = seq.levels.front();
  CHECK(base.n == 0);
  CHECK(base.spread < 1e-6);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(base.rho[0] == doctest::Approx(1 / phi).epsilon(1e-6));
  CHECK_THROWS_AS(frequency_sequence(fibfusion, 2), DepthTooShallow);
}

TEST_CASE("chacon frequency spread stays away from zero") {
  // The b column never mixes, so normalized columns keep disagreeing.
  FrequencySequence seq = frequency_sequence(load_rule("chacon.rule"), 20);
  CHECK(seq.levels.front().spread > 0.5);
}

TEST_CASE("patch frequency via volume-weighted counts") {
  RuleSpec fibfusion = load_rule("fibfusion.rule");
  LatticePatch a;
  a.cells[{0}] = 0;
  PatchFrequencyReport ra = patch_frequency(fibfusion, a, 20);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(ra.value == doctest::Approx(1 / phi).epsilon(1e-6));
  CHECK(ra.cauchy_gap < 1e-6);

  LatticePatch ab;
  ab.cells[{0}] = 0;
  ab.cells[{1}] = 1;
  PatchFrequencyReport rab = patch_frequency(fibfusion, ab, 20);
  // freq(ab) = freq(b) = 1 - 1/phi in the golden-mean word.
  CHECK(rab.value == doctest::Approx(1 - 1 / phi).epsilon(1e-5));
}

TEST_CASE("count_patch finds translated sub-configurations") {
  RuleSpec chacon = load_rule("chacon.rule");
  LatticePatch host = fusion_supertile(chacon, 0, 2);  // aabaaababaaba
  LatticePatch ab;
  ab.cells[{0}] = 0;
  ab.cells[{1}] = 1;
  CHECK(count_patch(host, ab) == 4);
  LatticePatch aa;
  aa.cells[{0}] = 0;
  aa.cells[{1}] = 0;
  CHECK(count_patch(host, aa) == 4);
}

TEST_CASE("characteristic polynomials are exact") {
  CHECK(char_poly(transition_matrix(load_rule("fib.rule"))) ==
        std::vector<BigInt>{1, -1, -1});
  CHECK(char_poly(transition_matrix(load_rule("const3.rule"))) ==
        std::vector<BigInt>{1, -1, -6});
  CHECK(char_poly(transition_matrix(load_rule("k3.rule"))) ==
        std::vector<BigInt>{1, -1, -3});
  CHECK(char_poly(transition_matrix(load_rule("tm.rule"))) ==
        std::vector<BigInt>{1, -2, 0});
  IntMatrix m3(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m3(i, j) = i * 3 + j + 1;
  // det(xI - [[1..9]]) = x^3 - 15x^2 - 18x.
  CHECK(char_poly(m3) == std::vector<BigInt>{1, -15, -18, 0});
}
