#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tilespec/rulespec.hpp"
#include "tilespec/transition.hpp"

namespace tilespec {

enum class PisotClass { Integer, Pisot, NonPisot, SalemBoundary };
enum class Ternary { Yes, No, Undetermined };

std::string to_string(PisotClass c);
std::string to_string(Ternary t);

struct AlgebraicVerdict {
  std::vector<BigInt> char_poly;        // monic, leading coefficient first
  double perron_root = 0;
  std::vector<double> conjugate_moduli; // sorted ascending
  PisotClass classification = PisotClass::NonPisot;
  Ternary irreducible_over_q = Ternary::Undetermined;
};

AlgebraicVerdict algebraic_verdict(const IntMatrix& m);

struct HeightResult {
  int height = 1;
  int q = 0;                     // substitution length
  bool periodic_warning = false; // fixed point is eventually periodic
  long long prefix_len = 0;
};

// Dekking height from the ranks of occurrence of the first fixed-point
// letter. Throws NotConstantLength / NoFixedPoint.
HeightResult dekking_height(const RuleSpec& rule, long long prefix_len = 10000);

struct CoincidenceResult {
  bool found = false;
  int power = 0;
  long long position = 0;
  std::string mode; // "plain" or "strong"
};

// Dekking coincidence for constant-length (1-D) or constant-shape (Z^d)
// rules: a level-k position where every letter's image shows one symbol.
CoincidenceResult coincidence(const RuleSpec& rule, int max_power = 8);
// Strong coincidence: same letter and abelian-equivalent proper prefixes.
CoincidenceResult strong_coincidence(const RuleSpec& rule, int max_power = 8);

struct BijectivityResult {
  bool bijective = false;
  // table[k][j] = image letter of a_j at cell position k (flat index).
  std::vector<std::vector<int>> table;
};

BijectivityResult is_bijective(const RuleSpec& rule);

enum class TestVerdict { Pass, Fail, Inconclusive };
std::string to_string(TestVerdict v);

struct EigenvalueTestReport {
  std::string alpha;
  std::vector<std::pair<int, double>> distances; // (n, max dist to Z)
  TestVerdict verdict = TestVerdict::Inconclusive;
  double rate = 0; // estimated geometric decay factor when passing
};

// Eigenvalue criterion on supertile cardinalities: dist(alpha*|sigma^{pn}(a)|, Z)
// must decay for every letter.
EigenvalueTestReport host_test(const RuleSpec& rule, const Real100& alpha,
                               int p = 1, int n_max = 40, double tol = 1e-6);

// Eigenvalue criterion on return vectors of the self-similar tiling:
// dist(alpha * lambda^n * x, Z) -> 0 for sampled return lengths x.
EigenvalueTestReport selfsimilar_eigen_test(const RuleSpec& rule,
                                            const Real100& alpha,
                                            int n_max = 40, double tol = 1e-6);

// High-precision Perron root (Newton on the exact characteristic polynomial)
// and natural lengths, for the eigenvalue tests above.
Real100 perron_root_hp(const IntMatrix& m);
std::vector<Real100> natural_lengths_hp(const RuleSpec& rule);

// Value of the level-n eigenfunction exp(2*pi*i*(j mod q^n)/q^n) at shift j.
std::complex<double> eigenfunction_profile(const RuleSpec& rule, int n,
                                           long long j);

enum class MixingVerdict { NotWeaklyMixing, WeaklyMixing, Undetermined };
std::string to_string(MixingVerdict v);

MixingVerdict weak_mixing_verdict(const RuleSpec& rule);

}  // namespace tilespec
