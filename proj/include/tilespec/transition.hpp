#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "tilespec/rulespec.hpp"
#include "tilespec/supertile.hpp"

namespace tilespec {

using BigInt = boost::multiprecision::cpp_int;
using Real100 = boost::multiprecision::cpp_bin_float_100;

// Exact nonnegative integer matrix; entry(i,j) counts type-i constituents in
// the type-j supertile.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static IntMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  BigInt& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(int i, int j) const { return data_[i * cols_ + j]; }
  bool operator==(const IntMatrix&) const = default;

  IntMatrix operator*(const IntMatrix& rhs) const;
  IntMatrix pow(int n) const;
  bool all_positive() const;
  std::vector<BigInt> column_sums() const;
  Eigen::MatrixXd to_double() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<BigInt> data_;
};

double big_ratio(const BigInt& num, const BigInt& den);

// M for a substitution-like rule, or M_{level-1,level} for fusion/sadic.
IntMatrix transition_matrix(const RuleSpec& rule, int level = 1);
// M_{n,N} = M_{n,n+1} ... M_{N-1,N} (equals M^(N-n) for substitution rules).
IntMatrix matrix_product(const RuleSpec& rule, int n, int N);

// |sigma^n(a_j)| for every letter, exact.
std::vector<BigInt> superword_lengths(const RuleSpec& rule, int n);
// Vol(P_n(i)) in cells for fusion rules, exact.
std::vector<BigInt> fusion_volumes(const RuleSpec& rule, int n);

enum class Primitivity { Primitive, NotPrimitive, Undetermined };

struct PrimitivityVerdict {
  Primitivity verdict = Primitivity::Undetermined;
  int power = 0;    // least N with M^N > 0 (substitution case)
  int horizon = 0;  // levels examined (fusion case)
};

PrimitivityVerdict is_primitive(const RuleSpec& rule, int horizon = 12);

struct PerronData {
  double theta = 0;
  Eigen::VectorXd left;   // l, with l . r = 1
  Eigen::VectorXd right;  // r, with sum(r) = 1
  double residual = 0;
};

// Throws NotIrreducible / NoConvergence.
PerronData perron_data(const IntMatrix& m);

// Left Perron eigenvector scaled so the shortest tile has length 1.
std::vector<double> natural_lengths(const RuleSpec& rule);
// Right Perron eigenvector, volume-normalized (unit volumes => sum = 1).
std::vector<double> letter_frequencies(const RuleSpec& rule);
// Exact letter counts of sigma^n(seed) divided by the total cell count.
std::vector<double> empirical_frequencies(const RuleSpec& rule, int seed,
                                          int n);

struct FrequencySequence {
  struct Level {
    int n = 0;
    std::vector<double> rho;
    double spread = 0;  // max column disagreement of the normalized limits
  };
  std::vector<Level> levels;
  int depth = 0;
};

FrequencySequence frequency_sequence(const RuleSpec& rule, int depth);

struct PatchFrequencyReport {
  double value = 0;
  double cauchy_gap = 0;
  std::vector<std::pair<int, double>> partials;
};

PatchFrequencyReport patch_frequency(const RuleSpec& rule,
                                     const LatticePatch& patch, int depth);

// Occurrences of `patch` inside `host` as a translated sub-configuration.
long long count_patch(const LatticePatch& host, const LatticePatch& patch);

// Characteristic polynomial coefficients of det(xI - M), exact integers,
// leading coefficient first (monic).
std::vector<BigInt> char_poly(const IntMatrix& m);

}  // namespace tilespec
