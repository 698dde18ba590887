#include "tilespec/transition.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "tilespec/common.hpp"

namespace tilespec {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw SemanticError("matrix dimension mismatch in product");
  IntMatrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

IntMatrix IntMatrix::pow(int n) const {
  if (rows_ != cols_) throw SemanticError("pow of a non-square matrix");
  if (n < 0) throw SemanticError("negative matrix power");
  IntMatrix result = identity(rows_);
  IntMatrix base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

bool IntMatrix::all_positive() const {
  for (const BigInt& v : data_)
    if (v <= 0) return false;
  return !data_.empty();
}

std::vector<BigInt> IntMatrix::column_sums() const {
  std::vector<BigInt> sums(cols_);
  for (int j = 0; j < cols_; ++j)
    for (int i = 0; i < rows_; ++i) sums[j] += (*this)(i, j);
  return sums;
}

Eigen::MatrixXd IntMatrix::to_double() const {
  Eigen::MatrixXd out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      out(i, j) = static_cast<double>(Real100((*this)(i, j)));
  return out;
}

double big_ratio(const BigInt& num, const BigInt& den) {
  if (den == 0) throw SemanticError("division by zero volume");
  return static_cast<double>(Real100(num) / Real100(den));
}

namespace {

IntMatrix count_matrix(const SymbolicPayload& sigma, int m) {
  IntMatrix out(m, m);
  for (int j = 0; j < m; ++j)
    for (int letter : sigma.images[j]) out(letter, j) += 1;
  return out;
}

IntMatrix block_count_matrix(const RuleSpec& rule) {
  const int m = rule.alphabet.size();
  IntMatrix out(m, m);
  for (int j = 0; j < m; ++j)
    for (int letter : rule.block.blocks[j]) out(letter, j) += 1;
  return out;
}

IntMatrix fusion_level_matrix(const RuleSpec& rule, int level) {
  const int rows = fusion_type_count(rule, level - 1);
  const int cols = fusion_type_count(rule, level);
  IntMatrix out(rows, cols);
  const auto& levels = rule.fusion.levels;
  const FusionLevel& spec =
      level <= static_cast<int>(levels.size())
          ? levels[level - 1]
          : (rule.fusion.has_repeat()
                 ? levels.back()
                 : throw LevelOutOfRange("fusion rule scripted only to level " +
                                         std::to_string(levels.size())));
  for (int j = 0; j < cols; ++j)
    for (const auto& p : spec.supertiles[j]) out(p.constituent, j) += 1;
  return out;
}

IntMatrix vector_fusion_matrix() {
  // A' = A + two B copies, B' = B + two A copies.
  IntMatrix m(2, 2);
  m(0, 0) = 1;
  m(1, 0) = 2;
  m(0, 1) = 2;
  m(1, 1) = 1;
  return m;
}

bool has_level_matrices(RuleKind kind) {
  return kind == RuleKind::Fusion || kind == RuleKind::Sadic ||
         kind == RuleKind::VectorFusion;
}

// Boolean reachability closure: can type i feed into type j's history?
bool is_irreducible(const IntMatrix& m) {
  const int n = m.rows();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = m(i, j) > 0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

struct EigenPair {
  double theta = 0;
  Eigen::VectorXd vec;
  double residual = 0;
  bool ok = false;
};

EigenPair power_iterate(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  EigenPair best;
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / n;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::VectorXd y = a * x;
    const double s = y.sum();
    if (!(s > 0)) return best;
    y /= s;
    const double theta = x.dot(a * x) / x.squaredNorm();
    const double residual = (a * x - theta * x).lpNorm<Eigen::Infinity>();
    if (!best.ok || residual < best.residual)
      best = {theta, x, residual, true};
    if (theta > 0 && residual <= 1e-12 * theta) break;
    x = y;
  }
  return best;
}

EigenPair dominant_eigenpair(const Eigen::MatrixXd& a) {
  EigenPair pair = power_iterate(a);
  if (pair.ok && pair.theta > 0 && pair.residual <= 1e-12 * pair.theta)
    return pair;
  // Oscillating (imprimitive) cases: solve the full spectrum instead.
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) return pair;
  const auto vals = es.eigenvalues();
  double best_mod = 0;
  for (int i = 0; i < vals.size(); ++i)
    best_mod = std::max(best_mod, std::abs(vals[i]));
  // Among the modulus ties pick the real positive one (the Perron root).
  int idx = -1;
  for (int i = 0; i < vals.size(); ++i) {
    if (std::abs(vals[i]) < best_mod * (1 - 1e-9)) continue;
    const bool real_pos =
        std::abs(vals[i].imag()) < 1e-9 * (best_mod + 1) && vals[i].real() > 0;
    if (idx < 0 || real_pos) idx = i;
    if (real_pos) break;
  }
  if (idx < 0) return pair;
  Eigen::VectorXd v = es.eigenvectors().col(idx).cwiseAbs();
  const double s = v.sum();
  if (!(s > 0)) return pair;
  v /= s;
  const double theta = vals[idx].real();
  const double residual = (a * v - theta * v).lpNorm<Eigen::Infinity>();
  if (!pair.ok || residual < pair.residual) pair = {theta, v, residual, true};
  return pair;
}

// Exact integer-root check of the characteristic polynomial: allows snapping
// the numerically computed Perron root onto an exact integer eigenvalue.
bool is_integer_eigenvalue(const IntMatrix& m, long long candidate) {
  const auto coeffs = char_poly(m);
  BigInt acc = 0;
  for (const BigInt& c : coeffs) acc = acc * candidate + c;
  return acc == 0;
}

std::vector<double> rule_volumes(const RuleSpec& rule) {
  const int m = rule.alphabet.size();
  if (rule.kind == RuleKind::Inflation) {
    if (!rule.inflation.lengths_auto) return rule.inflation.lengths;
    return natural_lengths(rule);
  }
  return std::vector<double>(m, 1.0);
}

}  // namespace

IntMatrix transition_matrix(const RuleSpec& rule, int level) {
  switch (rule.kind) {
    case RuleKind::Symbolic:
      return count_matrix(rule.symbolic, rule.alphabet.size());
    case RuleKind::Inflation:
      return count_matrix(rule.inflation.map, rule.alphabet.size());
    case RuleKind::Block:
      return block_count_matrix(rule);
    case RuleKind::Fusion:
      return fusion_level_matrix(rule, level);
    case RuleKind::Sadic: {
      if (level < 1) throw LevelOutOfRange("level must be >= 1");
      const SadicSub& sub = rule.sadic.subs[rule.sadic.sub_at(level - 1)];
      return count_matrix(sub.map, rule.alphabet.size());
    }
    case RuleKind::VectorFusion:
      return vector_fusion_matrix();
  }
  throw SemanticError("unhandled rule kind");
}

IntMatrix matrix_product(const RuleSpec& rule, int n, int N) {
  if (n > N || n < 0) throw LevelOutOfRange("need 0 <= n <= N");
  if (!has_level_matrices(rule.kind)) {
    if (n == N) return IntMatrix::identity(rule.alphabet.size());
    return transition_matrix(rule).pow(N - n);
  }
  IntMatrix out = IntMatrix::identity(fusion_type_count(rule, n));
  for (int level = n + 1; level <= N; ++level)
    out = out * transition_matrix(rule, level);
  return out;
}

std::vector<BigInt> superword_lengths(const RuleSpec& rule, int n) {
  return matrix_product(rule, 0, n).column_sums();
}

std::vector<BigInt> fusion_volumes(const RuleSpec& rule, int n) {
  return matrix_product(rule, 0, n).column_sums();
}

PrimitivityVerdict is_primitive(const RuleSpec& rule, int horizon) {
  if (!has_level_matrices(rule.kind)) {
    const IntMatrix m = transition_matrix(rule);
    const int wielandt = (m.rows() - 1) * (m.rows() - 1) + 1;
    IntMatrix p = m;
    for (int power = 1; power <= wielandt; ++power) {
      if (p.all_positive()) return {Primitivity::Primitive, power, 0};
      if (power < wielandt) p = p * m;
    }
    return {Primitivity::NotPrimitive, 0, 0};
  }

  // Levelwise definition: for every n there must exist N with M_{n,N} > 0.
  // Track the boolean support of the running product; once the level matrices
  // repeat periodically (fusion `repeat`, directive cycle), a revisited
  // support state can never turn positive, which is decisive.
  const bool repeats_forever =
      rule.kind == RuleKind::VectorFusion ||
      (rule.kind == RuleKind::Fusion && rule.fusion.has_repeat()) ||
      (rule.kind == RuleKind::Sadic && !rule.sadic.directive_cycle.empty());
  const int period = rule.kind == RuleKind::Sadic
                         ? std::max<int>(
                               1, static_cast<int>(
                                      rule.sadic.directive_cycle.size()))
                         : 1;
  int max_power = 0;
  for (int n = 0; n <= horizon; ++n) {
    IntMatrix prod;
    bool found = false;
    std::set<std::pair<int, std::vector<bool>>> seen;
    for (int N = n + 1;; ++N) {
      try {
        prod = N == n + 1 ? transition_matrix(rule, N)
                          : prod * transition_matrix(rule, N);
      } catch (const LevelOutOfRange&) {
        return {Primitivity::Undetermined, 0, horizon};
      }
      if (prod.all_positive()) {
        found = true;
        max_power = std::max(max_power, N - n);
        break;
      }
      if (N - n > horizon) {
        if (!repeats_forever) return {Primitivity::Undetermined, 0, horizon};
        std::vector<bool> support;
        support.reserve(prod.rows() * prod.cols());
        for (int i = 0; i < prod.rows(); ++i)
          for (int j = 0; j < prod.cols(); ++j)
            support.push_back(prod(i, j) > 0);
        if (!seen.insert({N % period, std::move(support)}).second)
          return {Primitivity::NotPrimitive, 0, horizon};
      }
    }
    if (!found) return {Primitivity::Undetermined, 0, horizon};
  }
  return {Primitivity::Primitive, max_power, horizon};
}

PerronData perron_data(const IntMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw SemanticError("perron data needs a square matrix");
  if (!is_irreducible(m))
    throw NotIrreducible("matrix is not irreducible");
  const Eigen::MatrixXd a = m.to_double();
  EigenPair right = dominant_eigenpair(a);
  EigenPair left = dominant_eigenpair(a.transpose());
  if (!right.ok || !left.ok || !(right.theta > 0))
    throw NoConvergence("Perron iteration failed to converge");

  double theta = right.theta;
  const long long snapped = std::llround(theta);
  if (std::abs(theta - snapped) < 1e-6 && snapped >= 1 &&
      is_integer_eigenvalue(m, snapped))
    theta = static_cast<double>(snapped);

  PerronData out;
  out.theta = theta;
  out.right = right.vec / right.vec.sum();
  out.left = left.vec / left.vec.dot(out.right);
  out.residual = std::max(
      (a * out.right - theta * out.right).lpNorm<Eigen::Infinity>(),
      (a.transpose() * out.left - theta * out.left).lpNorm<Eigen::Infinity>());
  if (out.residual > 1e-9 * theta)
    throw NoConvergence("Perron residual above tolerance");
  return out;
}

std::vector<double> natural_lengths(const RuleSpec& rule) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation &&
      rule.kind != RuleKind::Block)
    throw SemanticError("natural lengths need a substitution-type rule");
  const auto verdict = is_primitive(rule);
  if (verdict.verdict != Primitivity::Primitive)
    throw NotPrimitive("rule " + rule.name + " is not primitive");
  const int m = rule.alphabet.size();
  if (rule.is_constant_length() || rule.kind == RuleKind::Block)
    return std::vector<double>(m, 1.0);
  const PerronData pd = perron_data(transition_matrix(rule));
  const double shortest = pd.left.minCoeff();
  std::vector<double> lengths(m);
  for (int i = 0; i < m; ++i) lengths[i] = pd.left[i] / shortest;
  return lengths;
}

std::vector<double> letter_frequencies(const RuleSpec& rule) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation &&
      rule.kind != RuleKind::Block)
    throw SemanticError("letter frequencies need a substitution-type rule");
  const auto verdict = is_primitive(rule);
  if (verdict.verdict != Primitivity::Primitive)
    throw NotPrimitive("rule " + rule.name + " is not primitive");
  const int m = rule.alphabet.size();
  const IntMatrix mat = transition_matrix(rule);
  const std::vector<double> vol = rule_volumes(rule);
  if (rule.kind != RuleKind::Inflation) {
    // Equal row sums force the uniform eigenvector exactly.
    bool equal_rows = true;
    BigInt row0 = 0;
    for (int j = 0; j < m; ++j) row0 += mat(0, j);
    for (int i = 1; i < m && equal_rows; ++i) {
      BigInt row = 0;
      for (int j = 0; j < m; ++j) row += mat(i, j);
      equal_rows = row == row0;
    }
    if (equal_rows) return std::vector<double>(m, 1.0 / m);
  }
  const PerronData pd = perron_data(mat);
  double scale = 0;
  for (int i = 0; i < m; ++i) scale += pd.right[i] * vol[i];
  std::vector<double> freq(m);
  for (int i = 0; i < m; ++i) freq[i] = pd.right[i] / scale;
  return freq;
}

std::vector<double> empirical_frequencies(const RuleSpec& rule, int seed,
                                          int n) {
  const int m = rule.alphabet.size();
  if (seed < 0 || seed >= m) throw UnknownSymbol("seed letter out of range");
  const IntMatrix counts = matrix_product(rule, 0, n);
  BigInt total = 0;
  for (int i = 0; i < counts.rows(); ++i) total += counts(i, seed);
  std::vector<double> freq(counts.rows());
  for (int i = 0; i < counts.rows(); ++i)
    freq[i] = big_ratio(counts(i, seed), total);
  return freq;
}

namespace {

struct NormalizedColumns {
  std::vector<std::vector<double>> rho;  // per seed column
  double spread = 0;
  int max_volume_seed = 0;
};

NormalizedColumns normalize_columns(const IntMatrix& prod,
                                    const std::vector<BigInt>& vol_n) {
  NormalizedColumns out;
  const auto col_vol = [&](int j) {
    BigInt v = 0;
    for (int i = 0; i < prod.rows(); ++i) v += prod(i, j) * vol_n[i];
    return v;
  };
  BigInt best_vol = -1;
  for (int j = 0; j < prod.cols(); ++j) {
    const BigInt v = col_vol(j);
    std::vector<double> rho(prod.rows());
    for (int i = 0; i < prod.rows(); ++i) rho[i] = big_ratio(prod(i, j), v);
    out.rho.push_back(std::move(rho));
    if (v > best_vol) {
      best_vol = v;
      out.max_volume_seed = j;
    }
  }
  for (std::size_t a = 0; a < out.rho.size(); ++a)
    for (std::size_t b = a + 1; b < out.rho.size(); ++b)
      for (std::size_t i = 0; i < out.rho[a].size(); ++i)
        out.spread =
            std::max(out.spread, std::abs(out.rho[a][i] - out.rho[b][i]));
  return out;
}

}  // namespace

FrequencySequence frequency_sequence(const RuleSpec& rule, int depth) {
  if (rule.kind != RuleKind::Fusion && rule.kind != RuleKind::VectorFusion)
    throw SemanticError("frequency sequences need a fusion rule");
  if (depth < 3) throw DepthTooShallow("need depth >= 3");

  std::vector<IntMatrix> level_matrix(depth + 1);  // level_matrix[k] = M_{k-1,k}
  for (int k = 1; k <= depth; ++k) level_matrix[k] = transition_matrix(rule, k);

  std::vector<std::vector<BigInt>> volumes(depth + 1);
  volumes[0].assign(fusion_type_count(rule, 0), 1);
  for (int k = 1; k <= depth; ++k) {
    const IntMatrix& mk = level_matrix[k];
    volumes[k].assign(mk.cols(), 0);
    for (int j = 0; j < mk.cols(); ++j)
      for (int i = 0; i < mk.rows(); ++i)
        volumes[k][j] += mk(i, j) * volumes[k - 1][i];
  }

  // Running suffix products M_{n,depth} and M_{n,depth-1}, built backwards.
  FrequencySequence out;
  out.depth = depth;
  IntMatrix to_full = IntMatrix::identity(fusion_type_count(rule, depth));
  IntMatrix to_prev = IntMatrix::identity(fusion_type_count(rule, depth - 1));
  std::vector<FrequencySequence::Level> levels;
  for (int n = depth - 1; n >= 0; --n) {
    to_full = level_matrix[n + 1] * to_full;
    if (n < depth - 1) to_prev = level_matrix[n + 1] * to_prev;
    const NormalizedColumns full = normalize_columns(to_full, volumes[n]);
    FrequencySequence::Level lv;
    lv.n = n;
    lv.rho = full.rho[full.max_volume_seed];
    lv.spread = full.spread;
    if (n == 0) {
      // The level-0 spread is the most converged diagnostic; require it to
      // be stable between the two deepest horizons.
      const NormalizedColumns prev = normalize_columns(to_prev, volumes[n]);
      if (std::abs(prev.spread - full.spread) >
          std::max(1e-6, 0.25 * std::max(prev.spread, full.spread)))
        throw DepthTooShallow("column spread has not stabilized; "
                              "increase the depth");
    }
    levels.push_back(std::move(lv));
  }
  std::reverse(levels.begin(), levels.end());
  out.levels = std::move(levels);
  return out;
}

long long count_patch(const LatticePatch& host, const LatticePatch& patch) {
  if (patch.cells.empty()) return 0;
  const auto& [anchor_pos, anchor_letter] = *patch.cells.begin();
  long long count = 0;
  std::vector<long long> probe;
  for (const auto& [pos, letter] : host.cells) {
    if (letter != anchor_letter) continue;
    bool match = true;
    for (const auto& [ppos, pletter] : patch.cells) {
      probe = pos;
      for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] += ppos[i] - anchor_pos[i];
      auto it = host.cells.find(probe);
      if (it == host.cells.end() || it->second != pletter) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }
  return count;
}

PatchFrequencyReport patch_frequency(const RuleSpec& rule,
                                     const LatticePatch& patch, int depth) {
  if (depth < 2) throw DepthTooShallow("need depth >= 2");
  // Estimate rho at the requested levels from a deeper horizon.
  int horizon = depth + 24;
  if (rule.kind == RuleKind::Fusion && !rule.fusion.has_repeat())
    horizon = std::min<int>(horizon,
                            static_cast<int>(rule.fusion.levels.size()));
  if (horizon <= depth)
    throw LevelOutOfRange("rule is not scripted past the requested depth");
  const FrequencySequence fs = frequency_sequence(rule, horizon);
  if (fs.levels[depth].spread > 1e-6)
    throw NotConverged("frequency sequence spread exceeds 1e-6; the "
                       "invariant measure is not unique at this depth");

  PatchFrequencyReport report;
  for (int n = depth - 2; n <= depth; ++n) {
    double partial = 0;
    const auto& rho = fs.levels[n].rho;
    for (int i = 0; i < static_cast<int>(rho.size()); ++i)
      partial += static_cast<double>(
                     count_patch(fusion_supertile(rule, i, n), patch)) *
                 rho[i];
    report.partials.emplace_back(n, partial);
  }
  report.value = report.partials.back().second;
  report.cauchy_gap = std::max(
      std::abs(report.partials[2].second - report.partials[1].second),
      std::abs(report.partials[1].second - report.partials[0].second));
  return report;
}

std::vector<BigInt> char_poly(const IntMatrix& m) {
  if (m.rows() != m.cols())
    throw SemanticError("characteristic polynomial of a non-square matrix");
  const int n = m.rows();
  // Faddeev-LeVerrier: exact over the integers, every division is exact.
  std::vector<BigInt> coeffs(n + 1);
  coeffs[0] = 1;
  IntMatrix b = IntMatrix::identity(n);  // B_0 = I
  for (int k = 1; k <= n; ++k) {
    if (k > 1) {
      for (int i = 0; i < n; ++i) b(i, i) += coeffs[k - 1];
      b = m * b;
    } else {
      b = m;
    }
    BigInt trace = 0;
    for (int i = 0; i < n; ++i) trace += b(i, i);
    coeffs[k] = -trace / k;
  }
  return coeffs;
}

}  // namespace tilespec
