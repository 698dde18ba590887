#include "tilespec/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tilespec/common.hpp"
#include "tilespec/supertile.hpp"

namespace tilespec {

std::string to_string(PisotClass c) {
  switch (c) {
    case PisotClass::Integer: return "integer";
    case PisotClass::Pisot: return "pisot";
    case PisotClass::NonPisot: return "non_pisot";
    case PisotClass::SalemBoundary: return "salem_boundary";
  }
  return "?";
}

std::string to_string(Ternary t) {
  switch (t) {
    case Ternary::Yes: return "yes";
    case Ternary::No: return "no";
    case Ternary::Undetermined: return "undetermined";
  }
  return "?";
}

std::string to_string(TestVerdict v) {
  switch (v) {
    case TestVerdict::Pass: return "pass";
    case TestVerdict::Fail: return "fail";
    case TestVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(MixingVerdict v) {
  switch (v) {
    case MixingVerdict::NotWeaklyMixing: return "not_weakly_mixing";
    case MixingVerdict::WeaklyMixing: return "weakly_mixing";
    case MixingVerdict::Undetermined: return "undetermined";
  }
  return "?";
}

namespace {

BigInt eval_int_poly(const std::vector<BigInt>& coeffs, const BigInt& x) {
  BigInt acc = 0;
  for (const BigInt& c : coeffs) acc = acc * x + c;
  return acc;
}

std::vector<std::complex<double>> poly_roots(const std::vector<BigInt>& cp) {
  const int n = static_cast<int>(cp.size()) - 1;
  if (n == 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i)
    comp(i, n - 1) = -static_cast<double>(Real100(cp[n - i]));
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
  std::vector<std::complex<double>> roots;
  for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

bool has_integer_root(const std::vector<BigInt>& cp, BigInt* root_out) {
  const BigInt& tail = cp.back();
  if (tail == 0) {
    if (root_out) *root_out = 0;
    return true;
  }
  // Monic integer polynomial: every rational root is an integer divisor of
  // the constant term.
  BigInt a = abs(tail);
  for (BigInt d = 1; d * d <= a; ++d) {
    if (a % d != 0) continue;
    const BigInt e = a / d;
    for (const BigInt& cand : {BigInt(d), BigInt(-d), e, BigInt(-e)}) {
      if (eval_int_poly(cp, cand) == 0) {
        if (root_out) *root_out = cand;
        return true;
      }
    }
  }
  return false;
}

double dist_to_int(const Real100& x) {
  const Real100 f = x - floor(x);
  const Real100 d = f < Real100(0.5) ? f : Real100(1) - f;
  return static_cast<double>(d);
}

// Verdict from the truncated distance sequence: the tail is the evidence.
TestVerdict tail_verdict(const std::vector<std::pair<int, double>>& distances,
                         double tol) {
  const int count = static_cast<int>(distances.size());
  const int tail_len = std::max(3, count / 4);
  std::vector<double> tail;
  for (int i = std::max(0, count - tail_len); i < count; ++i)
    tail.push_back(distances[i].second);
  if (*std::max_element(tail.begin(), tail.end()) < tol)
    return TestVerdict::Pass;
  std::vector<double> sorted = tail;
  std::sort(sorted.begin(), sorted.end());
  if (sorted[sorted.size() / 2] >= tol) return TestVerdict::Fail;
  return TestVerdict::Inconclusive;
}

double decay_rate(const std::vector<std::pair<int, double>>& distances) {
  double first = 0, last = 0;
  int n_first = 0, n_last = 0;
  for (const auto& [n, d] : distances)
    if (d > 0) {
      if (first == 0) {
        first = d;
        n_first = n;
      }
      last = d;
      n_last = n;
    }
  if (first <= 0 || n_last <= n_first) return 0;
  return std::pow(last / first, 1.0 / (n_last - n_first));
}

}  // namespace

AlgebraicVerdict algebraic_verdict(const IntMatrix& m) {
  AlgebraicVerdict out;
  out.char_poly = char_poly(m);
  auto roots = poly_roots(out.char_poly);

  double best_mod = 0;
  for (const auto& r : roots) best_mod = std::max(best_mod, std::abs(r));
  int perron_idx = -1;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    if (std::abs(roots[i]) < best_mod * (1 - 1e-9)) continue;
    const bool real_pos = std::abs(roots[i].imag()) < 1e-9 * (best_mod + 1) &&
                          roots[i].real() > 0;
    if (perron_idx < 0 || real_pos) perron_idx = i;
    if (real_pos) break;
  }
  out.perron_root = perron_idx >= 0 ? roots[perron_idx].real() : 0;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i)
    if (i != perron_idx) out.conjugate_moduli.push_back(std::abs(roots[i]));
  std::sort(out.conjugate_moduli.begin(), out.conjugate_moduli.end());

  const long long snapped = std::llround(out.perron_root);
  const bool integer_root =
      std::abs(out.perron_root - snapped) < 1e-6 && snapped >= 1 &&
      eval_int_poly(out.char_poly, snapped) == 0;
  bool salem = false, all_inside = true;
  for (double mod : out.conjugate_moduli) {
    if (std::abs(mod - 1.0) <= 1e-9) salem = true;
    // Moduli below 1e-9 are spurious zero factors of the characteristic
    // polynomial, not conjugates of the Perron root.
    if (mod > 1e-9 && mod >= 1.0 - 1e-9) all_inside = false;
  }
  if (integer_root) {
    out.perron_root = static_cast<double>(snapped);
    out.classification = PisotClass::Integer;
  } else if (salem) {
    out.classification = PisotClass::SalemBoundary;
  } else if (all_inside) {
    out.classification = PisotClass::Pisot;
  } else {
    out.classification = PisotClass::NonPisot;
  }

  const int degree = static_cast<int>(out.char_poly.size()) - 1;
  if (degree == 1) {
    out.irreducible_over_q = Ternary::Yes;
  } else if (has_integer_root(out.char_poly, nullptr)) {
    out.irreducible_over_q = Ternary::No;
  } else if (degree <= 3) {
    // Monic of degree 2 or 3 without a rational root has no linear factor,
    // and any proper factorization would contain one.
    out.irreducible_over_q = Ternary::Yes;
  } else {
    out.irreducible_over_q = Ternary::Undetermined;
  }
  return out;
}

HeightResult dekking_height(const RuleSpec& rule, long long prefix_len) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw NotConstantLength("height needs a symbolic substitution");
  if (!rule.is_constant_length())
    throw NotConstantLength("height is defined for constant-length rules");
  const SymbolicPayload& sigma = rule.sigma();
  const int m = rule.alphabet.size();
  for (int a = 0; a < m; ++a)
    if (sigma.images[a].empty())
      throw NoFixedPoint("letter " + rule.alphabet.symbol(a) +
                         " has an empty image");

  // A one-sided fixed point of sigma^t exists for any letter on a cycle of
  // the first-letter map.
  int seed = -1, t = 0;
  for (int a = 0; a < m && seed < 0; ++a) {
    int cur = a;
    for (int steps = 1; steps <= m; ++steps) {
      cur = sigma.images[cur][0];
      if (cur == a) {
        seed = a;
        t = steps;
        break;
      }
    }
  }
  if (seed < 0) throw NoFixedPoint("no power of the rule has a fixed point");

  const long long base = std::max<long long>(prefix_len, 16);
  Word w;
  w.letters = {seed};
  while (static_cast<long long>(w.letters.size()) < 4 * base)
    for (int i = 0; i < t; ++i) w = apply_sigma(sigma, w);

  const int q = rule.constant_length();
  auto height_at = [&](long long len) {
    long long g = 0;
    for (long long i = 1; i < len; ++i)
      if (w.letters[i] == w.letters[0]) g = std::gcd(g, i);
    if (g == 0) return 1LL;
    // Largest divisor of g coprime to q.
    for (long long d = std::gcd(g, (long long)q); d > 1;
         d = std::gcd(g, (long long)q))
      g /= d;
    return g;
  };
  const long long h1 = height_at(base);
  const long long h2 = height_at(2 * base);
  const long long h4 = height_at(4 * base);
  if (h1 != h2 || h2 != h4)
    throw NotConverged("height did not stabilize across prefix doublings");

  HeightResult out;
  out.height = static_cast<int>(h4);
  out.q = q;
  out.prefix_len = base;
  for (long long p = 1; p <= base / 2 && !out.periodic_warning; ++p) {
    bool periodic = true;
    for (long long i = 0; i + p < base; ++i)
      if (w.letters[i] != w.letters[i + p]) {
        periodic = false;
        break;
      }
    out.periodic_warning = periodic;
  }
  return out;
}

CoincidenceResult coincidence(const RuleSpec& rule, int max_power) {
  CoincidenceResult out;
  out.mode = "plain";
  const int m = rule.alphabet.size();
  const bool block = rule.kind == RuleKind::Block;
  if (!block) {
    if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
      throw SemanticError("coincidence needs a substitution-type rule");
    if (!rule.is_constant_length())
      throw NotConstantLength("coincidence needs a constant-length rule");
  }
  for (int k = 1; k <= max_power; ++k) {
    std::vector<std::vector<int>> images;
    for (int a = 0; a < m; ++a)
      images.push_back(block ? superblock(rule, a, k).cells
                             : superword(rule, a, k).letters);
    for (std::size_t l = 0; l < images[0].size(); ++l) {
      bool same = true;
      for (int a = 1; a < m && same; ++a) same = images[a][l] == images[0][l];
      if (same) {
        out.found = true;
        out.power = k;
        out.position = static_cast<long long>(l);
        return out;
      }
    }
  }
  return out;
}

CoincidenceResult strong_coincidence(const RuleSpec& rule, int max_power) {
  CoincidenceResult out;
  out.mode = "strong";
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw SemanticError("strong coincidence needs a 1-D symbolic rule");
  const int m = rule.alphabet.size();
  for (int k = 1; k <= max_power; ++k) {
    std::vector<std::vector<int>> images;
    std::size_t min_len = SIZE_MAX;
    for (int a = 0; a < m; ++a) {
      images.push_back(superword(rule, a, k).letters);
      min_len = std::min(min_len, images.back().size());
    }
    std::vector<std::vector<long long>> prefix_counts(
        m, std::vector<long long>(m, 0));
    for (std::size_t l = 0; l < min_len; ++l) {
      bool same = true;
      for (int a = 1; a < m && same; ++a) {
        same = images[a][l] == images[0][l] &&
               prefix_counts[a] == prefix_counts[0];
      }
      if (same) {
        out.found = true;
        out.power = k;
        out.position = static_cast<long long>(l);
        return out;
      }
      for (int a = 0; a < m; ++a) ++prefix_counts[a][images[a][l]];
    }
  }
  return out;
}

BijectivityResult is_bijective(const RuleSpec& rule) {
  BijectivityResult out;
  const int m = rule.alphabet.size();
  int cells = 0;
  if (rule.kind == RuleKind::Block) {
    cells = rule.block.cell_count();
  } else if ((rule.kind == RuleKind::Symbolic ||
              rule.kind == RuleKind::Inflation) &&
             rule.is_constant_length()) {
    cells = rule.constant_length();
  } else {
    throw SemanticError("bijectivity needs a block or constant-length rule");
  }
  out.bijective = true;
  for (int k = 0; k < cells; ++k) {
    std::vector<int> column(m);
    std::vector<bool> hit(m, false);
    for (int j = 0; j < m; ++j) {
      const int image = rule.kind == RuleKind::Block ? rule.block.blocks[j][k]
                                                     : rule.sigma().images[j][k];
      column[j] = image;
      if (hit[image]) out.bijective = false;
      hit[image] = true;
    }
    out.table.push_back(std::move(column));
  }
  return out;
}

EigenvalueTestReport host_test(const RuleSpec& rule, const Real100& alpha,
                               int p, int n_max, double tol) {
  if (p < 1) throw SemanticError("power p must be >= 1");
  EigenvalueTestReport out;
  out.alpha = alpha.str(30);
  const IntMatrix m = transition_matrix(rule);
  const int size = m.rows();
  // lengths[j] = |sigma^{pn}(a_j)|, advanced exactly via v <- (M^T)^p v.
  std::vector<BigInt> lengths(size, 1);
  for (int n = 1; n <= n_max; ++n) {
    for (int step = 0; step < p; ++step) {
      std::vector<BigInt> next(size, 0);
      for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) next[j] += m(i, j) * lengths[i];
      lengths = std::move(next);
    }
    double worst = 0;
    for (int j = 0; j < size; ++j)
      worst = std::max(worst, dist_to_int(alpha * Real100(lengths[j])));
    out.distances.emplace_back(n, worst);
  }
  out.verdict = tail_verdict(out.distances, tol);
  if (out.verdict == TestVerdict::Pass) out.rate = decay_rate(out.distances);
  return out;
}

Real100 perron_root_hp(const IntMatrix& m) {
  const std::vector<BigInt> cp = char_poly(m);
  const int n = static_cast<int>(cp.size()) - 1;
  Real100 x(perron_data(m).theta);
  for (int iter = 0; iter < 200; ++iter) {
    Real100 val = 0, deriv = 0;
    for (int i = 0; i <= n; ++i) {
      if (i < n) deriv = deriv * x + Real100(cp[i]) * (n - i);
      val = val * x + Real100(cp[i]);
    }
    if (deriv == 0) break;
    const Real100 step = val / deriv;
    x -= step;
    if (abs(step) < Real100("1e-90") * abs(x)) break;
  }
  return x;
}

std::vector<Real100> natural_lengths_hp(const RuleSpec& rule) {
  const IntMatrix m = transition_matrix(rule);
  const Real100 theta = perron_root_hp(m);
  const int size = m.rows();
  std::vector<Real100> l(size, 1);
  // Left-eigenvector iteration; components off the Perron direction decay
  // by |lambda_2/theta| per step.
  for (int iter = 0; iter < 400; ++iter) {
    std::vector<Real100> next(size, 0);
    for (int j = 0; j < size; ++j)
      for (int i = 0; i < size; ++i)
        next[j] += Real100(m(i, j)) * l[i];
    for (Real100& v : next) v /= theta;
    l = std::move(next);
  }
  Real100 shortest = l[0];
  for (const Real100& v : l) shortest = std::min(shortest, v);
  for (Real100& v : l) v /= shortest;
  return l;
}

EigenvalueTestReport selfsimilar_eigen_test(const RuleSpec& rule,
                                            const Real100& alpha, int n_max,
                                            double tol) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw SemanticError("self-similar test needs a 1-D rule");
  EigenvalueTestReport out;
  out.alpha = alpha.str(30);
  const Real100 theta = perron_root_hp(transition_matrix(rule));
  std::vector<Real100> lengths;
  if (rule.kind == RuleKind::Inflation && !rule.inflation.lengths_auto)
    for (double v : rule.inflation.lengths) lengths.emplace_back(v);
  else
    lengths = natural_lengths_hp(rule);

  // Return vectors: differences between consecutive same-type tiles in a
  // superword long enough to give a meaningful sample.
  int level = 0;
  Word w;
  w.letters = {0};
  while (w.letters.size() < 256 && level < 24) {
    w = apply_sigma(rule.sigma(), w);
    ++level;
  }
  const int m = rule.alphabet.size();
  std::vector<Real100> last_pos(m, -1);
  std::vector<bool> seen(m, false);
  std::vector<Real100> sample;
  Real100 pos = 0;
  for (int letter : w.letters) {
    if (seen[letter] && sample.size() < 64) {
      const Real100 diff = pos - last_pos[letter];
      bool dup = false;
      for (const Real100& s : sample)
        if (abs(s - diff) < Real100("1e-60")) dup = true;
      if (!dup) sample.push_back(diff);
    }
    seen[letter] = true;
    last_pos[letter] = pos;
    pos += lengths[letter];
  }
  if (sample.empty())
    throw EmptyReturnSample("no repeated tile type in the sampled supertile");

  Real100 scale = 1;
  for (int n = 0; n <= n_max; ++n) {
    double worst = 0;
    for (const Real100& x : sample)
      worst = std::max(worst, dist_to_int(alpha * scale * x));
    out.distances.emplace_back(n, worst);
    scale *= theta;
  }

  // Evidence rule: exact smallness everywhere, or a small final value
  // reached through a mostly-decreasing sequence.
  bool all_below = true;
  int dec = 0;
  for (std::size_t i = 0; i < out.distances.size(); ++i) {
    if (out.distances[i].second >= tol) all_below = false;
    if (i > 0 && out.distances[i].second < out.distances[i - 1].second) ++dec;
  }
  const double final_d = out.distances.back().second;
  double max_d = 0;
  for (const auto& [n, d] : out.distances) max_d = std::max(max_d, d);
  if (all_below ||
      (final_d < tol &&
       dec * 2 >= static_cast<int>(out.distances.size()) - 1)) {
    out.verdict = TestVerdict::Pass;
    out.rate = decay_rate(out.distances);
  } else if (max_d >= 1000 * tol) {
    out.verdict = TestVerdict::Fail;
  } else {
    out.verdict = TestVerdict::Inconclusive;
  }
  return out;
}

std::complex<double> eigenfunction_profile(const RuleSpec& rule, int n,
                                           long long j) {
  if (!rule.is_constant_length() ||
      (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation))
    throw NotConstantLength("eigenfunction profile needs constant length");
  if (n < 0 || j < 0) throw SemanticError("level and shift must be >= 0");
  BigInt qn = 1;
  for (int i = 0; i < n; ++i) qn *= rule.constant_length();
  const BigInt r = BigInt(j) % qn;
  const double phase = 2.0 * std::numbers::pi * big_ratio(r, qn);
  return {std::cos(phase), std::sin(phase)};
}

MixingVerdict weak_mixing_verdict(const RuleSpec& rule) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw SemanticError("weak-mixing verdict needs a 1-D rule");
  const AlgebraicVerdict av = algebraic_verdict(transition_matrix(rule));
  switch (av.classification) {
    case PisotClass::Integer:
    case PisotClass::Pisot:
      return MixingVerdict::NotWeaklyMixing;
    case PisotClass::NonPisot:
      return MixingVerdict::WeaklyMixing;
    case PisotClass::SalemBoundary:
      return MixingVerdict::Undetermined;
  }
  return MixingVerdict::Undetermined;
}

}  // namespace tilespec
