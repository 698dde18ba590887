#include "tilespec/diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "tilespec/common.hpp"

namespace tilespec {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

void check_weights(const std::vector<Complex>& weights, int alphabet_size) {
  if (static_cast<int>(weights.size()) != alphabet_size)
    throw SemanticError("need one weight per alphabet symbol");
}

// Letter on a cycle of the first-letter map, plus the power making it a
// one-sided fixed-point seed.
std::pair<int, int> fixed_point_seed(const RuleSpec& rule) {
  const SymbolicPayload& sigma = rule.sigma();
  const int m = static_cast<int>(sigma.images.size());
  for (int a = 0; a < m; ++a) {
    if (sigma.images[a].empty())
      throw NoFixedPoint("empty image blocks fixed-point construction");
    int cur = a;
    for (int steps = 1; steps <= m; ++steps) {
      cur = sigma.images[cur][0];
      if (cur == a) return {a, steps};
    }
  }
  throw NoFixedPoint("no power of the rule fixes a first letter");
}

}  // namespace

WeightedComb comb_from_word(const Word& word,
                            const std::vector<Complex>& weights) {
  if (word.letters.empty()) throw SemanticError("empty patch has no comb");
  WeightedComb comb;
  comb.dim = 1;
  for (std::size_t n = 0; n < word.letters.size(); ++n)
    comb.points.push_back(
        {{static_cast<double>(n)}, weights.at(word.letters[n])});
  comb.window_volume = static_cast<double>(word.letters.size());
  return comb;
}

WeightedComb comb_from_block(const Block& block,
                             const std::vector<Complex>& weights) {
  if (block.cells.empty()) throw SemanticError("empty patch has no comb");
  WeightedComb comb;
  comb.dim = static_cast<int>(block.extents.size());
  std::size_t flat = 0;
  std::vector<long long> coord(comb.dim, 0);
  for (int cell : block.cells) {
    std::vector<double> pos(comb.dim);
    for (int i = 0; i < comb.dim; ++i) pos[i] = static_cast<double>(coord[i]);
    comb.points.push_back({std::move(pos), weights.at(cell)});
    ++flat;
    for (int i = 0; i < comb.dim; ++i) {
      if (++coord[i] < block.extents[i]) break;
      coord[i] = 0;
    }
  }
  std::sort(comb.points.begin(), comb.points.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  comb.window_volume = 1;
  for (int e : block.extents) comb.window_volume *= e;
  return comb;
}

WeightedComb comb_from_interval(const IntervalPatch& patch,
                                const std::vector<Complex>& weights) {
  if (patch.tiles.empty()) throw SemanticError("empty patch has no comb");
  WeightedComb comb;
  comb.dim = 1;
  for (const IntervalTile& t : patch.tiles)
    comb.points.push_back({{t.left}, weights.at(t.letter)});
  comb.window_volume = patch.total_length();
  return comb;
}

Word fixed_point_prefix(const RuleSpec& rule, std::uint64_t length,
                        std::uint64_t cap) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw SemanticError("fixed points need a 1-D symbolic rule");
  const auto [seed, power] = fixed_point_seed(rule);
  Word w;
  w.letters = {seed};
  while (w.letters.size() < length) {
    for (int i = 0; i < power; ++i) w = apply_sigma(rule.sigma(), w, cap);
    if (w.letters.size() == 1)
      throw NoFixedPoint("fixed point does not grow (letter maps to itself)");
  }
  w.letters.resize(length);
  return w;
}

Complex correlation(const RuleSpec& rule, const std::vector<Complex>& weights,
                    long long k, std::uint64_t window, std::uint64_t cap) {
  check_weights(weights, rule.alphabet.size());
  if (window == 0) throw SemanticError("window must be positive");
  const std::uint64_t shift = static_cast<std::uint64_t>(k < 0 ? -k : k);
  const Word prefix = fixed_point_prefix(rule, window + shift, cap);
  Complex sum = 0;
  for (std::uint64_t n = 0; n < window; ++n)
    sum += weights[prefix.letters[n + shift]] *
           std::conj(weights[prefix.letters[n]]);
  sum /= static_cast<double>(window);
  return k < 0 ? std::conj(sum) : sum;
}

AutocorrMeasure autocorrelation(const WeightedComb& comb,
                                long long max_offset) {
  AutocorrMeasure out;
  out.window_volume = comb.window_volume;
  std::map<std::vector<long long>, Complex> index;
  for (const auto& [pos, w] : comb.points) {
    std::vector<long long> key(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      key[i] = std::llround(pos[i]);
      if (std::abs(pos[i] - static_cast<double>(key[i])) > 1e-9)
        throw SemanticError("autocorrelation needs integer positions");
    }
    index.emplace(std::move(key), w);
  }
  std::vector<long long> z(comb.dim, -max_offset);
  while (true) {
    Complex sum = 0;
    std::vector<long long> probe(comb.dim);
    for (const auto& [pos, w] : index) {
      for (int i = 0; i < comb.dim; ++i) probe[i] = pos[i] + z[i];
      auto it = index.find(probe);
      if (it != index.end()) sum += it->second * std::conj(w);
    }
    out.atoms[z] = sum / comb.window_volume;
    int i = 0;
    for (; i < comb.dim; ++i) {
      if (++z[i] <= max_offset) break;
      z[i] = -max_offset;
    }
    if (i == comb.dim) break;
  }
  return out;
}

double intensity(const WeightedComb& comb, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != comb.dim)
    throw SemanticError("frequency dimension mismatch");
  Complex c = 0;
  for (const auto& [pos, w] : comb.points) {
    double dot = 0;
    for (int i = 0; i < comb.dim; ++i) dot += xi[i] * pos[i];
    // Reduce mod 1 before scaling: keeps lattice phases exact.
    const double phase = -kTau * std::fmod(dot, 1.0);
    c += w * Complex(std::cos(phase), std::sin(phase));
  }
  c /= comb.window_volume;
  return std::norm(c);
}

IntensityReport intensity_sequence(const RuleSpec& rule,
                                   const std::vector<Complex>& weights,
                                   double xi,
                                   const std::vector<std::uint64_t>& windows,
                                   std::uint64_t cap) {
  check_weights(weights, rule.alphabet.size());
  if (windows.size() < 3) throw SemanticError("need at least 3 window sizes");
  if (!std::is_sorted(windows.begin(), windows.end()))
    throw SemanticError("window sizes must be increasing");
  const Word prefix = fixed_point_prefix(rule, windows.back(), cap);
  IntensityReport report;
  report.xi = {xi};
  for (std::uint64_t n : windows) {
    Complex c = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double phase = -kTau * xi * static_cast<double>(i);
      c += weights[prefix.letters[i]] * Complex(std::cos(phase), std::sin(phase));
    }
    c /= static_cast<double>(n);
    report.per_window.emplace_back(n, std::norm(c));
  }
  for (std::size_t i = 1; i < report.per_window.size(); ++i)
    report.gaps.push_back(std::abs(report.per_window[i].second -
                                   report.per_window[i - 1].second));
  report.value = report.per_window.back().second;
  return report;
}

ImageResult diffraction_image(const RuleSpec& rule,
                              const std::vector<Complex>& weights, int letter,
                              int level, int grid, double gamma, int threads,
                              std::uint64_t cap) {
  if (rule.kind != RuleKind::Block || rule.dimension != 2)
    throw SemanticError("diffraction images need a 2-D block rule");
  check_weights(weights, rule.alphabet.size());
  if (grid < 1 || grid > 2048) throw SemanticError("grid must be in [1,2048]");
  const Block block = superblock(rule, letter, level, cap);
  const int ex = block.extents[0], ey = block.extents[1];

  std::vector<Complex> twiddle(grid);
  for (int a = 0; a < grid; ++a) {
    const double phase = -kTau * a / grid;
    twiddle[a] = {std::cos(phase), std::sin(phase)};
  }

  // Factorized direct sum: per-row transforms first, then the column pass.
  std::vector<Complex> row(static_cast<std::size_t>(ey) * grid);
  auto row_work = [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int u = 0; u < grid; ++u) {
        Complex acc = 0;
        for (int x = 0; x < ex; ++x)
          acc += weights[block.cells[x + static_cast<std::size_t>(ex) * y]] *
                 twiddle[(static_cast<long long>(u) * x) % grid];
        row[static_cast<std::size_t>(y) * grid + u] = acc;
      }
  };
  ImageResult out;
  out.grid = grid;
  out.intensities.resize(static_cast<std::size_t>(grid) * grid);
  const double volume = static_cast<double>(ex) * ey;
  auto col_work = [&](int v0, int v1) {
    for (int v = v0; v < v1; ++v)
      for (int u = 0; u < grid; ++u) {
        Complex acc = 0;
        for (int y = 0; y < ey; ++y)
          acc += row[static_cast<std::size_t>(y) * grid + u] *
                 twiddle[(static_cast<long long>(v) * y) % grid];
        out.intensities[static_cast<std::size_t>(v) * grid + u] =
            std::norm(acc / volume);
      }
  };

  const int workers = std::max(1, threads);
  auto run_parallel = [&](int total, auto&& work) {
    if (workers == 1) {
      work(0, total);
      return;
    }
    std::vector<std::thread> pool;
    const int chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  };
  run_parallel(ey, row_work);
  run_parallel(grid, col_work);

  out.max_intensity =
      *std::max_element(out.intensities.begin(), out.intensities.end());
  out.pixels.resize(out.intensities.size());
  for (std::size_t i = 0; i < out.intensities.size(); ++i) {
    const double ratio =
        out.max_intensity > 0 ? out.intensities[i] / out.max_intensity : 0.0;
    out.pixels[i] =
        static_cast<std::uint8_t>(std::lround(255.0 * std::pow(ratio, gamma)));
  }
  return out;
}

std::string encode_pgm(const ImageResult& image) {
  std::ostringstream os;
  os << "P5\n" << image.grid << " " << image.grid << "\n255\n";
  os.write(reinterpret_cast<const char*>(image.pixels.data()),
           static_cast<std::streamsize>(image.pixels.size()));
  return os.str();
}

std::string encode_ppm(const ImageResult& image) {
  std::ostringstream os;
  os << "P6\n" << image.grid << " " << image.grid << "\n255\n";
  for (std::uint8_t t : image.pixels) {
    // Fixed blue-to-yellow ramp; display only, never measured.
    const std::uint8_t rgb[3] = {
        t, static_cast<std::uint8_t>((t * t) / 255),
        static_cast<std::uint8_t>(255 - t)};
    os.write(reinterpret_cast<const char*>(rgb), 3);
  }
  return os.str();
}

std::vector<Peak> peak_scan(const RuleSpec& rule,
                            const std::vector<Complex>& weights, int level,
                            double threshold) {
  if ((rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation) ||
      !rule.is_constant_length())
    throw NotConstantLength("peak scan needs a constant-length 1-D rule");
  check_weights(weights, rule.alphabet.size());
  if (level < 1 || level > 24) throw SemanticError("level must be in [1,24]");
  const int q = rule.constant_length();
  long long denom = 1;
  for (int i = 0; i < level; ++i) {
    denom *= q;
    if (denom > (1LL << 22))
      throw LevelOverflow("too many q-adic candidates at this level");
  }
  const SymbolicPayload& sigma = rule.sigma();
  const int m = rule.alphabet.size();
  int seed = 0;
  for (int a = 0; a < m; ++a)
    if (!sigma.images[a].empty() && sigma.images[a][0] == a) {
      seed = a;
      break;
    }

  // Evaluate over a window q^W deeper than the candidate level so the
  // per-candidate averages are converged; for k - 1 >= level the extra
  // phases are exact integers and drop out.
  const int window_exp = std::max(level, 20);
  const double volume = std::pow(static_cast<double>(q), window_exp);

  // S_k(a) = sum_i exp(-2 pi i xi * i * q^{k-1}) S_{k-1}(sigma(a)_i),
  // evaluated with exact rational phases j * q^{k-1} / q^level mod 1.
  auto exp_sum = [&](long long j, const std::vector<Complex>& w0) {
    std::vector<Complex> s = w0;
    long long step = j % denom;  // j * q^{k-1} mod q^level
    for (int k = 1; k <= window_exp; ++k) {
      std::vector<Complex> next(m);
      for (int a = 0; a < m; ++a) {
        Complex acc = 0;
        long long phase_num = 0;
        for (int i = 0; i < q; ++i) {
          const double phase =
              -kTau * static_cast<double>(phase_num) / static_cast<double>(denom);
          acc += Complex(std::cos(phase), std::sin(phase)) *
                 s[sigma.images[a][i]];
          phase_num = (phase_num + step) % denom;
        }
        next[a] = acc;
      }
      s = std::move(next);
      step = (step * q) % denom;
    }
    return s[seed] / volume;
  };

  // Reference maximum: the fully-aligned-phase intensity of the comb.
  std::vector<Complex> abs_weights(m);
  for (int a = 0; a < m; ++a) abs_weights[a] = std::abs(weights[a]);
  const double max_i = std::norm(exp_sum(0, abs_weights));

  std::vector<Complex> w0(weights.begin(), weights.end());
  std::vector<Peak> out;
  for (long long j = 0; j < denom; ++j) {
    const double value = std::norm(exp_sum(j, w0));
    if (max_i > 0 && value >= threshold * max_i)
      out.push_back({static_cast<double>(j) / static_cast<double>(denom), value});
  }
  std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) {
    if (a.intensity != b.intensity) return a.intensity > b.intensity;
    return a.xi < b.xi;
  });
  return out;
}

}  // namespace tilespec
