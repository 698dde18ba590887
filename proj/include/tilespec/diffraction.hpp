#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tilespec/rulespec.hpp"
#include "tilespec/supertile.hpp"

namespace tilespec {

using Complex = std::complex<double>;

// Weighted Dirac comb: one scatterer per tile, stored sorted by position so
// every downstream sum has a fixed order.
struct WeightedComb {
  int dim = 1;
  std::vector<std::pair<std::vector<double>, Complex>> points;
  double window_volume = 0;
};

WeightedComb comb_from_word(const Word& word,
                            const std::vector<Complex>& weights);
WeightedComb comb_from_block(const Block& block,
                             const std::vector<Complex>& weights);
// Scatterers at left endpoints of the interval tiles.
WeightedComb comb_from_interval(const IntervalPatch& patch,
                                const std::vector<Complex>& weights);

// Prefix of a one-sided fixed point of the rule (of sigma^t when needed).
Word fixed_point_prefix(const RuleSpec& rule, std::uint64_t length,
                        std::uint64_t cap = kDefaultCellCap);

// C(k) = (1/N) sum_{n<N} w(x_{n+|k|}) conj(w(x_n)), conjugated for k < 0.
Complex correlation(const RuleSpec& rule, const std::vector<Complex>& weights,
                    long long k, std::uint64_t window,
                    std::uint64_t cap = kDefaultCellCap);

struct AutocorrMeasure {
  std::map<std::vector<long long>, Complex> atoms;
  double window_volume = 0;
};

// Volume-normalized pair sums at every integer difference |z|_inf <= max_offset.
// Requires a comb with integer positions.
AutocorrMeasure autocorrelation(const WeightedComb& comb, long long max_offset);

// Bombieri-Taylor |c^xi|^2 with c^xi = (1/Vol) sum w(x) exp(-2 pi i xi.x).
double intensity(const WeightedComb& comb, const std::vector<double>& xi);

struct IntensityReport {
  std::vector<double> xi;
  std::vector<std::pair<std::uint64_t, double>> per_window;
  std::vector<double> gaps;  // successive absolute differences
  double value = 0;          // largest-window value
};

// Intensity over growing fixed-point prefix windows (1-D rules).
IntensityReport intensity_sequence(const RuleSpec& rule,
                                   const std::vector<Complex>& weights,
                                   double xi,
                                   const std::vector<std::uint64_t>& windows,
                                   std::uint64_t cap = kDefaultCellCap);

struct ImageResult {
  int grid = 0;
  std::vector<double> intensities;  // row-major, index v * grid + u
  double max_intensity = 0;
  std::vector<std::uint8_t> pixels; // round(255 * (I / I_max)^gamma)
};

// Intensity raster at xi = (u/g, v/g) over the level-n superblock of a 2-D
// block rule. Deterministic; `threads` <= 0 means single-threaded.
ImageResult diffraction_image(const RuleSpec& rule,
                              const std::vector<Complex>& weights, int letter,
                              int level, int grid, double gamma = 0.5,
                              int threads = 0,
                              std::uint64_t cap = kDefaultCellCap);

std::string encode_pgm(const ImageResult& image);
// False-color variant of the same raster.
std::string encode_ppm(const ImageResult& image);

struct Peak {
  double xi = 0;
  double intensity = 0;
};

// Intensities at all q-adic candidates j/q^level, evaluated exactly through
// the substitution recursion; entries above threshold * I_max, brightest
// first.
std::vector<Peak> peak_scan(const RuleSpec& rule,
                            const std::vector<Complex>& weights, int level,
                            double threshold);

}  // namespace tilespec
