#include <cmath>
#include <complex>

#include "doctest.h"
#include "helpers.hpp"
#include "tilespec/diffraction.hpp"

using namespace tilespec;

namespace {
std::vector<Complex> pm1() { return {Complex(1, 0), Complex(-1, 0)}; }

// Independent Thue-Morse oracle: w(n) = +1 iff popcount(n) is even.
double tm_weight(unsigned long long n) {
  return (__builtin_popcountll(n) % 2 == 0) ? 1.0 : -1.0;
}
}  // namespace

TEST_CASE("combs collect one weighted scatterer per tile") {
  RuleSpec fib = load_rule("fib.rule");
  Word prefix = fixed_point_prefix(fib, 10);
  CHECK(dump_word(fib, prefix) == "a b a a b a b a a b\n");

  WeightedComb comb = comb_from_word(prefix, {Complex(2, 0), Complex(0, 1)});
  REQUIRE(comb.points.size() == 10);
  CHECK(comb.window_volume == 10);
  CHECK(comb.points[0].first == std::vector<double>{0});
  CHECK(comb.points[0].second == Complex(2, 0));
  CHECK(comb.points[1].second == Complex(0, 1));

  RuleSpec tm2d = load_rule("tm2d.rule");
  WeightedComb block = comb_from_block(superblock(tm2d, 0, 2), pm1());
  CHECK(block.dim == 2);
  CHECK(block.points.size() == 16);
  CHECK(block.window_volume == 16);
}

TEST_CASE("periodic comb correlations are exact") {
  RuleSpec period2 = load_rule("period2.rule");
  CHECK(correlation(period2, pm1(), 1, 1 << 12).real() ==
        doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(correlation(period2, pm1(), 2, 1 << 12).real() ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("thue-morse correlation matches the popcount oracle") {
  RuleSpec tm = load_rule("tm.rule");
  const std::uint64_t window = 1ull << 20;
  Complex c1 = correlation(tm, pm1(), 1, window);

  double oracle = 0;
  for (unsigned long long n = 0; n < window; ++n)
    oracle += tm_weight(n + 1) * tm_weight(n);
  oracle /= static_cast<double>(window);

  CHECK(std::abs(c1.real() - oracle) < 1e-9);
  CHECK(std::abs(c1.imag()) < 1e-12);
  CHECK(c1.real() == doctest::Approx(-0.33333396911621094).epsilon(1e-12));
  // Near -1/3, and Hermitian in k.
  CHECK(std::abs(c1.real() + 1.0 / 3.0) < 2e-3);
  Complex cm1 = correlation(tm, pm1(), -1, window);
  CHECK(std::abs(cm1 - std::conj(c1)) < 1e-15);
}

TEST_CASE("autocorrelation coefficients rescale the correlations") {
  RuleSpec tm = load_rule("tm.rule");
  const std::uint64_t window = 1 << 12;
  WeightedComb comb = comb_from_word(fixed_point_prefix(tm, window), pm1());
  AutocorrMeasure eta = autocorrelation(comb, 8);
  const double m = static_cast<double>(window);
  for (long long z = 0; z <= 8; ++z) {
    Complex finite = correlation(tm, pm1(), z, window - z);
    Complex expected = finite * ((m - z) / m);
    CHECK(std::abs(eta.atoms.at({z}) - expected) < 1e-12);
    // eta(-z) = conj(eta(z)).
    CHECK(std::abs(eta.atoms.at({-z}) - std::conj(eta.atoms.at({z}))) <
          1e-15);
  }
}

TEST_CASE("wiener: intensity equals the autocorrelation transform") {
  RuleSpec tm = load_rule("tm.rule");
  const std::uint64_t window = 256;
  WeightedComb comb = comb_from_word(fixed_point_prefix(tm, window), pm1());
  AutocorrMeasure eta = autocorrelation(comb, window - 1);
  const double pi = 3.14159265358979323846;
  for (double xi : {0.0, 1.0 / 3.0, 0.25, 0.7}) {
    Complex sum = 0;
    for (const auto& [z, atom] : eta.atoms)
      sum += atom * std::polar(1.0, -2 * pi * xi * z[0]);
    CHECK(std::abs(intensity(comb, {xi}) - sum.real() / window) < 1e-10);
  }
}

TEST_CASE("lattice comb intensities are exact") {
  Word flat;
  flat.letters.assign(4096, 0);
  WeightedComb comb = comb_from_word(flat, {Complex(1, 0)});
  CHECK(intensity(comb, {0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(intensity(comb, {0.5}) < 1e-12);
  CHECK(intensity(comb, {1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(intensity(comb, {0.25}) < 1e-12);
}

TEST_CASE("intensity sequence over growing windows") {
  RuleSpec period2 = load_rule("period2.rule");
  IntensityReport report =
      intensity_sequence(period2, pm1(), 0.5, {256, 512, 1024});
  CHECK(report.value == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(report.gaps.size() == 2);
  CHECK(report.gaps.back() < 1e-12);

  RuleSpec tm = load_rule("tm.rule");
  IntensityReport flat = intensity_sequence(
      tm, pm1(), 0.5, {1ull << 14, 1ull << 15, 1ull << 16});
  // Singular spectrum: no Bragg peak mass at xi = 1/2.
  CHECK(flat.value < 1e-3);
}

TEST_CASE("q-adic peak scan") {
  RuleSpec period2 = load_rule("period2.rule");
  std::vector<Peak> peaks = peak_scan(period2, pm1(), 8, 0.5);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].xi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(peaks[0].intensity == doctest::Approx(1.0).epsilon(1e-12));

  RuleSpec const3 = load_rule("const3.rule");
  std::vector<Peak> indicator =
      peak_scan(const3, {Complex(1, 0), Complex(0, 0)}, 13, 0.5);
  REQUIRE(!indicator.empty());
  CHECK(indicator[0].xi == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(indicator[0].intensity - 0.36) < 1e-3);

  RuleSpec tm = load_rule("tm.rule");
  CHECK(peak_scan(tm, pm1(), 16, 0.01).empty());
}

TEST_CASE("diffraction images are deterministic across thread counts") {
  RuleSpec tm2d = load_rule("tm2d.rule");
  ImageResult serial = diffraction_image(tm2d, pm1(), 0, 4, 32, 0.5, 1);
  ImageResult parallel = diffraction_image(tm2d, pm1(), 0, 4, 32, 0.5, 4);
  CHECK(serial.pixels == parallel.pixels);
  CHECK(serial.intensities == parallel.intensities);
  CHECK(serial.grid == 32);
  CHECK(serial.max_intensity > 0);

  std::string pgm = encode_pgm(serial);
  CHECK(pgm.substr(0, 12) == "P5\n32 32\n255");
  CHECK(pgm.size() == 13 + 32 * 32);
  std::string ppm = encode_ppm(serial);
  CHECK(ppm.substr(0, 2) == "P6");
  CHECK(ppm.size() == 13 + 3 * 32 * 32);
}
