// Command-line front end: validate -> grow -> analyze -> spectral -> diffract.
#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tilespec/diffraction.hpp"
#include "tilespec/parser.hpp"
#include "tilespec/spectral.hpp"
#include "tilespec/supertile.hpp"
#include "tilespec/transition.hpp"

using nlohmann::json;
using namespace tilespec;

namespace {

constexpr const char* kSchemaVersion = "1.0.0";

struct Globals {
  bool json = false;
  double tol = 1e-6;
  int nmax = 40;
  std::string out;
  std::uint64_t cap = kDefaultCellCap;
};

int thread_budget() {
  if (const char* env = std::getenv("TILESPEC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SemanticError("cannot open rule file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RuleSpec load_rule(const std::string& path) {
  return parse_rule_file(read_file(path));
}

void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SemanticError("cannot write: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw SemanticError("cannot rename into place: " + path);
}

void emit(const Globals& g, const std::string& bytes) {
  if (g.out.empty())
    std::cout << bytes;
  else
    write_atomic(g.out, bytes);
}

void ensure_finite(const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v))
      throw NoConvergence("refusing to serialize a non-finite number");
  } else if (j.is_object() || j.is_array()) {
    for (const auto& item : j) ensure_finite(item);
  }
}

void emit_json(const Globals& g, json j) {
  j["schema"] = kSchemaVersion;
  ensure_finite(j);
  emit(g, j.dump(2) + "\n");
}

// Weight grammar: sym=re[(+|-)im i], e.g. "a=1,b=-1" or "a=0.5+1i,b=2i".
Complex parse_complex(const std::string& text) {
  if (text.empty()) throw SyntaxError(0, 0, "empty weight value");
  double re = 0, im = 0;
  std::size_t pos = 0;
  auto read_number = [&]() {
    std::size_t consumed = 0;
    const double v = std::stod(text.substr(pos), &consumed);
    if (consumed == 0) throw SyntaxError(0, 0, "bad weight: " + text);
    pos += consumed;
    return v;
  };
  double first = read_number();
  if (pos < text.size() && text[pos] == 'i') {
    im = first;
    ++pos;
  } else {
    re = first;
    if (pos < text.size()) {
      im = read_number();
      if (pos >= text.size() || text[pos] != 'i')
        throw SyntaxError(0, 0, "bad weight: " + text);
      ++pos;
    }
  }
  if (pos != text.size()) throw SyntaxError(0, 0, "bad weight: " + text);
  return {re, im};
}

std::vector<Complex> parse_weights(const RuleSpec& rule,
                                   const std::string& spec) {
  std::vector<Complex> weights(rule.alphabet.size(), Complex(0, 0));
  std::vector<bool> set(rule.alphabet.size(), false);
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw SyntaxError(0, 0, "weight must look like sym=value: " + item);
    const int idx = rule.alphabet.index(item.substr(0, eq));
    weights[idx] = parse_complex(item.substr(eq + 1));
    set[idx] = true;
  }
  for (std::size_t i = 0; i < set.size(); ++i)
    if (!set[i])
      throw SyntaxError(0, 0, "missing weight for symbol " +
                                  rule.alphabet.symbol(i));
  return weights;
}

std::vector<int> parse_patch_word(const RuleSpec& rule,
                                  const std::string& text) {
  std::vector<int> letters;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) letters.push_back(rule.alphabet.index(tok));
  if (letters.empty()) throw SyntaxError(0, 0, "empty patch");
  return letters;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json matrix_to_json(const IntMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

std::string verdict_name(Primitivity p) {
  switch (p) {
    case Primitivity::Primitive: return "primitive";
    case Primitivity::NotPrimitive: return "not_primitive";
    case Primitivity::Undetermined: return "undetermined";
  }
  return "?";
}

int run_validate(const Globals& g, const std::string& path) {
  ValidationReport report;
  RuleSpec rule;
  rule = load_rule(path);
  report = validate(rule);
  if (g.json) {
    json issues = json::array();
    for (const auto& i : report.issues)
      issues.push_back(
          {{"severity", i.severity == Severity::ErrorLevel ? "error" : "warning"},
           {"location", i.location},
           {"message", i.message}});
    emit_json(g, {{"rule", rule.name}, {"ok", report.ok()}, {"issues", issues}});
  } else {
    std::ostringstream out;
    for (const auto& i : report.issues)
      out << (i.severity == Severity::ErrorLevel ? "error" : "warning") << " ["
          << i.location << "] " << i.message << "\n";
    out << (report.ok() ? "ok" : "invalid") << "\n";
    emit(g, out.str());
  }
  return report.ok() ? 0 : 3;
}

int run_grow(const Globals& g, const std::string& path, std::string type,
             int level, const std::string& format) {
  const RuleSpec rule = load_rule(path);
  std::string text;
  if (rule.kind == RuleKind::Symbolic) {
    const int letter = rule.alphabet.index(type.empty() ? rule.alphabet.symbol(0)
                                                        : type);
    text = dump_word(rule, superword(rule, letter, level, g.cap));
  } else if (rule.kind == RuleKind::Inflation) {
    const int letter = rule.alphabet.index(type.empty() ? rule.alphabet.symbol(0)
                                                        : type);
    if (format == "intervals") {
      const std::vector<double> lengths = rule.inflation.lengths_auto
                                              ? natural_lengths(rule)
                                              : rule.inflation.lengths;
      text = dump_interval_patch(
          rule, supertile_interval(rule, letter, level, lengths, g.cap));
    } else {
      text = dump_word(rule, superword(rule, letter, level, g.cap));
    }
  } else if (rule.kind == RuleKind::Block) {
    const int letter = rule.alphabet.index(type.empty() ? rule.alphabet.symbol(0)
                                                        : type);
    text = dump_block(rule, superblock(rule, letter, level, g.cap));
  } else if (rule.kind == RuleKind::Sadic) {
    const int letter = rule.alphabet.index(type.empty() ? rule.alphabet.symbol(0)
                                                        : type);
    text = dump_word(rule, sadic_superword(rule, letter, level, g.cap));
  } else {
    const int idx = type.empty() ? 0 : fusion_type_index(rule, level, type);
    text = dump_lattice_patch(rule, fusion_supertile(rule, idx, level, g.cap));
  }
  if (g.json)
    emit_json(g, {{"rule", rule.name},
                  {"kind", to_string(rule.kind)},
                  {"level", level},
                  {"type", type},
                  {"patch", text}});
  else
    emit(g, text);
  return 0;
}

int run_words(const Globals& g, const std::string& path, int length,
              int horizon, const std::string& repetitivity) {
  const RuleSpec rule = load_rule(path);
  if (!repetitivity.empty()) {
    Word w;
    w.letters = parse_patch_word(rule, repetitivity);
    const RepetitivityResult r = repetitivity_radius(rule, w, horizon, g.cap);
    if (g.json)
      emit_json(g, {{"rule", rule.name},
                    {"patch", repetitivity},
                    {"radius", r.radius},
                    {"horizon", r.horizon}});
    else
      emit(g, "radius " + std::to_string(r.radius) + "\n");
    return 0;
  }
  const LanguageResult lang = legal_words(rule, length, horizon, g.cap);
  if (g.json) {
    json words = json::array();
    for (const auto& w : lang.words) {
      std::string s;
      for (std::size_t i = 0; i < w.size(); ++i)
        s += (i ? " " : "") + rule.alphabet.symbol(w[i]);
      words.push_back(s);
    }
    emit_json(g, {{"rule", rule.name},
                  {"length", length},
                  {"complexity", lang.words.size()},
                  {"saturated", lang.saturated},
                  {"horizon", lang.horizon},
                  {"words", words}});
  } else {
    std::ostringstream out;
    for (const auto& w : lang.words) {
      for (std::size_t i = 0; i < w.size(); ++i)
        out << (i ? " " : "") << rule.alphabet.symbol(w[i]);
      out << "\n";
    }
    out << "complexity " << lang.words.size() << (lang.saturated ? "" : " (unsaturated)")
        << "\n";
    emit(g, out.str());
  }
  return 0;
}

int run_matrix(const Globals& g, const std::string& path, int level, int from,
               int to, int depth) {
  const RuleSpec rule = load_rule(path);
  const IntMatrix m = to > from ? matrix_product(rule, from, to)
                                : transition_matrix(rule, level);
  json report = {{"rule", rule.name}, {"matrix", matrix_to_json(m)}};
  const PrimitivityVerdict pv = is_primitive(rule);
  report["primitive"] = {{"verdict", verdict_name(pv.verdict)},
                         {"N", pv.power}};
  if (m.rows() == m.cols()) {
    try {
      const PerronData pd = perron_data(m);
      report["theta"] = pd.theta;
      report["residual"] = pd.residual;
      json left = json::array(), right = json::array();
      for (int i = 0; i < pd.left.size(); ++i) left.push_back(pd.left[i]);
      for (int i = 0; i < pd.right.size(); ++i) right.push_back(pd.right[i]);
      report["left"] = left;
      report["right"] = right;
    } catch (const NotIrreducible&) {
      report["theta"] = nullptr;
    }
  }
  try {
    json freq = json::array();
    for (double f : letter_frequencies(rule)) freq.push_back(f);
    report["frequencies"] = freq;
  } catch (const Error&) {
  }
  if (rule.kind == RuleKind::Fusion || rule.kind == RuleKind::VectorFusion) {
    try {
      const FrequencySequence fs = frequency_sequence(rule, depth);
      json spread = json::array();
      for (const auto& lv : fs.levels) spread.push_back(lv.spread);
      report["spread_by_level"] = spread;
    } catch (const Error&) {
    }
  }
  if (g.json) {
    emit_json(g, report);
  } else {
    std::ostringstream out;
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
      out << "\n";
    }
    out << "primitive: " << verdict_name(pv.verdict);
    if (pv.verdict == Primitivity::Primitive) out << " (N=" << pv.power << ")";
    out << "\n";
    if (report.contains("theta") && !report["theta"].is_null())
      out << "theta " << format_double(report["theta"].get<double>()) << "\n";
    emit(g, out.str());
  }
  return 0;
}

int run_freq(const Globals& g, const std::string& path, const std::string& seed,
             int level, int depth, const std::string& patch) {
  const RuleSpec rule = load_rule(path);
  json report = {{"rule", rule.name}};
  std::ostringstream text;
  if (rule.kind == RuleKind::Fusion || rule.kind == RuleKind::VectorFusion) {
    if (!patch.empty()) {
      LatticePatch p;
      const auto letters = parse_patch_word(rule, patch);
      for (std::size_t i = 0; i < letters.size(); ++i)
        p.cells[{static_cast<long long>(i)}] = letters[i];
      const PatchFrequencyReport r = patch_frequency(rule, p, depth);
      report["patch_frequency"] = r.value;
      report["cauchy_gap"] = r.cauchy_gap;
      json partials = json::array();
      for (const auto& [n, v] : r.partials)
        partials.push_back({{"n", n}, {"value", v}});
      report["partials"] = partials;
      text << "patch_frequency " << format_double(r.value) << " (gap "
           << format_double(r.cauchy_gap) << ")\n";
    } else {
      const FrequencySequence fs = frequency_sequence(rule, depth);
      json levels = json::array();
      for (const auto& lv : fs.levels) {
        json rho = json::array();
        for (double v : lv.rho) rho.push_back(v);
        levels.push_back({{"n", lv.n}, {"rho", rho}, {"spread", lv.spread}});
        text << "n=" << lv.n << " spread " << format_double(lv.spread) << "\n";
      }
      report["levels"] = levels;
    }
  } else {
    json freq = json::array();
    for (double f : letter_frequencies(rule)) freq.push_back(f);
    report["frequencies"] = freq;
    const int seed_idx =
        rule.alphabet.index(seed.empty() ? rule.alphabet.symbol(0) : seed);
    json emp = json::array();
    for (double f : empirical_frequencies(rule, seed_idx, level))
      emp.push_back(f);
    report["empirical"] = emp;
    report["empirical_level"] = level;
    text << "frequencies";
    for (const auto& f : report["frequencies"])
      text << " " << format_double(f.get<double>());
    text << "\nempirical(n=" << level << ")";
    for (const auto& f : report["empirical"])
      text << " " << format_double(f.get<double>());
    text << "\n";
  }
  if (g.json)
    emit_json(g, report);
  else
    emit(g, text.str());
  return 0;
}

int run_spectral(const Globals& g, const std::string& path,
                 const std::string& alpha, int p) {
  const RuleSpec rule = load_rule(path);
  json report = {{"rule", rule.name}};
  std::ostringstream text;
  const IntMatrix m = transition_matrix(rule);
  if (m.rows() == m.cols()) {
    const AlgebraicVerdict av = algebraic_verdict(m);
    json cp = json::array();
    for (const BigInt& c : av.char_poly) cp.push_back(c.str());
    report["char_poly"] = cp;
    report["perron_root"] = av.perron_root;
    report["classification"] = to_string(av.classification);
    report["irreducible_over_Q"] = to_string(av.irreducible_over_q);
    json moduli = json::array();
    for (double v : av.conjugate_moduli) moduli.push_back(v);
    report["conjugate_moduli"] = moduli;
    text << "perron_root " << format_double(av.perron_root) << "\n"
         << "classification " << to_string(av.classification) << "\n";
  }
  try {
    const HeightResult h = dekking_height(rule);
    report["height"] = h.height;
    if (h.periodic_warning) report["height_periodic_warning"] = true;
    text << "height " << h.height << "\n";
  } catch (const Error&) {
  }
  try {
    const CoincidenceResult c = coincidence(rule, 8);
    report["coincidence"] = {{"found", c.found},
                             {"k", c.power},
                             {"l", c.position},
                             {"mode", c.mode}};
    text << "coincidence " << (c.found ? "found" : "not found") << "\n";
  } catch (const Error&) {
  }
  try {
    const CoincidenceResult c = strong_coincidence(rule, 8);
    report["strong_coincidence"] = {{"found", c.found},
                                    {"k", c.power},
                                    {"l", c.position},
                                    {"mode", c.mode}};
  } catch (const Error&) {
  }
  try {
    report["bijective"] = is_bijective(rule).bijective;
  } catch (const Error&) {
  }
  if (!alpha.empty()) {
    const EigenvalueTestReport h =
        host_test(rule, Real100(alpha), p, g.nmax, g.tol);
    json dist = json::array();
    for (const auto& [n, d] : h.distances)
      dist.push_back({{"n", n}, {"dist", d}});
    report["host"] = {{"alpha", alpha},
                      {"p", p},
                      {"verdict", to_string(h.verdict)},
                      {"distances", dist}};
    text << "host(" << alpha << ") " << to_string(h.verdict) << "\n";
  }
  try {
    report["weak_mixing"] = to_string(weak_mixing_verdict(rule));
    text << "weak_mixing " << report["weak_mixing"].get<std::string>() << "\n";
  } catch (const Error&) {
  }
  if (g.json)
    emit_json(g, report);
  else
    emit(g, text.str());
  return 0;
}

int run_diffract(const Globals& g, const std::string& path,
                 const std::string& weights_spec, double xi,
                 std::vector<std::uint64_t> windows, bool peaks, int level,
                 double threshold) {
  const RuleSpec rule = load_rule(path);
  const auto weights = parse_weights(rule, weights_spec);
  if (peaks) {
    const auto list = peak_scan(rule, weights, level, threshold);
    if (g.json) {
      json arr = json::array();
      for (const Peak& pk : list)
        arr.push_back({{"xi", pk.xi}, {"intensity", pk.intensity}});
      emit_json(g, {{"rule", rule.name}, {"peaks", arr}, {"level", level}});
    } else {
      std::ostringstream out;
      for (const Peak& pk : list)
        out << format_double(pk.xi) << " " << format_double(pk.intensity)
            << "\n";
      emit(g, out.str());
    }
    return 0;
  }
  if (windows.empty()) windows = {256, 512, 1024};
  const IntensityReport r = intensity_sequence(rule, weights, xi, windows, g.cap);
  if (g.json) {
    json per = json::array();
    for (const auto& [n, v] : r.per_window)
      per.push_back({{"window", n}, {"intensity", v}});
    json gaps = json::array();
    for (double v : r.gaps) gaps.push_back(v);
    emit_json(g, {{"rule", rule.name},
                  {"xi", xi},
                  {"per_window", per},
                  {"gaps", gaps},
                  {"intensity", r.value}});
  } else {
    std::ostringstream out;
    for (const auto& [n, v] : r.per_window)
      out << format_double(xi) << "," << format_double(v) << "," << n << "\n";
    emit(g, out.str());
  }
  return 0;
}

int run_image(const Globals& g, const std::string& path,
              const std::string& weights_spec, std::string type, int level,
              int grid, double gamma, const std::string& format,
              const std::string& csv) {
  const RuleSpec rule = load_rule(path);
  const auto weights = parse_weights(rule, weights_spec);
  const int letter =
      rule.alphabet.index(type.empty() ? rule.alphabet.symbol(0) : type);
  const ImageResult img = diffraction_image(rule, weights, letter, level, grid,
                                            gamma, thread_budget(), g.cap);
  if (!csv.empty()) {
    std::ostringstream out;
    for (int v = 0; v < grid; ++v)
      for (int u = 0; u < grid; ++u)
        out << format_double(static_cast<double>(u) / grid) << ","
            << format_double(static_cast<double>(v) / grid) << ","
            << format_double(img.intensities[static_cast<std::size_t>(v) * grid + u])
            << "," << level << "\n";
    write_atomic(csv, out.str());
  }
  const std::string bytes = format == "ppm" ? encode_ppm(img) : encode_pgm(img);
  if (g.out.empty())
    throw SemanticError("image output needs --out FILE");
  write_atomic(g.out, bytes);
  if (g.json)
    std::cout << json{{"schema", kSchemaVersion},
                      {"rule", rule.name},
                      {"grid", grid},
                      {"level", level},
                      {"max_intensity", img.max_intensity},
                      {"out", g.out}}
                     .dump(2)
              << "\n";
  else
    std::cout << "wrote " << g.out << " (max intensity "
              << format_double(img.max_intensity) << ")\n";
  return 0;
}

int run_autocorr(const Globals& g, const std::string& path,
                 const std::string& weights_spec, std::uint64_t window,
                 long long max_offset, bool with_correlation, long long k) {
  const RuleSpec rule = load_rule(path);
  const auto weights = parse_weights(rule, weights_spec);
  if (with_correlation) {
    const Complex c = correlation(rule, weights, k, window, g.cap);
    if (g.json)
      emit_json(g, {{"rule", rule.name},
                    {"k", k},
                    {"window", window},
                    {"re", c.real()},
                    {"im", c.imag()}});
    else
      emit(g, format_double(c.real()) + " " + format_double(c.imag()) + "\n");
    return 0;
  }
  const Word prefix = fixed_point_prefix(rule, window, g.cap);
  const WeightedComb comb = comb_from_word(prefix, weights);
  const AutocorrMeasure ac = autocorrelation(comb, max_offset);
  if (g.json) {
    json atoms = json::array();
    for (const auto& [z, c] : ac.atoms)
      atoms.push_back({{"z", z[0]}, {"re", c.real()}, {"im", c.imag()}});
    emit_json(g, {{"rule", rule.name}, {"window", window}, {"atoms", atoms}});
  } else {
    std::ostringstream out;
    for (const auto& [z, c] : ac.atoms)
      out << z[0] << "," << format_double(c.real()) << ","
          << format_double(c.imag()) << "\n";
    emit(g, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"supertile construction, frequency, spectral, and diffraction toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "emit machine-readable JSON");
  app.add_option("--tol", g.tol, "tolerance for limit tests")
      ->default_val(1e-6);
  app.add_option("--nmax", g.nmax, "truncation depth for limit tests")
      ->default_val(40);
  app.add_option("--out", g.out, "output file (written atomically)");
  app.add_option("--cap", g.cap, "cell cap for generated supertiles")
      ->default_val(kDefaultCellCap);

  std::string rule_path, type, format = "text", weights, patch, seed, alpha,
              repetitivity, csv;
  int level = 1, length = 2, horizon = 8, from = 0, to = 0, depth = 12, p = 1,
      grid = 256, mlevel = 1;
  long long k = 1, max_offset = 8;
  std::uint64_t window = 1 << 16;
  double xi = 0, gamma = 0.5, threshold = 0.01;
  std::vector<std::uint64_t> windows;
  bool peaks = false, with_correlation = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a rule file");
  validate_cmd->add_option("rule", rule_path)->required();

  auto* grow_cmd = app.add_subcommand("grow", "materialize a supertile");
  grow_cmd->add_option("rule", rule_path)->required();
  grow_cmd->add_option("--type", type, "seed letter / supertile type");
  grow_cmd->add_option("--level", level)->default_val(1);
  grow_cmd->add_option("--format", format, "text|intervals")
      ->default_val("text");

  auto* words_cmd = app.add_subcommand("words", "legal words and complexity");
  words_cmd->add_option("rule", rule_path)->required();
  words_cmd->add_option("--length", length)->default_val(2);
  words_cmd->add_option("--horizon", horizon)->default_val(8);
  words_cmd->add_option("--repetitivity", repetitivity,
                        "comma-separated word: report its repetitivity radius");

  auto* matrix_cmd = app.add_subcommand("matrix", "transition matrix report");
  matrix_cmd->add_option("rule", rule_path)->required();
  matrix_cmd->add_option("--level", mlevel)->default_val(1);
  matrix_cmd->add_option("--from", from)->default_val(0);
  matrix_cmd->add_option("--to", to)->default_val(0);
  matrix_cmd->add_option("--depth", depth)->default_val(12);

  auto* freq_cmd = app.add_subcommand("freq", "letter / patch frequencies");
  freq_cmd->add_option("rule", rule_path)->required();
  freq_cmd->add_option("--seed", seed);
  freq_cmd->add_option("--level", level)->default_val(8);
  freq_cmd->add_option("--depth", depth)->default_val(12);
  freq_cmd->add_option("--patch", patch, "comma-separated symbols");

  auto* spectral_cmd = app.add_subcommand("spectral", "spectral diagnostics");
  spectral_cmd->alias("analyze");
  spectral_cmd->add_option("rule", rule_path)->required();
  spectral_cmd->add_option("--alpha", alpha, "candidate eigenvalue");
  spectral_cmd->add_option("--p", p)->default_val(1);

  auto* diffract_cmd = app.add_subcommand("diffract", "intensities and peaks");
  diffract_cmd->add_option("rule", rule_path)->required();
  diffract_cmd->add_option("--weights", weights)->required();
  diffract_cmd->add_option("--xi", xi)->default_val(0.0);
  diffract_cmd->add_option("--windows", windows)->delimiter(',');
  diffract_cmd->add_flag("--peaks", peaks, "scan q-adic peak candidates");
  diffract_cmd->add_option("--level", level)->default_val(8);
  diffract_cmd->add_option("--threshold", threshold)->default_val(0.01);

  auto* image_cmd = app.add_subcommand("image", "2-D diffraction raster");
  image_cmd->add_option("rule", rule_path)->required();
  image_cmd->add_option("--weights", weights)->required();
  image_cmd->add_option("--type", type);
  image_cmd->add_option("--level", level)->default_val(7);
  image_cmd->add_option("--grid", grid)->default_val(256);
  image_cmd->add_option("--gamma", gamma)->default_val(0.5);
  image_cmd->add_option("--format", format, "pgm|ppm")->default_val("pgm");
  image_cmd->add_option("--csv", csv, "also dump raw intensities as CSV");

  auto* autocorr_cmd =
      app.add_subcommand("autocorr", "autocorrelation / correlation");
  autocorr_cmd->add_option("rule", rule_path)->required();
  autocorr_cmd->add_option("--weights", weights)->required();
  autocorr_cmd->add_option("--window", window)->default_val(1 << 16);
  autocorr_cmd->add_option("--max-offset", max_offset)->default_val(8);
  autocorr_cmd->add_flag("--correlation", with_correlation,
                         "print C(k) instead of the atom table");
  autocorr_cmd->add_option("--k", k)->default_val(1);

  // Global flags (--json, --tol, ...) may appear after the subcommand.
  for (auto* sub :
       {validate_cmd, grow_cmd, words_cmd, matrix_cmd, freq_cmd, spectral_cmd,
        diffract_cmd, image_cmd, autocorr_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (validate_cmd->parsed()) return run_validate(g, rule_path);
    if (grow_cmd->parsed()) return run_grow(g, rule_path, type, level, format);
    if (words_cmd->parsed())
      return run_words(g, rule_path, length, horizon, repetitivity);
    if (matrix_cmd->parsed())
      return run_matrix(g, rule_path, mlevel, from, to, depth);
    if (freq_cmd->parsed())
      return run_freq(g, rule_path, seed, level, depth, patch);
    if (spectral_cmd->parsed()) return run_spectral(g, rule_path, alpha, p);
    if (diffract_cmd->parsed())
      return run_diffract(g, rule_path, weights, xi, windows, peaks, level,
                          threshold);
    if (image_cmd->parsed())
      return run_image(g, rule_path, weights, type, level, grid, gamma, format,
                       csv);
    if (autocorr_cmd->parsed())
      return run_autocorr(g, rule_path, weights, window, max_offset,
                          with_correlation, k);
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownSymbol& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DuplicateDefinition& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const AlphabetMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
