#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "tilespec/parser.hpp"
#include "tilespec/supertile.hpp"

namespace tilespec {

namespace {

void add_issue(ValidationReport& report, Severity severity,
               std::string location, std::string message) {
  report.issues.push_back({severity, std::move(location), std::move(message)});
}

bool edge_connected(const std::set<std::vector<long long>>& cells) {
  if (cells.empty()) return false;
  const int d = static_cast<int>(cells.begin()->size());
  std::set<std::vector<long long>> seen;
  std::queue<std::vector<long long>> frontier;
  frontier.push(*cells.begin());
  seen.insert(*cells.begin());
  while (!frontier.empty()) {
    auto cell = frontier.front();
    frontier.pop();
    for (int i = 0; i < d; ++i) {
      for (long long delta : {-1LL, 1LL}) {
        auto nb = cell;
        nb[i] += delta;
        if (cells.count(nb) && !seen.count(nb)) {
          seen.insert(nb);
          frontier.push(nb);
        }
      }
    }
  }
  return seen.size() == cells.size();
}

// A connected 2-D support is a topological disk iff its complement has no
// bounded component.
bool has_hole(const std::set<std::vector<long long>>& cells) {
  if (cells.empty() || cells.begin()->size() != 2) return false;
  long long x0 = cells.begin()->at(0), x1 = x0, y0 = cells.begin()->at(1),
            y1 = y0;
  for (const auto& c : cells) {
    x0 = std::min(x0, c[0]);
    x1 = std::max(x1, c[0]);
    y0 = std::min(y0, c[1]);
    y1 = std::max(y1, c[1]);
  }
  // Flood the complement from a frame one cell beyond the bounding box.
  std::set<std::vector<long long>> outside;
  std::queue<std::vector<long long>> frontier;
  std::vector<long long> start{x0 - 1, y0 - 1};
  frontier.push(start);
  outside.insert(start);
  while (!frontier.empty()) {
    auto cell = frontier.front();
    frontier.pop();
    for (int i = 0; i < 2; ++i) {
      for (long long delta : {-1LL, 1LL}) {
        auto nb = cell;
        nb[i] += delta;
        if (nb[0] < x0 - 1 || nb[0] > x1 + 1 || nb[1] < y0 - 1 || nb[1] > y1 + 1)
          continue;
        if (cells.count(nb) || outside.count(nb)) continue;
        outside.insert(nb);
        frontier.push(nb);
      }
    }
  }
  const std::uint64_t box =
      static_cast<std::uint64_t>(x1 - x0 + 3) * (y1 - y0 + 3);
  return outside.size() + cells.size() != box;
}

void check_fusion(const RuleSpec& rule, ValidationReport& report) {
  const auto& levels = rule.fusion.levels;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const FusionLevel& level = levels[li];
    const int n = static_cast<int>(li) + 1;
    for (std::size_t t = 0; t < level.type_names.size(); ++t) {
      const std::string where =
          "level " + std::to_string(n) + " super " + level.type_names[t];
      LatticePatch patch;
      bool overlap = false;
      try {
        for (const auto& p : level.supertiles[t]) {
          LatticePatch sub = fusion_supertile(rule, p.constituent, n - 1);
          for (const auto& [pos, letter] : sub.cells) {
            auto coord = pos;
            for (std::size_t i = 0; i < coord.size(); ++i)
              coord[i] += p.offset[i];
            if (!patch.cells.emplace(coord, letter).second) {
              add_issue(report, Severity::ErrorLevel, where,
                        "OverlappingPlacement: two constituents cover the "
                        "same cell");
              overlap = true;
              break;
            }
          }
          if (overlap) break;
        }
      } catch (const Error& e) {
        add_issue(report, Severity::ErrorLevel, where, e.what());
        continue;
      }
      if (overlap) continue;
      std::set<std::vector<long long>> support;
      for (const auto& [pos, letter] : patch.cells) support.insert(pos);
      if (!edge_connected(support))
        add_issue(report, Severity::ErrorLevel, where,
                  "support is not edge-connected");
      else if (rule.dimension == 2 && has_hole(support))
        add_issue(report, Severity::Warning, where,
                  "support is connected but not a topological disk");
    }
  }
  if (rule.fusion.has_repeat() && rule.dimension != 1)
    add_issue(report, Severity::Warning, "level repeat",
              "repeat extension past the scripted depth is only defined "
              "for dim 1");
}

void check_inflation(const RuleSpec& rule, ValidationReport& report) {
  if (rule.inflation.lengths_auto) return;
  for (int i = 0; i < rule.alphabet.size(); ++i)
    if (!(rule.inflation.lengths[i] > 0))
      add_issue(report, Severity::ErrorLevel,
                "lengths " + rule.alphabet.symbol(i),
                "tile length must be positive");
  if (!rule.inflation.check_lengths || !report.ok()) return;
  // |S(t_e)| = lambda |t_e| must hold with a single lambda.
  double lambda = 0;
  for (int e = 0; e < rule.alphabet.size(); ++e) {
    double image_len = 0;
    for (int f : rule.inflation.map.images[e])
      image_len += rule.inflation.lengths[f];
    const double ratio = image_len / rule.inflation.lengths[e];
    if (e == 0) {
      lambda = ratio;
    } else if (std::abs(ratio - lambda) > 1e-9 * std::abs(lambda)) {
      add_issue(report, Severity::ErrorLevel,
                "lengths " + rule.alphabet.symbol(e),
                "lengths are not self-consistent: substituted length is not "
                "a common multiple of the tile length");
    }
  }
}

void check_sadic(const RuleSpec& rule, ValidationReport& report) {
  const auto& sadic = rule.sadic;
  auto image_letters = [&](int sub_index) {
    std::set<int> letters;
    const SadicSub& sub = sadic.subs[sub_index];
    for (int e : sub.domain)
      for (int f : sub.map.images[e]) letters.insert(f);
    return letters;
  };
  auto check_pair = [&](int outer, int inner) {
    // sigma_inner produces letters that sigma_outer must accept.
    const SadicSub& target = sadic.subs[outer];
    for (int letter : image_letters(inner))
      if (target.map.images[letter].empty())
        add_issue(report, Severity::ErrorLevel,
                  "directive " + sadic.subs[inner].name,
                  "produces letter " + rule.alphabet.symbol(letter) +
                      " outside the domain of " + target.name);
  };
  const auto& prefix = sadic.directive_prefix;
  const auto& cycle = sadic.directive_cycle;
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i)
    check_pair(prefix[i], prefix[i + 1]);
  if (!cycle.empty()) {
    if (!prefix.empty()) check_pair(prefix.back(), cycle.front());
    for (std::size_t i = 0; i + 1 < cycle.size(); ++i)
      check_pair(cycle[i], cycle[i + 1]);
    check_pair(cycle.back(), cycle.front());
  }
}

void check_vector_fusion(const RuleSpec& rule, ValidationReport& report) {
  const auto& vf = rule.vector_fusion;
  if (vf.seed_a == vf.seed_b)
    add_issue(report, Severity::ErrorLevel, "seeds",
              "the two supertile types must be distinct symbols");
  const long long det = vf.L[0][0] * vf.L[1][1] - vf.L[0][1] * vf.L[1][0];
  if (det == 0)
    add_issue(report, Severity::ErrorLevel, "L", "L must be invertible");
  if (!report.ok()) return;
  try {
    vector_fusion_state(rule, 4);
  } catch (const PlacementCollision& e) {
    add_issue(report, Severity::ErrorLevel, "recursion", e.what());
  } catch (const Error& e) {
    add_issue(report, Severity::ErrorLevel, "recursion", e.what());
  }
}

}  // namespace

ValidationReport validate(const RuleSpec& rule) {
  ValidationReport report;
  switch (rule.kind) {
    case RuleKind::Symbolic:
    case RuleKind::Block:
      break;  // grammar-level checks already cover these
    case RuleKind::Inflation:
      check_inflation(rule, report);
      break;
    case RuleKind::Fusion:
      check_fusion(rule, report);
      break;
    case RuleKind::Sadic:
      check_sadic(rule, report);
      break;
    case RuleKind::VectorFusion:
      check_vector_fusion(rule, report);
      break;
  }
  return report;
}

}  // namespace tilespec
