#include "tilespec/supertile.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace tilespec {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b)
    return std::numeric_limits<std::uint64_t>::max();
  return a + b;
}

const SymbolicPayload& symbolic_of(const RuleSpec& rule) {
  if (rule.kind != RuleKind::Symbolic && rule.kind != RuleKind::Inflation)
    throw SemanticError("rule " + rule.name + " is not symbolic");
  return rule.sigma();
}

}  // namespace

int Block::at(const std::vector<int>& coord) const {
  std::size_t idx = 0;
  for (int i = static_cast<int>(extents.size()) - 1; i >= 0; --i)
    idx = idx * extents[i] + coord[i];
  return cells[idx];
}

Word apply_sigma(const SymbolicPayload& sigma, const Word& word,
                 std::uint64_t cap) {
  Word out;
  std::uint64_t total = 0;
  for (int letter : word.letters)
    total = checked_add(total, sigma.images.at(letter).size());
  if (total > cap)
    throw LevelOverflow("superword would exceed " + std::to_string(cap) +
                        " letters");
  out.letters.reserve(total);
  for (int letter : word.letters) {
    const auto& image = sigma.images.at(letter);
    if (image.empty())
      throw SemanticError("letter has empty image");
    out.letters.insert(out.letters.end(), image.begin(), image.end());
  }
  return out;
}

Word superword(const RuleSpec& rule, int letter, int n, std::uint64_t cap) {
  if (n < 0) throw SemanticError("negative level");
  const SymbolicPayload& sigma = symbolic_of(rule);
  Word w{{letter}};
  for (int i = 0; i < n; ++i) w = apply_sigma(sigma, w, cap);
  return w;
}

Block superblock(const RuleSpec& rule, int letter, int n, std::uint64_t cap) {
  if (rule.kind != RuleKind::Block)
    throw SemanticError("rule " + rule.name + " is not a block rule");
  if (n < 0) throw SemanticError("negative level");
  const int d = rule.dimension;
  const auto& extents = rule.block.extents;

  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < n; ++k) total = checked_mul(total, extents[i]);
  if (total > cap)
    throw LevelOverflow("superblock would exceed " + std::to_string(cap) +
                        " cells");

  // blocks[e] at the current level; grow level by level.
  std::vector<Block> current(rule.alphabet.size());
  for (int e = 0; e < rule.alphabet.size(); ++e) {
    current[e].extents.assign(d, 1);
    current[e].cells = {e};
  }
  for (int level = 1; level <= n; ++level) {
    std::vector<Block> next(rule.alphabet.size());
    for (int e = 0; e < rule.alphabet.size(); ++e) {
      Block& b = next[e];
      b.extents.resize(d);
      std::size_t count = 1;
      for (int i = 0; i < d; ++i) {
        b.extents[i] = current[0].extents[i] * extents[i];
        count *= b.extents[i];
      }
      b.cells.assign(count, 0);
      // Walk the level-1 shape; paste the previous-level block of each cell.
      const int sub_count = rule.block.cell_count();
      std::vector<int> pos(d, 0);
      for (int flat = 0; flat < sub_count; ++flat) {
        const int sub_letter = rule.block.blocks[e][flat];
        const Block& sub = current[sub_letter];
        std::vector<int> inner(d, 0);
        for (std::size_t sflat = 0; sflat < sub.cells.size(); ++sflat) {
          std::size_t idx = 0;
          for (int i = d - 1; i >= 0; --i)
            idx = idx * b.extents[i] + (pos[i] * sub.extents[i] + inner[i]);
          b.cells[idx] = sub.cells[sflat];
          for (int i = 0; i < d; ++i) {
            if (++inner[i] < sub.extents[i]) break;
            inner[i] = 0;
          }
        }
        for (int i = 0; i < d; ++i) {
          if (++pos[i] < extents[i]) break;
          pos[i] = 0;
        }
      }
    }
    current = std::move(next);
  }
  return current[letter];
}

IntervalPatch supertile_interval(const RuleSpec& rule, int letter, int n,
                                 const std::vector<double>& lengths,
                                 std::uint64_t cap) {
  for (double len : lengths)
    if (!(len > 0)) throw SemanticError("tile lengths must be positive");
  Word word = superword(rule, letter, n, cap);
  IntervalPatch patch;
  patch.tiles.reserve(word.letters.size());
  double left = 0.0;
  for (int e : word.letters) {
    patch.tiles.push_back({e, left, lengths.at(e)});
    left += lengths.at(e);
  }
  return patch;
}

namespace {

const FusionLevel& fusion_level_at(const RuleSpec& rule, int n,
                                   bool* extended) {
  const auto& levels = rule.fusion.levels;
  if (n < 1) throw LevelOutOfRange("fusion level must be >= 1");
  if (n <= static_cast<int>(levels.size())) {
    *extended = false;
    return levels[n - 1];
  }
  if (!rule.fusion.has_repeat())
    throw LevelOverflow("fusion rule scripted only to level " +
                        std::to_string(levels.size()));
  *extended = true;
  return levels.back();
}

void merge_translated(LatticePatch& dst, const LatticePatch& src,
                      const std::vector<long long>& shift, std::uint64_t cap) {
  std::vector<long long> coord;
  for (const auto& [pos, letter] : src.cells) {
    coord = pos;
    for (std::size_t i = 0; i < coord.size(); ++i) coord[i] += shift[i];
    if (!dst.cells.emplace(coord, letter).second) {
      std::ostringstream msg;
      msg << "two constituents write cell (";
      for (std::size_t i = 0; i < coord.size(); ++i)
        msg << (i ? "," : "") << coord[i];
      msg << ")";
      throw PlacementCollision(msg.str());
    }
    if (dst.cells.size() > cap)
      throw LevelOverflow("fusion patch would exceed " + std::to_string(cap) +
                          " cells");
  }
}

LatticePatch fusion_patch_impl(const RuleSpec& rule, int type, int n,
                               std::uint64_t cap,
                               std::map<std::pair<int, int>, LatticePatch>& memo) {
  if (n == 0) {
    LatticePatch p;
    p.cells[std::vector<long long>(rule.dimension, 0)] = type;
    return p;
  }
  auto key = std::make_pair(n, type);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  bool extended = false;
  const FusionLevel& level = fusion_level_at(rule, n, &extended);
  const auto& placements = level.supertiles.at(type);
  LatticePatch out;
  if (!extended) {
    for (const auto& p : placements) {
      const LatticePatch sub =
          fusion_patch_impl(rule, p.constituent, n - 1, cap, memo);
      merge_translated(out, sub, p.offset, cap);
    }
  } else {
    // Past the scripted depth the composition repeats combinatorially; lay
    // the constituents out by concatenation in offset order (1-D only).
    if (rule.dimension != 1)
      throw LevelOverflow(
          "repeat levels beyond the scripted depth are 1-D only");
    auto ordered = placements;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const FusionPlacement& a, const FusionPlacement& b) {
                       return a.offset < b.offset;
                     });
    long long cursor = 0;
    for (const auto& p : ordered) {
      const LatticePatch sub =
          fusion_patch_impl(rule, p.constituent, n - 1, cap, memo);
      const long long lo = sub.cells.begin()->first[0];
      const long long hi = sub.cells.rbegin()->first[0];
      merge_translated(out, sub, {cursor - lo}, cap);
      cursor += hi - lo + 1;
    }
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace

int fusion_type_count(const RuleSpec& rule, int n) {
  if (rule.kind == RuleKind::VectorFusion) return 2;
  if (n == 0) return rule.alphabet.size();
  bool extended = false;
  return static_cast<int>(
      fusion_level_at(rule, n, &extended).type_names.size());
}

std::string fusion_type_name(const RuleSpec& rule, int n, int type) {
  if (rule.kind == RuleKind::VectorFusion)
    return rule.alphabet.symbol(type == 0 ? rule.vector_fusion.seed_a
                                          : rule.vector_fusion.seed_b);
  if (n == 0) return rule.alphabet.symbol(type);
  bool extended = false;
  return fusion_level_at(rule, n, &extended).type_names.at(type);
}

int fusion_type_index(const RuleSpec& rule, int n, const std::string& name) {
  const int count = fusion_type_count(rule, n);
  for (int i = 0; i < count; ++i)
    if (fusion_type_name(rule, n, i) == name) return i;
  throw UnknownSymbol("unknown supertile type at level " + std::to_string(n) +
                      ": " + name);
}

VectorFusionState vector_fusion_state(const RuleSpec& rule, int n,
                                      std::uint64_t cap) {
  if (rule.kind != RuleKind::VectorFusion)
    throw SemanticError("rule " + rule.name + " is not vector-fusion");
  if (n < 0) throw SemanticError("negative level");
  const auto& vf = rule.vector_fusion;
  VectorFusionState s;
  s.level = 0;
  s.a.cells[{0, 0}] = vf.seed_a;
  s.b.cells[{0, 0}] = vf.seed_b;
  s.k = {vf.k0[0], vf.k0[1]};
  s.l = {vf.l0[0], vf.l0[1]};
  for (int i = 0; i < n; ++i) {
    VectorFusionState next;
    next.level = s.level + 1;
    next.a = s.a;
    merge_translated(next.a, s.b, {s.k[0], s.k[1]}, cap);
    merge_translated(next.a, s.b, {s.l[0], s.l[1]}, cap);
    next.b = s.b;
    merge_translated(next.b, s.a, {s.k[0], s.k[1]}, cap);
    merge_translated(next.b, s.a, {s.l[0], s.l[1]}, cap);
    next.k = {vf.L[0][0] * s.k[0] + vf.L[0][1] * s.k[1],
              vf.L[1][0] * s.k[0] + vf.L[1][1] * s.k[1]};
    next.l = {vf.L[0][0] * s.l[0] + vf.L[0][1] * s.l[1],
              vf.L[1][0] * s.l[0] + vf.L[1][1] * s.l[1]};
    s = std::move(next);
  }
  return s;
}

LatticePatch fusion_supertile(const RuleSpec& rule, int type, int n,
                              std::uint64_t cap) {
  if (rule.kind == RuleKind::VectorFusion) {
    VectorFusionState s = vector_fusion_state(rule, n, cap);
    return type == 0 ? s.a : s.b;
  }
  if (rule.kind != RuleKind::Fusion)
    throw SemanticError("rule " + rule.name + " is not a fusion rule");
  std::map<std::pair<int, int>, LatticePatch> memo;
  return fusion_patch_impl(rule, type, n, cap, memo);
}

Word sadic_superword(const RuleSpec& rule, int letter, int n,
                     std::uint64_t cap) {
  if (rule.kind != RuleKind::Sadic)
    throw SemanticError("rule " + rule.name + " is not sadic");
  if (n < 0) throw SemanticError("negative level");
  const auto& sadic = rule.sadic;
  {
    auto alpha = sadic_level_alphabet(rule, n);
    if (std::find(alpha.begin(), alpha.end(), letter) == alpha.end())
      throw AlphabetMismatch("letter " + rule.alphabet.symbol(letter) +
                             " is not in the level-" + std::to_string(n) +
                             " alphabet");
  }
  Word w{{letter}};
  for (int i = n - 1; i >= 0; --i) {
    const SadicSub& sub = sadic.subs[sadic.sub_at(i)];
    for (int e : w.letters)
      if (sub.map.images[e].empty())
        throw AlphabetMismatch("letter " + rule.alphabet.symbol(e) +
                               " is not in the domain of sub " + sub.name);
    w = apply_sigma(sub.map, w, cap);
  }
  return w;
}

std::vector<int> sadic_level_alphabet(const RuleSpec& rule, int n) {
  if (rule.kind != RuleKind::Sadic)
    throw SemanticError("rule " + rule.name + " is not sadic");
  if (n == 0) {
    std::vector<int> all(rule.alphabet.size());
    for (int i = 0; i < rule.alphabet.size(); ++i) all[i] = i;
    return all;
  }
  return rule.sadic.subs[rule.sadic.sub_at(n - 1)].domain;
}

namespace {

std::set<std::vector<int>> subwords_at(const RuleSpec& rule, int ell,
                                       int horizon, std::uint64_t cap) {
  std::set<std::vector<int>> words;
  auto collect = [&](const Word& w) {
    if (static_cast<int>(w.letters.size()) < ell) return;
    for (std::size_t i = 0; i + ell <= w.letters.size(); ++i)
      words.insert(std::vector<int>(w.letters.begin() + i,
                                    w.letters.begin() + i + ell));
  };
  if (rule.kind == RuleKind::Sadic) {
    for (int letter : sadic_level_alphabet(rule, horizon))
      collect(sadic_superword(rule, letter, horizon, cap));
  } else {
    for (int letter = 0; letter < rule.alphabet.size(); ++letter)
      collect(superword(rule, letter, horizon, cap));
  }
  return words;
}

}  // namespace

LanguageResult legal_words(const RuleSpec& rule, int ell, int horizon,
                           std::uint64_t cap) {
  if (ell < 1) throw SemanticError("word length must be >= 1");
  LanguageResult result;
  result.horizon = horizon;
  result.words = subwords_at(rule, ell, horizon, cap);
  try {
    result.saturated = subwords_at(rule, ell, horizon + 1, cap) == result.words;
  } catch (const LevelOverflow&) {
    result.saturated = false;
  } catch (const LevelOutOfRange&) {
    result.saturated = false;
  }
  return result;
}

std::size_t complexity(const RuleSpec& rule, int ell, int horizon,
                       std::uint64_t cap) {
  return legal_words(rule, ell, horizon, cap).words.size();
}

RepetitivityResult repetitivity_radius(const RuleSpec& rule, const Word& patch,
                                       int horizon, std::uint64_t cap) {
  if (patch.letters.empty()) throw SemanticError("empty patch");
  const Word w = rule.kind == RuleKind::Sadic
                     ? sadic_superword(rule, sadic_level_alphabet(rule, horizon)[0],
                                       horizon, cap)
                     : superword(rule, 0, horizon, cap);
  const auto& text = w.letters;
  const auto& pat = patch.letters;
  std::vector<long long> hits;
  if (text.size() >= pat.size())
    for (std::size_t i = 0; i + pat.size() <= text.size(); ++i)
      if (std::equal(pat.begin(), pat.end(), text.begin() + i))
        hits.push_back(static_cast<long long>(i));
  if (hits.empty())
    throw PatchNotFound("patch does not occur in the level-" +
                        std::to_string(horizon) + " superword");
  const long long plen = static_cast<long long>(pat.size());
  long long radius = hits.front() + plen;  // leading windows
  radius = std::max(radius,
                    static_cast<long long>(text.size()) - hits.back());
  for (std::size_t j = 1; j < hits.size(); ++j)
    radius = std::max(radius, hits[j] - hits[j - 1] + plen - 1);
  return {radius, horizon};
}

std::string dump_word(const RuleSpec& rule, const Word& word) {
  std::ostringstream out;
  for (std::size_t i = 0; i < word.letters.size(); ++i)
    out << (i ? " " : "") << rule.alphabet.symbol(word.letters[i]);
  out << "\n";
  return out.str();
}

std::string dump_block(const RuleSpec& rule, const Block& block) {
  std::ostringstream out;
  int rows = 1;
  for (std::size_t i = 1; i < block.extents.size(); ++i)
    rows *= block.extents[i];
  const int row_len = block.extents[0];
  for (int r = 0; r < rows; ++r) {
    for (int x = 0; x < row_len; ++x)
      out << (x ? " " : "")
          << rule.alphabet.symbol(
                 block.cells[static_cast<std::size_t>(r) * row_len + x]);
    out << "\n";
  }
  return out.str();
}

std::string dump_lattice_patch(const RuleSpec& rule,
                               const LatticePatch& patch) {
  std::ostringstream out;
  for (const auto& [pos, letter] : patch.cells) {
    for (long long c : pos) out << c << " ";
    out << rule.alphabet.symbol(letter) << "\n";
  }
  return out.str();
}

std::string dump_interval_patch(const RuleSpec& rule,
                                const IntervalPatch& patch) {
  std::ostringstream out;
  for (const auto& tile : patch.tiles)
    out << rule.alphabet.symbol(tile.letter) << " " << tile.left << " "
        << tile.length << "\n";
  return out.str();
}

}  // namespace tilespec
