#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tilespec/rulespec.hpp"

namespace tilespec {

struct Word {
  std::vector<int> letters;
  bool operator==(const Word&) const = default;
};

// Row-major bottom-up: cell (x_1,..,x_d) at flat index
// x_1 + l_1*(x_2 + l_2*(x_3 + ...)).
struct Block {
  std::vector<int> extents;
  std::vector<int> cells;
  int at(const std::vector<int>& coord) const;
  bool operator==(const Block&) const = default;
};

struct IntervalTile {
  int letter;
  double left;
  double length;
};

struct IntervalPatch {
  std::vector<IntervalTile> tiles;
  double total_length() const {
    return tiles.empty() ? 0.0
                         : tiles.back().left + tiles.back().length -
                               tiles.front().left;
  }
};

struct LatticePatch {
  std::map<std::vector<long long>, int> cells;
  bool operator==(const LatticePatch&) const = default;
};

struct VectorFusionState {
  int level = 0;
  LatticePatch a, b;
  std::array<long long, 2> k{}, l{};
};

// sigma^n(letter). Throws LevelOverflow past the cell cap.
Word superword(const RuleSpec& rule, int letter, int n,
               std::uint64_t cap = kDefaultCellCap);
Word apply_sigma(const SymbolicPayload& sigma, const Word& word,
                 std::uint64_t cap = kDefaultCellCap);

Block superblock(const RuleSpec& rule, int letter, int n,
                 std::uint64_t cap = kDefaultCellCap);

// Tiles in sigma^n(letter) order starting at 0, abutting.
IntervalPatch supertile_interval(const RuleSpec& rule, int letter, int n,
                                 const std::vector<double>& lengths,
                                 std::uint64_t cap = kDefaultCellCap);

// Level-n supertile of a fusion or vector-fusion rule, resolved to level-0
// cells. `type` indexes the level-n type list (alphabet order at level 0).
LatticePatch fusion_supertile(const RuleSpec& rule, int type, int n,
                              std::uint64_t cap = kDefaultCellCap);
int fusion_type_count(const RuleSpec& rule, int n);
std::string fusion_type_name(const RuleSpec& rule, int n, int type);
int fusion_type_index(const RuleSpec& rule, int n, const std::string& name);

VectorFusionState vector_fusion_state(const RuleSpec& rule, int n,
                                      std::uint64_t cap = kDefaultCellCap);

// Composition sigma_0 ... sigma_{n-1}(letter) of the directive prefix.
Word sadic_superword(const RuleSpec& rule, int letter, int n,
                     std::uint64_t cap = kDefaultCellCap);
// Letters usable at level n (domain of the level-(n-1) substitution).
std::vector<int> sadic_level_alphabet(const RuleSpec& rule, int n);

struct LanguageResult {
  std::set<std::vector<int>> words;
  bool saturated = false;
  int horizon = 0;
};

// All length-ell subwords of all level-`horizon` superwords.
LanguageResult legal_words(const RuleSpec& rule, int ell, int horizon,
                           std::uint64_t cap = kDefaultCellCap);
std::size_t complexity(const RuleSpec& rule, int ell, int horizon,
                       std::uint64_t cap = kDefaultCellCap);

struct RepetitivityResult {
  long long radius = 0;
  int horizon = 0;
};

// Smallest window length R such that every length-R window of the
// level-`horizon` superword contains the given word.
RepetitivityResult repetitivity_radius(const RuleSpec& rule,
                                       const Word& patch, int horizon,
                                       std::uint64_t cap = kDefaultCellCap);

// Dump formats (External Interfaces).
std::string dump_word(const RuleSpec& rule, const Word& word);
std::string dump_block(const RuleSpec& rule, const Block& block);
std::string dump_lattice_patch(const RuleSpec& rule, const LatticePatch& patch);
std::string dump_interval_patch(const RuleSpec& rule,
                                const IntervalPatch& patch);

}  // namespace tilespec
