#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tilespec/common.hpp"

namespace tilespec {

// Ordered alphabet; index order fixes the row/column order of every
// transition matrix downstream.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  // Throws UnknownSymbol.
  int index(const std::string& token) const;
  std::optional<int> find(const std::string& token) const;

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

enum class RuleKind { Symbolic, Block, Inflation, Fusion, Sadic, VectorFusion };

std::string to_string(RuleKind kind);
std::optional<RuleKind> parse_kind(const std::string& token);

// sigma: letter index -> word of letter indices.
struct SymbolicPayload {
  std::vector<std::vector<int>> images;
};

struct InflationPayload {
  SymbolicPayload map;
  bool lengths_auto = true;
  std::vector<double> lengths;  // per symbol, when not auto
  bool check_lengths = false;
};

struct BlockPayload {
  std::vector<int> extents;  // l_1..l_d, each >= 2
  // Per symbol: row-major bottom-up array (x fastest, then y, then z, ...).
  std::vector<std::vector<int>> blocks;
  int cell_count() const {
    int k = 1;
    for (int e : extents) k *= e;
    return k;
  }
};

struct FusionPlacement {
  int constituent = 0;  // type index at the previous level
  std::vector<long long> offset;
};

struct FusionLevel {
  bool repeat = false;
  std::vector<std::string> type_names;
  std::vector<std::vector<FusionPlacement>> supertiles;  // per type
};

struct FusionPayload {
  std::vector<FusionLevel> levels;  // level n = levels[n-1]
  bool has_repeat() const {
    return !levels.empty() && levels.back().repeat;
  }
};

struct SadicSub {
  std::string name;
  SymbolicPayload map;                // over the global alphabet
  std::vector<int> domain;            // letters with an image
};

struct SadicPayload {
  std::vector<SadicSub> subs;
  std::vector<int> directive_prefix;  // indices into subs
  std::vector<int> directive_cycle;   // eventually-periodic tail (may be empty
                                      // only if prefix is used verbatim)
  // Substitution applied between level n+1 and level n.
  int sub_at(int n) const;
};

struct VectorFusionPayload {
  long long L[2][2] = {{0, 0}, {0, 0}};
  long long k0[2] = {0, 0};
  long long l0[2] = {0, 0};
  int seed_a = 0;  // alphabet indices of the two supertile types
  int seed_b = 1;
};

struct RuleSpec {
  std::string name;
  RuleKind kind = RuleKind::Symbolic;
  int dimension = 1;
  Alphabet alphabet;

  SymbolicPayload symbolic;
  InflationPayload inflation;
  BlockPayload block;
  FusionPayload fusion;
  SadicPayload sadic;
  VectorFusionPayload vector_fusion;

  // The symbolic map of a symbolic or inflation rule.
  const SymbolicPayload& sigma() const {
    return kind == RuleKind::Inflation ? inflation.map : symbolic;
  }
  bool is_constant_length() const;
  int constant_length() const;  // q, for constant-length symbolic rules
};

enum class Severity { Warning, ErrorLevel };

struct Issue {
  Severity severity;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;
  bool ok() const {
    for (const auto& i : issues)
      if (i.severity == Severity::ErrorLevel) return false;
    return true;
  }
};

}  // namespace tilespec
