#include "tilespec/parser.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace tilespec {

Alphabet::Alphabet(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
    if (symbols_[i].empty()) throw SemanticError("empty alphabet symbol");
    if (!index_.emplace(symbols_[i], i).second)
      throw DuplicateDefinition("duplicate alphabet symbol: " + symbols_[i]);
  }
}

int Alphabet::index(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw UnknownSymbol("unknown symbol: " + token);
  return it->second;
}

std::optional<int> Alphabet::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Symbolic: return "symbolic";
    case RuleKind::Block: return "block";
    case RuleKind::Inflation: return "inflation";
    case RuleKind::Fusion: return "fusion";
    case RuleKind::Sadic: return "sadic";
    case RuleKind::VectorFusion: return "vector-fusion";
  }
  return "?";
}

std::optional<RuleKind> parse_kind(const std::string& token) {
  if (token == "symbolic") return RuleKind::Symbolic;
  if (token == "block") return RuleKind::Block;
  if (token == "inflation") return RuleKind::Inflation;
  if (token == "fusion") return RuleKind::Fusion;
  if (token == "sadic") return RuleKind::Sadic;
  if (token == "vector-fusion") return RuleKind::VectorFusion;
  return std::nullopt;
}

int SadicPayload::sub_at(int n) const {
  if (n < static_cast<int>(directive_prefix.size())) return directive_prefix[n];
  if (directive_cycle.empty())
    throw LevelOutOfRange("directive sequence exhausted at level " +
                          std::to_string(n));
  return directive_cycle[(n - directive_prefix.size()) %
                         directive_cycle.size()];
}

bool RuleSpec::is_constant_length() const {
  if (kind == RuleKind::Block) return true;
  if (kind != RuleKind::Symbolic && kind != RuleKind::Inflation) return false;
  const auto& images = sigma().images;
  if (images.empty()) return false;
  const size_t q = images[0].size();
  for (const auto& w : images)
    if (w.size() != q) return false;
  return true;
}

int RuleSpec::constant_length() const {
  if (kind == RuleKind::Block) return block.cell_count();
  if (!is_constant_length())
    throw NotConstantLength("rule " + name + " is not constant-length");
  return static_cast<int>(sigma().images[0].size());
}

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto pos = raw.find('#'); pos != std::string::npos)
      raw.erase(pos);
    Line line;
    line.number = number;
    std::istringstream ls(raw);
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Line> lines) : lines_(std::move(lines)) {}
  bool done() const { return pos_ >= lines_.size(); }
  const Line& peek() const {
    if (done()) throw SyntaxError(last_line_ + 1, 1, "unexpected end of file");
    return lines_[pos_];
  }
  const Line& next() {
    const Line& l = peek();
    last_line_ = l.number;
    ++pos_;
    return l;
  }
  int last_line() const { return last_line_; }

 private:
  std::vector<Line> lines_;
  size_t pos_ = 0;
  int last_line_ = 0;
};

[[noreturn]] void fail(const Line& line, int col, const std::string& expected) {
  throw SyntaxError(line.number, col, "expected " + expected);
}

long long parse_int(const Line& line, int col) {
  if (col >= static_cast<int>(line.tokens.size()))
    fail(line, col + 1, "integer");
  const std::string& t = line.tokens[col];
  size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (...) {
    fail(line, col + 1, "integer, got '" + t + "'");
  }
  if (used != t.size()) fail(line, col + 1, "integer, got '" + t + "'");
  return v;
}

double parse_float(const Line& line, const std::string& t, int col) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (...) {
    fail(line, col + 1, "number, got '" + t + "'");
  }
  if (used != t.size()) fail(line, col + 1, "number, got '" + t + "'");
  return v;
}

// "name:" or "name :" -> name
std::string strip_colon(const Line& line, int col) {
  if (col >= static_cast<int>(line.tokens.size())) fail(line, col + 1, "name");
  std::string t = line.tokens[col];
  bool colon = false;
  if (!t.empty() && t.back() == ':') {
    t.pop_back();
    colon = true;
  } else if (col + 1 < static_cast<int>(line.tokens.size()) &&
             line.tokens[col + 1] == ":") {
    colon = true;
  }
  if (!colon || t.empty()) fail(line, col + 1, "'name:'");
  return t;
}

std::vector<int> parse_word(const RuleSpec& rule, const Line& line, int from) {
  std::vector<int> word;
  for (int i = from; i < static_cast<int>(line.tokens.size()); ++i)
    word.push_back(rule.alphabet.index(line.tokens[i]));
  if (word.empty()) fail(line, from + 1, "non-empty word");
  return word;
}

// "map a -> a b"
void parse_map_line(const RuleSpec& rule, const Line& line,
                    SymbolicPayload& payload, std::vector<bool>& defined) {
  if (line.tokens.size() < 4 || line.tokens[2] != "->")
    fail(line, 2, "'map SYMBOL -> WORD'");
  const int letter = rule.alphabet.index(line.tokens[1]);
  if (defined[letter])
    throw DuplicateDefinition("duplicate map for symbol " + line.tokens[1]);
  defined[letter] = true;
  payload.images[letter] = parse_word(rule, line, 3);
}

void require_all_defined(const RuleSpec& rule, const std::vector<bool>& defined,
                         int end_line, const std::string& what) {
  for (int i = 0; i < rule.alphabet.size(); ++i)
    if (!defined[i])
      throw SyntaxError(end_line, 1,
                        "missing " + what + " for symbol " +
                            rule.alphabet.symbol(i));
}

void parse_symbolic_body(RuleSpec& rule, Cursor& cur, SymbolicPayload& payload,
                         const std::set<std::string>& stop_words) {
  payload.images.assign(rule.alphabet.size(), {});
  std::vector<bool> defined(rule.alphabet.size(), false);
  while (!cur.done() && cur.peek().tokens[0] == "map")
    parse_map_line(rule, cur.next(), payload, defined);
  if (!cur.done() && !stop_words.count(cur.peek().tokens[0]))
    fail(cur.peek(), 1, "'map' line");
  require_all_defined(rule, defined, cur.last_line(), "map");
}

void parse_block_body(RuleSpec& rule, Cursor& cur) {
  const Line& size_line = cur.next();
  if (size_line.tokens[0] != "size") fail(size_line, 1, "'size'");
  if (static_cast<int>(size_line.tokens.size()) != rule.dimension + 1)
    fail(size_line, 2, std::to_string(rule.dimension) + " lengths");
  for (int i = 0; i < rule.dimension; ++i) {
    long long l = parse_int(size_line, i + 1);
    if (l < 2) fail(size_line, i + 2, "length >= 2");
    rule.block.extents.push_back(static_cast<int>(l));
  }
  int rows_per_block = 1;
  for (int i = 1; i < rule.dimension; ++i)
    rows_per_block *= rule.block.extents[i];
  const int row_len = rule.block.extents[0];

  rule.block.blocks.assign(rule.alphabet.size(), {});
  std::vector<bool> defined(rule.alphabet.size(), false);
  while (!cur.done() && cur.peek().tokens[0] == "block") {
    const Line& head = cur.next();
    const int letter = rule.alphabet.index(strip_colon(head, 1));
    if (defined[letter])
      throw DuplicateDefinition("duplicate block for symbol " +
                                rule.alphabet.symbol(letter));
    defined[letter] = true;
    std::vector<int>& cells = rule.block.blocks[letter];
    cells.assign(static_cast<size_t>(rows_per_block) * row_len, 0);
    // Rows bottom-up: file row r holds cells with flat index r*row_len + x.
    for (int r = 0; r < rows_per_block; ++r) {
      const Line& row = cur.next();
      if (static_cast<int>(row.tokens.size()) != row_len)
        fail(row, 1, std::to_string(row_len) + " symbols in row");
      for (int x = 0; x < row_len; ++x)
        cells[static_cast<size_t>(r) * row_len + x] =
            rule.alphabet.index(row.tokens[x]);
    }
  }
  require_all_defined(rule, defined, cur.last_line(), "block");
}

void parse_fusion_body(RuleSpec& rule, Cursor& cur) {
  while (!cur.done()) {
    const Line& head = cur.next();
    if (head.tokens[0] != "level") fail(head, 1, "'level'");
    if (head.tokens.size() != 2) fail(head, 2, "level number or 'repeat'");
    FusionLevel level;
    if (head.tokens[1] == "repeat") {
      level.repeat = true;
    } else {
      long long n = parse_int(head, 1);
      if (n != static_cast<long long>(rule.fusion.levels.size()) + 1)
        fail(head, 2, "level " +
                          std::to_string(rule.fusion.levels.size() + 1) +
                          " (levels must be consecutive)");
    }
    // Constituent names live at the previous level.
    auto constituent_index = [&](const Line& line, int col) -> int {
      const std::string& t = line.tokens[col];
      if (rule.fusion.levels.empty())
        return rule.alphabet.index(t);
      const auto& prev = rule.fusion.levels.back().type_names;
      auto it = std::find(prev.begin(), prev.end(), t);
      if (it == prev.end())
        throw UnknownSymbol("unknown constituent at level " +
                            std::to_string(rule.fusion.levels.size() + 1) +
                            ": " + t);
      return static_cast<int>(it - prev.begin());
    };
    while (!cur.done() && cur.peek().tokens[0] == "super") {
      const Line& super_head = cur.next();
      const std::string type = strip_colon(super_head, 1);
      if (std::find(level.type_names.begin(), level.type_names.end(), type) !=
          level.type_names.end())
        throw DuplicateDefinition("duplicate supertile type: " + type);
      level.type_names.push_back(type);
      std::vector<FusionPlacement> placements;
      while (!cur.done() && cur.peek().tokens[0] == "place") {
        const Line& pl = cur.next();
        if (static_cast<int>(pl.tokens.size()) != 3 + rule.dimension ||
            pl.tokens[2] != "at")
          fail(pl, 2, "'place SYMBOL at OFFSET...'");
        FusionPlacement placement;
        placement.constituent = constituent_index(pl, 1);
        for (int i = 0; i < rule.dimension; ++i)
          placement.offset.push_back(parse_int(pl, 3 + i));
        placements.push_back(std::move(placement));
      }
      if (placements.empty())
        throw SyntaxError(cur.last_line(), 1,
                          "supertile " + type + " has no placements");
      level.supertiles.push_back(std::move(placements));
    }
    if (level.type_names.empty())
      throw SyntaxError(cur.last_line(), 1, "level has no supertiles");
    const bool was_repeat = level.repeat;
    rule.fusion.levels.push_back(std::move(level));
    if (was_repeat) {
      if (!cur.done()) fail(cur.peek(), 1, "end of file after 'level repeat'");
      break;
    }
  }
  if (rule.fusion.levels.empty())
    throw SyntaxError(cur.last_line(), 1, "fusion rule needs a level");
}

void parse_inflation_lengths(RuleSpec& rule, Cursor& cur) {
  rule.inflation.lengths_auto = true;
  rule.inflation.lengths.assign(rule.alphabet.size(), 0.0);
  bool seen_lengths = false;
  while (!cur.done()) {
    const Line& line = cur.next();
    if (line.tokens[0] == "check-lengths") {
      rule.inflation.check_lengths = true;
      continue;
    }
    if (line.tokens[0] != "lengths") fail(line, 1, "'lengths'");
    if (seen_lengths) throw DuplicateDefinition("duplicate lengths directive");
    seen_lengths = true;
    if (line.tokens.size() == 2 && line.tokens[1] == "auto") continue;
    rule.inflation.lengths_auto = false;
    std::vector<bool> defined(rule.alphabet.size(), false);
    for (int i = 1; i < static_cast<int>(line.tokens.size()); ++i) {
      const std::string& t = line.tokens[i];
      auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == t.size())
        fail(line, i + 1, "'SYMBOL=LENGTH'");
      const int letter = rule.alphabet.index(t.substr(0, eq));
      if (defined[letter])
        throw DuplicateDefinition("duplicate length for symbol " +
                                  t.substr(0, eq));
      defined[letter] = true;
      double v = parse_float(line, t.substr(eq + 1), i);
      rule.inflation.lengths[letter] = v;
    }
    require_all_defined(rule, defined, line.number, "length");
  }
  if (!seen_lengths)
    throw SyntaxError(cur.last_line(), 1, "inflation rule needs 'lengths'");
}

void parse_sadic_body(RuleSpec& rule, Cursor& cur) {
  while (!cur.done() && cur.peek().tokens[0] == "sub") {
    const Line& head = cur.next();
    SadicSub sub;
    sub.name = strip_colon(head, 1);
    for (const auto& other : rule.sadic.subs)
      if (other.name == sub.name)
        throw DuplicateDefinition("duplicate sub name: " + sub.name);
    sub.map.images.assign(rule.alphabet.size(), {});
    std::vector<bool> defined(rule.alphabet.size(), false);
    while (!cur.done() && cur.peek().tokens[0] == "map")
      parse_map_line(rule, cur.next(), sub.map, defined);
    for (int i = 0; i < rule.alphabet.size(); ++i)
      if (defined[i]) sub.domain.push_back(i);
    if (sub.domain.empty())
      throw SyntaxError(cur.last_line(), 1, "sub " + sub.name + " is empty");
    rule.sadic.subs.push_back(std::move(sub));
  }
  if (rule.sadic.subs.empty())
    throw SyntaxError(cur.last_line(), 1, "sadic rule needs a sub");
  const Line& dir = cur.next();
  if (dir.tokens[0] != "directive") fail(dir, 1, "'directive'");
  auto sub_index = [&](const Line& line, int col) -> int {
    const std::string& t = line.tokens[col];
    for (int i = 0; i < static_cast<int>(rule.sadic.subs.size()); ++i)
      if (rule.sadic.subs[i].name == t) return i;
    throw UnknownSymbol("unknown sub in directive: " + t);
  };
  bool in_cycle = false;
  for (int i = 1; i < static_cast<int>(dir.tokens.size()); ++i) {
    if (dir.tokens[i] == "cycle") {
      if (in_cycle) fail(dir, i + 1, "single 'cycle'");
      in_cycle = true;
      continue;
    }
    (in_cycle ? rule.sadic.directive_cycle : rule.sadic.directive_prefix)
        .push_back(sub_index(dir, i));
  }
  if (rule.sadic.directive_prefix.empty() && rule.sadic.directive_cycle.empty())
    fail(dir, 2, "at least one sub name");
  if (in_cycle && rule.sadic.directive_cycle.empty())
    fail(dir, static_cast<int>(dir.tokens.size()), "sub names after 'cycle'");
  if (!cur.done()) fail(cur.peek(), 1, "end of file after 'directive'");
}

void parse_vector_fusion_body(RuleSpec& rule, Cursor& cur) {
  bool got_L = false, got_k0 = false, got_l0 = false, got_seeds = false;
  while (!cur.done()) {
    const Line& line = cur.next();
    const std::string& key = line.tokens[0];
    if (key == "L") {
      if (line.tokens.size() != 5) fail(line, 2, "4 integers");
      rule.vector_fusion.L[0][0] = parse_int(line, 1);
      rule.vector_fusion.L[0][1] = parse_int(line, 2);
      rule.vector_fusion.L[1][0] = parse_int(line, 3);
      rule.vector_fusion.L[1][1] = parse_int(line, 4);
      got_L = true;
    } else if (key == "k0" || key == "l0") {
      if (line.tokens.size() != 3) fail(line, 2, "2 integers");
      long long* v = key == "k0" ? rule.vector_fusion.k0 : rule.vector_fusion.l0;
      v[0] = parse_int(line, 1);
      v[1] = parse_int(line, 2);
      (key == "k0" ? got_k0 : got_l0) = true;
    } else if (key == "seeds") {
      if (line.tokens.size() != 3) fail(line, 2, "2 symbols");
      rule.vector_fusion.seed_a = rule.alphabet.index(line.tokens[1]);
      rule.vector_fusion.seed_b = rule.alphabet.index(line.tokens[2]);
      got_seeds = true;
    } else {
      fail(line, 1, "'L', 'k0', 'l0' or 'seeds'");
    }
  }
  if (!(got_L && got_k0 && got_l0 && got_seeds))
    throw SyntaxError(cur.last_line(), 1,
                      "vector-fusion rule needs L, k0, l0 and seeds");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RuleSpec parse_rule_file(const std::string& text) {
  Cursor cur(tokenize(text));
  RuleSpec rule;

  const Line& name_line = cur.next();
  if (name_line.tokens[0] != "rule" || name_line.tokens.size() != 2)
    fail(name_line, 1, "'rule NAME'");
  rule.name = name_line.tokens[1];

  const Line& kind_line = cur.next();
  if (kind_line.tokens[0] != "kind" || kind_line.tokens.size() != 2)
    fail(kind_line, 1, "'kind KIND'");
  auto kind = parse_kind(kind_line.tokens[1]);
  if (!kind) fail(kind_line, 2, "a rule kind");
  rule.kind = *kind;

  const Line& dim_line = cur.next();
  if (dim_line.tokens[0] != "dim" || dim_line.tokens.size() != 2)
    fail(dim_line, 1, "'dim INT'");
  long long d = parse_int(dim_line, 1);
  if (d < 1) fail(dim_line, 2, "positive dimension");
  rule.dimension = static_cast<int>(d);

  const Line& alpha_line = cur.next();
  if (alpha_line.tokens[0] != "alphabet" || alpha_line.tokens.size() < 2)
    fail(alpha_line, 1, "'alphabet SYMBOL+'");
  rule.alphabet = Alphabet(std::vector<std::string>(alpha_line.tokens.begin() + 1,
                                                    alpha_line.tokens.end()));

  switch (rule.kind) {
    case RuleKind::Symbolic:
      if (rule.dimension != 1)
        throw SyntaxError(dim_line.number, 2, "symbolic rules need dim 1");
      parse_symbolic_body(rule, cur, rule.symbolic, {});
      if (!cur.done()) fail(cur.peek(), 1, "end of file");
      break;
    case RuleKind::Inflation:
      if (rule.dimension != 1)
        throw SyntaxError(dim_line.number, 2, "inflation rules need dim 1");
      parse_symbolic_body(rule, cur, rule.inflation.map,
                          {"lengths", "check-lengths"});
      parse_inflation_lengths(rule, cur);
      break;
    case RuleKind::Block:
      parse_block_body(rule, cur);
      if (!cur.done()) fail(cur.peek(), 1, "end of file");
      break;
    case RuleKind::Fusion:
      parse_fusion_body(rule, cur);
      break;
    case RuleKind::Sadic:
      if (rule.dimension != 1)
        throw SyntaxError(dim_line.number, 2, "sadic rules need dim 1");
      parse_sadic_body(rule, cur);
      break;
    case RuleKind::VectorFusion:
      if (rule.dimension != 2)
        throw SyntaxError(dim_line.number, 2, "vector-fusion rules need dim 2");
      parse_vector_fusion_body(rule, cur);
      break;
  }
  return rule;
}

std::string serialize(const RuleSpec& rule) {
  std::ostringstream out;
  out << "rule " << rule.name << "\n";
  out << "kind " << to_string(rule.kind) << "\n";
  out << "dim " << rule.dimension << "\n";
  out << "alphabet";
  for (const auto& s : rule.alphabet.symbols()) out << " " << s;
  out << "\n";

  auto emit_maps = [&](const SymbolicPayload& payload) {
    for (int i = 0; i < rule.alphabet.size(); ++i) {
      if (payload.images[i].empty()) continue;
      out << "map " << rule.alphabet.symbol(i) << " ->";
      for (int j : payload.images[i]) out << " " << rule.alphabet.symbol(j);
      out << "\n";
    }
  };

  switch (rule.kind) {
    case RuleKind::Symbolic:
      emit_maps(rule.symbolic);
      break;
    case RuleKind::Inflation:
      emit_maps(rule.inflation.map);
      if (rule.inflation.lengths_auto) {
        out << "lengths auto\n";
      } else {
        out << "lengths";
        for (int i = 0; i < rule.alphabet.size(); ++i)
          out << " " << rule.alphabet.symbol(i) << "="
              << format_double(rule.inflation.lengths[i]);
        out << "\n";
      }
      if (rule.inflation.check_lengths) out << "check-lengths\n";
      break;
    case RuleKind::Block: {
      out << "size";
      for (int e : rule.block.extents) out << " " << e;
      out << "\n";
      int rows = 1;
      for (size_t i = 1; i < rule.block.extents.size(); ++i)
        rows *= rule.block.extents[i];
      const int row_len = rule.block.extents[0];
      for (int letter = 0; letter < rule.alphabet.size(); ++letter) {
        out << "block " << rule.alphabet.symbol(letter) << ":\n";
        for (int r = 0; r < rows; ++r) {
          for (int x = 0; x < row_len; ++x)
            out << (x ? " " : "")
                << rule.alphabet.symbol(
                       rule.block.blocks[letter][static_cast<size_t>(r) * row_len + x]);
          out << "\n";
        }
      }
      break;
    }
    case RuleKind::Fusion: {
      for (size_t n = 0; n < rule.fusion.levels.size(); ++n) {
        const FusionLevel& level = rule.fusion.levels[n];
        if (level.repeat)
          out << "level repeat\n";
        else
          out << "level " << (n + 1) << "\n";
        const std::vector<std::string>* prev_names =
            n == 0 ? nullptr : &rule.fusion.levels[n - 1].type_names;
        for (size_t t = 0; t < level.type_names.size(); ++t) {
          out << "super " << level.type_names[t] << ":\n";
          auto placements = level.supertiles[t];
          std::sort(placements.begin(), placements.end(),
                    [](const FusionPlacement& a, const FusionPlacement& b) {
                      return a.offset != b.offset ? a.offset < b.offset
                                                  : a.constituent < b.constituent;
                    });
          for (const auto& p : placements) {
            out << "place "
                << (prev_names ? (*prev_names)[p.constituent]
                               : rule.alphabet.symbol(p.constituent))
                << " at";
            for (long long o : p.offset) out << " " << o;
            out << "\n";
          }
        }
      }
      break;
    }
    case RuleKind::Sadic: {
      for (const auto& sub : rule.sadic.subs) {
        out << "sub " << sub.name << ":\n";
        emit_maps(sub.map);
      }
      out << "directive";
      for (int i : rule.sadic.directive_prefix)
        out << " " << rule.sadic.subs[i].name;
      if (!rule.sadic.directive_cycle.empty()) {
        out << " cycle";
        for (int i : rule.sadic.directive_cycle)
          out << " " << rule.sadic.subs[i].name;
      }
      out << "\n";
      break;
    }
    case RuleKind::VectorFusion: {
      const auto& vf = rule.vector_fusion;
      out << "L " << vf.L[0][0] << " " << vf.L[0][1] << " " << vf.L[1][0]
          << " " << vf.L[1][1] << "\n";
      out << "k0 " << vf.k0[0] << " " << vf.k0[1] << "\n";
      out << "l0 " << vf.l0[0] << " " << vf.l0[1] << "\n";
      out << "seeds " << rule.alphabet.symbol(vf.seed_a) << " "
          << rule.alphabet.symbol(vf.seed_b) << "\n";
      break;
    }
  }
  return out.str();
}

}  // namespace tilespec
