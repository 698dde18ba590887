#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "tilespec/parser.hpp"

#ifndef RULES_DIR
#define RULES_DIR "rules"
#endif

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline tilespec::RuleSpec load_rule(const std::string& name) {
  return tilespec::parse_rule_file(read_file(std::string(RULES_DIR) + "/" + name));
}

inline tilespec::RuleSpec parse_text(const std::string& text) {
  return tilespec::parse_rule_file(text);
}
