#pragma once

#include <string>

#include "tilespec/rulespec.hpp"

namespace tilespec {

// Parses complete rule-file contents. Throws SyntaxError, UnknownSymbol,
// DuplicateDefinition. Semantic problems beyond the grammar are left to
// validate().
RuleSpec parse_rule_file(const std::string& text);

// Canonical round-trippable form: parse(serialize(parse(t))) == parse(t).
std::string serialize(const RuleSpec& rule);

// Semantic checks per rule kind. Never throws on semantic problems.
ValidationReport validate(const RuleSpec& rule);

}  // namespace tilespec
