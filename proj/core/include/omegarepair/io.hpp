#pragma once

#include "omegarepair/model.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace omegarepair {

using Model = std::variant<KripkeStructure, NBA, RepairMachine>;

// Line-oriented formats, '#' starts a comment. Errors are Error(PARSE) with a
// "line L, column C:" prefix.
Model parse_model(std::string_view text);
KripkeStructure parse_kripke(std::string_view text);
NBA parse_nba(std::string_view text);
RepairMachine parse_rm(std::string_view text);

// States in index order, edges in canonical order.
std::string serialize_model(const KripkeStructure& k);
std::string serialize_model(const NBA& a);
std::string serialize_model(const RepairMachine& t);
std::string serialize_model(const Model& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// "2,0|1,4" (prefix|cycle, either side may be empty except the cycle).
Lasso<std::int64_t> parse_cost_lasso(std::string_view text);
// "a.b|c" with '.'-separated symbols.
Lasso<Symbol> parse_symbol_lasso(std::string_view text);
std::string symbol_lasso_str(const Lasso<Symbol>& w);

Aggregator parse_aggregator(std::string_view text); // "DSUM 1/2", "MEAN", ...

} // namespace omegarepair
