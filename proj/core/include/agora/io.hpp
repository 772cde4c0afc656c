#pragma once

#include <string>
#include <vector>

#include "agora/market.hpp"
#include "agora/solver.hpp"
#include "agora/verify.hpp"

namespace agora {

// Instance files: {"utilities": [[non-negative integers]], "name": optional}.
// Ragged rows, negative or non-integer entries are rejected.
struct Instance {
  Market market;
  std::string name;
};

Instance parse_instance_json(const std::string& text);
std::string instance_to_json(const Market& market, const std::string& name = "");

// Solution files carry prices as decimal strings (they may exceed any
// machine word) and allocations as exact fractions.
std::string solution_to_json(const Solution& solution);

struct ParsedSolution {
  std::vector<BigInt> prices;
};

ParsedSolution parse_solution_json(const std::string& text);

std::string report_to_json(const EquilibriumReport& report);

// One line per iteration, streamable.
std::string iteration_record_to_json(const IterationRecord& record);

}  // namespace agora
