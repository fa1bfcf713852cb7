#pragma once

#include <string>
#include <vector>

#include "meanreflect/mean_sp.hpp"

namespace meanreflect::io {

// 17 significant digits, '.' decimal point; negative zero is normalised so
// formatting is a pure function of the value.
std::string format_double(double v);

// Writes content to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

// Mean-solution CSV: one row per grid time with columns
// t,y,l,u,lbar,ubar,k,eh,x_mean,x_std. Absent barriers serialise as +-inf.
std::string solution_csv(const MeanSolution& sol);
MeanSolution parse_solution_csv(const std::string& text);

// Deterministic-solution CSV: t,y,l,u,k,x.
std::string deterministic_csv(const GridPath& y, const BarrierPair& barriers,
                              const SkorokhodSolution& sol);

}  // namespace meanreflect::io
