#pragma once

#include <stdexcept>
#include <string>

namespace urnlab {

// Thrown when a computation would exceed its configured resource budget
// (dense pmf boxes, convolution step counts). Distinct from invalid input:
// the request is well formed, it is just too large for the exact path.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EvalMode { Exact, MonteCarlo, Auto };

EvalMode parse_eval_mode(const std::string& s);

// All CSV writers print floating point with 12 significant digits.
std::string fmt_g12(double v);

}  // namespace urnlab
