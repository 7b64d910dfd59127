#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "projmetric/expr.hpp"

namespace projmetric {

// Compiles an elementary expression in one variable (decimals, + - * / ^,
// exp log sin cos tan sinh cosh sqrt, pi) into a callback producing the
// value and derivatives via univariate Taylor arithmetic. Named constants
// may be supplied (e.g. parameter values).
UnivariateFn compile_univariate(std::string_view text, const std::string& variable,
                                const std::map<std::string, double>& constants = {});

// Plain double evaluation of an elementary expression in several named
// variables; used by tests as an independent oracle.
double evaluate_elementary(std::string_view text, const std::map<std::string, double>& values);

}  // namespace projmetric
