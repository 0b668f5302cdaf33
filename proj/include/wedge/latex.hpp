#pragma once

// LaTeX rendering of expressions (and coordinate names) for --emit latex.

#include <string>

#include "wedge/expr.hpp"

namespace wedge::sym {

// x_1 -> x_{1}, xd^12 -> \dot{x}^{12}, y_12^3 -> y_{12}^{3}, xp^1 -> x'^{1}
std::string latex_name(const std::string& coordinate_name);

std::string to_latex(const Expr& e);

} // namespace wedge::sym
