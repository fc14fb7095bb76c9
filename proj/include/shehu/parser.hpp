#pragma once

#include <string_view>
#include <variant>

#include "shehu/expr.hpp"
#include "shehu/tf_expr.hpp"

namespace shehu {

using AnyExpr = std::variant<Expr, TFExpr>;

// The domain is chosen by the symbols used: q r s t for functions,
// h j k l m n o p alpha for images. Mixing them is a KindMismatch error.
AnyExpr parse(std::string_view text);
Expr parse_expr(std::string_view text);
TFExpr parse_tf(std::string_view text);

}  // namespace shehu
