#ifndef WCURV_EXPR_HPP
#define WCURV_EXPR_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "wcurv/errors.hpp"

namespace wcurv {

// Variable bindings for expression evaluation. Unbound variables error
// at evaluation time.
struct EvalEnv {
  std::array<std::optional<double>, 5> x;  // x0..x4
  std::optional<double> t;
  std::optional<double> m;
};

namespace detail {
struct ExprNode;
}

// Immutable arithmetic expression over coordinates x0..x4, t, the
// parameter m, constants pi and e, the binary operators + - * / ^
// (^ right-associative, binding tighter than unary minus), unary minus,
// and the calls sin cos tan sinh cosh tanh exp log sqrt abs.
class Expr {
public:
  Expr() = default;

  double eval(const EvalEnv& env) const;
  std::string print() const;
  bool structurally_equal(const Expr& other) const;
  explicit operator bool() const { return static_cast<bool>(root_); }

  friend Expr parse_expr(std::string_view src);

private:
  std::shared_ptr<const detail::ExprNode> root_;
};

// Throws ExprParseError with the byte offset on malformed input.
Expr parse_expr(std::string_view src);

// Convenience: parse + eval with only m bound (extents etc.).
double eval_constant_expr(std::string_view src, double m);

}  // namespace wcurv

#endif
