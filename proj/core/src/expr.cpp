#include "wcurv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <vector>

namespace wcurv {
namespace detail {

enum class Op { Add, Sub, Mul, Div, Pow };
enum class Fn { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };
enum class VarId { X0, X1, X2, X3, X4, T, M };

struct ExprNode {
  enum class Kind { Number, Var, Neg, Binary, Call } kind;
  std::size_t offset = 0;  // byte offset in the source, for diagnostics

  double number = 0.0;
  VarId var = VarId::X0;
  Op op = Op::Add;
  Fn fn = Fn::Sin;
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Sinh: return "sinh";
    case Fn::Cosh: return "cosh";
    case Fn::Tanh: return "tanh";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    case Fn::Abs: return "abs";
  }
  return "?";
}

const char* var_name(VarId v) {
  switch (v) {
    case VarId::X0: return "x0";
    case VarId::X1: return "x1";
    case VarId::X2: return "x2";
    case VarId::X3: return "x3";
    case VarId::X4: return "x4";
    case VarId::T: return "t";
    case VarId::M: return "m";
  }
  return "?";
}

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }
  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  // Reported offsets are 1-based.
  [[noreturn]] void fail(const std::string& msg) {
    throw ExprParseError(pos + 1, msg);
  }

  NodePtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

  NodePtr number(double v, std::size_t off) {
    ExprNode n;
    n.kind = ExprNode::Kind::Number;
    n.number = v;
    n.offset = off;
    return make(std::move(n));
  }

  NodePtr binary(Op op, std::size_t off, NodePtr a, NodePtr b) {
    ExprNode n;
    n.kind = ExprNode::Kind::Binary;
    n.op = op;
    n.offset = off;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
  }

  NodePtr parse_add() {
    NodePtr lhs = parse_mul();
    for (;;) {
      skip_ws();
      const std::size_t off = pos;
      if (accept('+'))
        lhs = binary(Op::Add, off, lhs, parse_mul());
      else if (accept('-'))
        lhs = binary(Op::Sub, off, lhs, parse_mul());
      else
        return lhs;
    }
  }

  NodePtr parse_mul() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t off = pos;
      if (accept('*'))
        lhs = binary(Op::Mul, off, lhs, parse_unary());
      else if (accept('/'))
        lhs = binary(Op::Div, off, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    const std::size_t off = pos;
    if (accept('-')) {
      ExprNode n;
      n.kind = ExprNode::Kind::Neg;
      n.offset = off;
      n.a = parse_unary();
      return make(std::move(n));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    const std::size_t off = pos;
    if (accept('^')) {
      // Right-associative; the exponent may itself be negated.
      return binary(Op::Pow, off, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of expression");
    const std::size_t off = pos;
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src.data() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos += static_cast<std::size_t>(end - begin);
      return number(v, off);
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_add();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[end])) ||
              src[end] == '_'))
        ++end;
      const std::string_view name = src.substr(pos, end - pos);
      pos = end;

      if (name == "pi") return number(3.14159265358979323846, off);
      if (name == "e") return number(2.71828182845904523536, off);

      static constexpr std::pair<std::string_view, VarId> vars[] = {
          {"x0", VarId::X0}, {"x1", VarId::X1}, {"x2", VarId::X2},
          {"x3", VarId::X3}, {"x4", VarId::X4}, {"t", VarId::T},
          {"m", VarId::M}};
      for (const auto& [vn, vid] : vars) {
        if (name == vn) {
          ExprNode n;
          n.kind = ExprNode::Kind::Var;
          n.var = vid;
          n.offset = off;
          return make(std::move(n));
        }
      }

      static constexpr std::pair<std::string_view, Fn> fns[] = {
          {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},
          {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh},
          {"exp", Fn::Exp},   {"log", Fn::Log},   {"sqrt", Fn::Sqrt},
          {"abs", Fn::Abs}};
      for (const auto& [fname, fid] : fns) {
        if (name == fname) {
          skip_ws();
          if (!accept('(')) fail("expected '(' after function name");
          NodePtr arg = parse_add();
          if (!accept(')')) fail("expected ')'");
          ExprNode n;
          n.kind = ExprNode::Kind::Call;
          n.fn = fid;
          n.offset = off;
          n.a = std::move(arg);
          return make(std::move(n));
        }
      }
      throw ExprParseError(off + 1, "unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

double eval_node(const ExprNode& n, const EvalEnv& env) {
  switch (n.kind) {
    case ExprNode::Kind::Number:
      return n.number;
    case ExprNode::Kind::Var: {
      std::optional<double> v;
      switch (n.var) {
        case VarId::X0: v = env.x[0]; break;
        case VarId::X1: v = env.x[1]; break;
        case VarId::X2: v = env.x[2]; break;
        case VarId::X3: v = env.x[3]; break;
        case VarId::X4: v = env.x[4]; break;
        case VarId::T: v = env.t; break;
        case VarId::M: v = env.m; break;
      }
      if (!v)
        throw ExprEvalError(n.offset + 1, std::string("unbound variable '") +
                                              var_name(n.var) + "'");
      return *v;
    }
    case ExprNode::Kind::Neg:
      return -eval_node(*n.a, env);
    case ExprNode::Kind::Binary: {
      const double a = eval_node(*n.a, env);
      const double b = eval_node(*n.b, env);
      switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
          if (b == 0.0) throw ExprEvalError(n.offset + 1, "division by zero");
          return a / b;
        case Op::Pow: {
          // Integer fast path keeps small powers exact.
          if (b == std::floor(b) && std::fabs(b) <= 64.0) {
            const long e = static_cast<long>(b);
            if (a == 0.0 && e < 0)
              throw ExprEvalError(n.offset + 1, "zero raised to a negative power");
            double base = a, acc = 1.0;
            long k = e < 0 ? -e : e;
            while (k > 0) {
              if (k & 1) acc *= base;
              base *= base;
              k >>= 1;
            }
            return e < 0 ? 1.0 / acc : acc;
          }
          if (a < 0.0)
            throw ExprEvalError(n.offset + 1,
                                "negative base with non-integer exponent");
          if (a == 0.0 && b < 0.0)
            throw ExprEvalError(n.offset + 1, "zero raised to a negative power");
          return std::pow(a, b);
        }
      }
      break;
    }
    case ExprNode::Kind::Call: {
      const double a = eval_node(*n.a, env);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Tan: return std::tan(a);
        case Fn::Sinh: return std::sinh(a);
        case Fn::Cosh: return std::cosh(a);
        case Fn::Tanh: return std::tanh(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Log:
          if (!(a > 0.0))
            throw ExprEvalError(n.offset + 1, "log of a non-positive value");
          return std::log(a);
        case Fn::Sqrt:
          if (a < 0.0)
            throw ExprEvalError(n.offset + 1, "sqrt of a negative value");
          return std::sqrt(a);
        case Fn::Abs: return std::fabs(a);
      }
      break;
    }
  }
  throw ExprEvalError(n.offset + 1, "internal: bad expression node");
}

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Binary:
      switch (n.op) {
        case Op::Add: case Op::Sub: return 1;
        case Op::Mul: case Op::Div: return 2;
        case Op::Pow: return 4;
      }
      return 1;
    case ExprNode::Kind::Neg: return 3;
    default: return 5;
  }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case ExprNode::Kind::Var:
      out += var_name(n.var);
      return;
    case ExprNode::Kind::Neg:
      out += '-';
      print_child(*n.a, precedence(*n.a) < precedence(n), out);
      return;
    case ExprNode::Kind::Binary: {
      const int p = precedence(n);
      const char* ops = nullptr;
      switch (n.op) {
        case Op::Add: ops = " + "; break;
        case Op::Sub: ops = " - "; break;
        case Op::Mul: ops = "*"; break;
        case Op::Div: ops = "/"; break;
        case Op::Pow: ops = "^"; break;
      }
      print_child(*n.a, precedence(*n.a) < p, out);
      out += ops;
      const bool right_parens =
          n.op == Op::Pow ? false : precedence(*n.b) <= p;
      print_child(*n.b, right_parens, out);
      return;
    }
    case ExprNode::Kind::Call:
      out += fn_name(n.fn);
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprNode::Kind::Number: return a.number == b.number;
    case ExprNode::Kind::Var: return a.var == b.var;
    case ExprNode::Kind::Neg: return equal_nodes(*a.a, *b.a);
    case ExprNode::Kind::Binary:
      return a.op == b.op && equal_nodes(*a.a, *b.a) && equal_nodes(*a.b, *b.b);
    case ExprNode::Kind::Call:
      return a.fn == b.fn && equal_nodes(*a.a, *b.a);
  }
  return false;
}

}  // namespace
}  // namespace detail

double Expr::eval(const EvalEnv& env) const {
  if (!root_) throw ExprEvalError(0, "empty expression");
  const double v = detail::eval_node(*root_, env);
  if (!std::isfinite(v))
    throw ExprEvalError(root_->offset + 1, "non-finite result");
  return v;
}

std::string Expr::print() const {
  if (!root_) return "";
  std::string out;
  detail::print_node(*root_, out);
  return out;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (!root_ || !other.root_) return root_ == other.root_;
  return detail::equal_nodes(*root_, *other.root_);
}

Expr parse_expr(std::string_view src) {
  detail::Parser p{src};
  Expr e;
  e.root_ = p.parse_add();
  p.skip_ws();
  if (p.pos != src.size())
    throw ExprParseError(p.pos + 1, "trailing input after expression");
  return e;
}

double eval_constant_expr(std::string_view src, double m) {
  EvalEnv env;
  env.m = m;
  return parse_expr(src).eval(env);
}

}  // namespace wcurv
