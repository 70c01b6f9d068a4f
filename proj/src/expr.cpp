#include "eulab/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eulab/errors.hpp"

namespace eulab::expr {

enum class Kind { constant, variable, add, sub, mul, div, neg, pow, sin, cos, tan, exp, log, sqrt };

struct Node {
  Kind kind;
  double value = 0.0;  // constant value, or the exponent for pow
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_const(double v) { return std::make_shared<Node>(Node{Kind::constant, v, nullptr, nullptr}); }
NodePtr make_var() { return std::make_shared<Node>(Node{Kind::variable, 0.0, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::constant; }

double apply_unary(Kind k, double x) {
  switch (k) {
    case Kind::neg: return -x;
    case Kind::sin: return std::sin(x);
    case Kind::cos: return std::cos(x);
    case Kind::tan: return std::tan(x);
    case Kind::exp: return std::exp(x);
    case Kind::log: return std::log(x);
    case Kind::sqrt: return std::sqrt(x);
    default: return x;
  }
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  return std::make_shared<Node>(Node{Kind::add, 0.0, std::move(a), std::move(b)});
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->kind == Kind::neg) return a->a;
  return std::make_shared<Node>(Node{Kind::neg, 0.0, std::move(a), nullptr});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  return std::make_shared<Node>(Node{Kind::sub, 0.0, std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  return std::make_shared<Node>(Node{Kind::mul, 0.0, std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return make_const(a->value / b->value);
  return std::make_shared<Node>(Node{Kind::div, 0.0, std::move(a), std::move(b)});
}

NodePtr pow(NodePtr a, double e) {
  if (e == 0.0) return make_const(1.0);
  if (e == 1.0) return a;
  if (is_const(a)) return make_const(std::pow(a->value, e));
  return std::make_shared<Node>(Node{Kind::pow, e, std::move(a), nullptr});
}

NodePtr func(Kind k, NodePtr a) {
  if (is_const(a)) return make_const(apply_unary(k, a->value));
  return std::make_shared<Node>(Node{k, 0.0, std::move(a), nullptr});
}

NodePtr differentiate(const NodePtr& n) {
  switch (n->kind) {
    case Kind::constant: return make_const(0.0);
    case Kind::variable: return make_const(1.0);
    case Kind::add: return add(differentiate(n->a), differentiate(n->b));
    case Kind::sub: return sub(differentiate(n->a), differentiate(n->b));
    case Kind::mul:
      return add(mul(differentiate(n->a), n->b), mul(n->a, differentiate(n->b)));
    case Kind::div:
      return div(sub(mul(differentiate(n->a), n->b), mul(n->a, differentiate(n->b))),
                 pow(n->b, 2.0));
    case Kind::neg: return neg(differentiate(n->a));
    case Kind::pow:
      return mul(mul(make_const(n->value), pow(n->a, n->value - 1.0)), differentiate(n->a));
    case Kind::sin: return mul(func(Kind::cos, n->a), differentiate(n->a));
    case Kind::cos: return neg(mul(func(Kind::sin, n->a), differentiate(n->a)));
    case Kind::tan:
      return div(differentiate(n->a), pow(func(Kind::cos, n->a), 2.0));
    case Kind::exp: return mul(n, differentiate(n->a));
    case Kind::log: return div(differentiate(n->a), n->a);
    case Kind::sqrt: return div(differentiate(n->a), mul(make_const(2.0), n));
  }
  return make_const(0.0);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print(const NodePtr& n, const std::string& var, std::ostringstream& os) {
  auto binary = [&](const char* op) {
    os << '(';
    print(n->a, var, os);
    os << ' ' << op << ' ';
    print(n->b, var, os);
    os << ')';
  };
  switch (n->kind) {
    case Kind::constant: os << format_number(n->value); break;
    case Kind::variable: os << var; break;
    case Kind::add: binary("+"); break;
    case Kind::sub: binary("-"); break;
    case Kind::mul: binary("*"); break;
    case Kind::div: binary("/"); break;
    case Kind::neg: os << "(-"; print(n->a, var, os); os << ')'; break;
    case Kind::pow: os << '('; print(n->a, var, os); os << ")^" << format_number(n->value); break;
    case Kind::sin: os << "sin("; print(n->a, var, os); os << ')'; break;
    case Kind::cos: os << "cos("; print(n->a, var, os); os << ')'; break;
    case Kind::tan: os << "tan("; print(n->a, var, os); os << ')'; break;
    case Kind::exp: os << "exp("; print(n->a, var, os); os << ')'; break;
    case Kind::log: os << "log("; print(n->a, var, os); os << ')'; break;
    case Kind::sqrt: os << "sqrt("; print(n->a, var, os); os << ')'; break;
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view var) : text_(text), var_(var) {}

  NodePtr parse() {
    auto n = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::validation, "expression '" + std::string(text_) + "': " + what +
                                           " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = add(lhs, parse_product());
      else if (accept('-')) lhs = sub(lhs, parse_product());
      else return lhs;
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = mul(lhs, parse_unary());
      else if (accept('/')) lhs = div(lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return neg(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) {
      auto e = parse_unary();
      if (!is_const(e)) fail("exponent must be constant");
      return pow(base, e->value);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      std::string token(text_.substr(start, pos_ - start));
      try {
        return make_const(std::stod(token));
      } catch (const std::exception&) {
        fail("bad number '" + token + "'");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == var_) return make_var();
      if (name == "pi") return make_const(std::numbers::pi);
      static constexpr std::array<std::pair<std::string_view, Kind>, 6> funcs{{
          {"sin", Kind::sin}, {"cos", Kind::cos}, {"tan", Kind::tan},
          {"exp", Kind::exp}, {"log", Kind::log}, {"sqrt", Kind::sqrt}}};
      for (const auto& [fname, kind] : funcs) {
        if (name == fname) {
          if (!accept('(')) fail("expected '(' after " + std::string(name));
          auto arg = parse_sum();
          if (!accept(')')) fail("expected ')'");
          return func(kind, arg);
        }
      }
      fail("unknown identifier '" + std::string(name) + "' (variable is '" + std::string(var_) + "')");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

enum Op : int {
  op_const,
  op_var,
  op_add,
  op_sub,
  op_mul,
  op_div,
  op_neg,
  op_pow,
  op_square,
  op_sin,
  op_cos,
  op_tan,
  op_exp,
  op_log,
  op_sqrt
};

template <typename Emit>
int emit_postfix(const NodePtr& n, Emit&& emit) {
  auto unary = [&](int op, double v = 0.0) {
    int d = emit_postfix(n->a, emit);
    emit(op, v);
    return d;
  };
  switch (n->kind) {
    case Kind::constant: emit(op_const, n->value); return 1;
    case Kind::variable: emit(op_var, 0.0); return 1;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div: {
      int da = emit_postfix(n->a, emit);
      int db = emit_postfix(n->b, emit);
      int op = n->kind == Kind::add ? op_add : n->kind == Kind::sub ? op_sub
               : n->kind == Kind::mul ? op_mul : op_div;
      emit(op, 0.0);
      return std::max(da, db + 1);
    }
    case Kind::neg: return unary(op_neg);
    case Kind::pow: return n->value == 2.0 ? unary(op_square) : unary(op_pow, n->value);
    case Kind::sin: return unary(op_sin);
    case Kind::cos: return unary(op_cos);
    case Kind::tan: return unary(op_tan);
    case Kind::exp: return unary(op_exp);
    case Kind::log: return unary(op_log);
    case Kind::sqrt: return unary(op_sqrt);
  }
  return 1;
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string variable)
    : root_(std::move(root)), variable_(std::move(variable)) {
  compile();
}

Expression Expression::parse(std::string_view text, std::string_view variable) {
  Parser parser(text, variable);
  return Expression(parser.parse(), std::string(variable));
}

Expression Expression::constant(double value) { return Expression(make_const(value), "x"); }

Expression Expression::derivative() const { return Expression(differentiate(root_), variable_); }

bool Expression::is_constant() const { return root_->kind == Kind::constant; }

void Expression::compile() {
  program_.clear();
  max_depth_ = emit_postfix(root_, [this](int op, double v) { program_.push_back({op, v}); });
}

double Expression::operator()(double x) const {
  constexpr int kInline = 32;
  double inline_stack[kInline];
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(static_cast<std::size_t>(max_depth_));
    stack = heap.data();
  }
  int top = -1;
  for (const auto& ins : program_) {
    switch (ins.op) {
      case op_const: stack[++top] = ins.value; break;
      case op_var: stack[++top] = x; break;
      case op_add: stack[top - 1] += stack[top]; --top; break;
      case op_sub: stack[top - 1] -= stack[top]; --top; break;
      case op_mul: stack[top - 1] *= stack[top]; --top; break;
      case op_div: stack[top - 1] /= stack[top]; --top; break;
      case op_neg: stack[top] = -stack[top]; break;
      case op_square: stack[top] *= stack[top]; break;
      case op_pow: stack[top] = std::pow(stack[top], ins.value); break;
      case op_sin: stack[top] = std::sin(stack[top]); break;
      case op_cos: stack[top] = std::cos(stack[top]); break;
      case op_tan: stack[top] = std::tan(stack[top]); break;
      case op_exp: stack[top] = std::exp(stack[top]); break;
      case op_log: stack[top] = std::log(stack[top]); break;
      case op_sqrt: stack[top] = std::sqrt(stack[top]); break;
    }
  }
  return stack[0];
}

std::string Expression::to_string() const {
  std::ostringstream os;
  print(root_, variable_, os);
  return os.str();
}

}  // namespace eulab::expr
