#include "labgauge/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

namespace labgauge {

using detail::ExprNode;
using detail::ExprNodePtr;
using detail::ExprOp;

// ---------------------------------------------------------------------------
// Chart
// ---------------------------------------------------------------------------

Chart::Chart(int dim_) : dim(dim_) {
  if (dim_ < 0) throw DimensionMismatch("chart dimension must be non-negative");
  coordinate_names.reserve(dim_);
  for (int i = 0; i < dim_; ++i) coordinate_names.push_back("x" + std::to_string(i + 1));
}

Chart::Chart(int dim_, std::vector<std::string> names) : dim(dim_), coordinate_names(std::move(names)) {
  if (static_cast<int>(coordinate_names.size()) != dim_)
    throw DimensionMismatch("chart of dimension " + std::to_string(dim_) + " needs exactly " +
                            std::to_string(dim_) + " coordinate names, got " +
                            std::to_string(coordinate_names.size()));
}

bool Chart::has_default_names() const {
  for (int i = 0; i < dim; ++i)
    if (coordinate_names[i] != "x" + std::to_string(i + 1)) return false;
  return true;
}

int Chart::coordinate_index(const std::string& name) const {
  for (int i = 0; i < dim; ++i)
    if (coordinate_names[i] == name) return i;
  if (dim <= 4 && has_default_names()) {
    static const char* aliases[4] = {"x", "y", "z", "t"};
    for (int i = 0; i < dim && i < 4; ++i)
      if (name == aliases[i]) return i;
  }
  return -1;
}

bool Chart::star_shaped_about_origin() const {
  if (!domain_hint) return true;  // default box [-1,1]^dim contains 0
  for (const auto& [lo, hi] : *domain_hint)
    if (lo > 0.0 || hi < 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// node constructors with light normalization
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kSizeCap = 1u << 24;

std::uint32_t add_sizes(std::uint32_t x, std::uint32_t y) {
  std::uint64_t s = std::uint64_t(x) + std::uint64_t(y) + 1;
  return s > kSizeCap ? kSizeCap : static_cast<std::uint32_t>(s);
}

ExprNodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Const;
  n->value = v;
  return n;
}

const ExprNodePtr& zero_node() {
  static const ExprNodePtr z = make_const(0.0);
  return z;
}

const ExprNodePtr& one_node() {
  static const ExprNodePtr o = make_const(1.0);
  return o;
}

ExprNodePtr make_var(int index) {
  if (index < 0) throw DimensionMismatch("coordinate index must be non-negative");
  static std::vector<ExprNodePtr> interned;
  if (index < static_cast<int>(interned.size()) && interned[index]) return interned[index];
  if (index >= static_cast<int>(interned.size())) interned.resize(index + 1);
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Var;
  n->var = index;
  interned[index] = n;
  return n;
}

bool is_const(const ExprNodePtr& n, double v) { return n->op == ExprOp::Const && n->value == v; }
bool is_const(const ExprNodePtr& n) { return n->op == ExprOp::Const; }

ExprNodePtr make_binary(ExprOp op, const ExprNodePtr& a, const ExprNodePtr& b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = a;
  n->b = b;
  n->tree_size = add_sizes(a->tree_size, b->tree_size);
  return n;
}

ExprNodePtr make_unary(ExprOp op, const ExprNodePtr& a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = a;
  n->tree_size = add_sizes(a->tree_size, 0);
  return n;
}

ExprNodePtr nadd(const ExprNodePtr& a, const ExprNodePtr& b);
ExprNodePtr nneg(const ExprNodePtr& a);

ExprNodePtr nadd(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(ExprOp::Add, a, b);
}

ExprNodePtr nsub(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (a == b) return zero_node();
  if (is_const(a, 0.0)) return nneg(b);
  return make_binary(ExprOp::Sub, a, b);
}

ExprNodePtr nmul(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return zero_node();
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make_binary(ExprOp::Mul, a, b);
}

ExprNodePtr ndiv(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b) && b->value != 0.0) return make_const(a->value / b->value);
  return make_binary(ExprOp::Div, a, b);
}

ExprNodePtr nneg(const ExprNodePtr& a) {
  if (is_const(a)) return make_const(-a->value);
  if (a->op == ExprOp::Neg) return a->a;
  return make_unary(ExprOp::Neg, a);
}

ExprNodePtr npow(const ExprNodePtr& a, int k) {
  if (k == 0) return one_node();
  if (k == 1) return a;
  if (is_const(a)) return make_const(std::pow(a->value, k));
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::Pow;
  n->a = a;
  n->exponent = k;
  // expanded size of a^k grows with |k| factors
  std::uint64_t sz = std::uint64_t(a->tree_size) * std::max(1, std::abs(k)) + 1;
  n->tree_size = sz > kSizeCap ? kSizeCap : static_cast<std::uint32_t>(sz);
  return n;
}

ExprNodePtr nfun(ExprOp op, const ExprNodePtr& a) {
  if (is_const(a)) {
    switch (op) {
      case ExprOp::Sin: return make_const(std::sin(a->value));
      case ExprOp::Cos: return make_const(std::cos(a->value));
      case ExprOp::Exp: return make_const(std::exp(a->value));
      default: break;
    }
  }
  return make_unary(op, a);
}

}  // namespace

// ---------------------------------------------------------------------------
// SmoothField interface
// ---------------------------------------------------------------------------

SmoothField::SmoothField(double constant)
    : node_(constant == 0.0 ? zero_node() : (constant == 1.0 ? one_node() : make_const(constant))) {}

SmoothField SmoothField::coordinate(int index) { return SmoothField(make_var(index)); }

SmoothField operator+(const SmoothField& f, const SmoothField& g) { return SmoothField(nadd(f.node(), g.node())); }
SmoothField operator-(const SmoothField& f, const SmoothField& g) { return SmoothField(nsub(f.node(), g.node())); }
SmoothField operator*(const SmoothField& f, const SmoothField& g) { return SmoothField(nmul(f.node(), g.node())); }
SmoothField operator/(const SmoothField& f, const SmoothField& g) { return SmoothField(ndiv(f.node(), g.node())); }
SmoothField operator-(const SmoothField& f) { return SmoothField(nneg(f.node())); }
SmoothField SmoothField::pow(int exponent) const { return SmoothField(npow(node_, exponent)); }
SmoothField SmoothField::sin(const SmoothField& f) { return SmoothField(nfun(ExprOp::Sin, f.node())); }
SmoothField SmoothField::cos(const SmoothField& f) { return SmoothField(nfun(ExprOp::Cos, f.node())); }
SmoothField SmoothField::exp(const SmoothField& f) { return SmoothField(nfun(ExprOp::Exp, f.node())); }

bool SmoothField::is_zero() const { return is_const(node_, 0.0); }

bool SmoothField::is_constant(double* out) const {
  if (!is_const(node_)) return false;
  if (out) *out = node_->value;
  return true;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

struct EvalCtx {
  const std::vector<double>& point;
  std::unordered_map<const ExprNode*, double>* memo;  // null for small trees
};

double eval_node(const ExprNode* e, EvalCtx& c) {
  if (c.memo) {
    auto it = c.memo->find(e);
    if (it != c.memo->end()) return it->second;
  }
  double r = 0.0;
  switch (e->op) {
    case ExprOp::Const: r = e->value; break;
    case ExprOp::Var:
      if (e->var >= static_cast<int>(c.point.size()))
        throw DimensionMismatch("expression uses coordinate " + std::to_string(e->var + 1) +
                                " but the point has only " + std::to_string(c.point.size()) +
                                " components");
      r = c.point[e->var];
      break;
    case ExprOp::Add: r = eval_node(e->a.get(), c) + eval_node(e->b.get(), c); break;
    case ExprOp::Sub: r = eval_node(e->a.get(), c) - eval_node(e->b.get(), c); break;
    case ExprOp::Mul: r = eval_node(e->a.get(), c) * eval_node(e->b.get(), c); break;
    case ExprOp::Div: {
      double denom = eval_node(e->b.get(), c);
      if (denom == 0.0) throw DomainError("division by zero while evaluating expression");
      r = eval_node(e->a.get(), c) / denom;
      break;
    }
    case ExprOp::Pow: {
      double base = eval_node(e->a.get(), c);
      if (e->exponent < 0 && base == 0.0)
        throw DomainError("division by zero while evaluating negative power");
      r = std::pow(base, e->exponent);
      break;
    }
    case ExprOp::Neg: r = -eval_node(e->a.get(), c); break;
    case ExprOp::Sin: r = std::sin(eval_node(e->a.get(), c)); break;
    case ExprOp::Cos: r = std::cos(eval_node(e->a.get(), c)); break;
    case ExprOp::Exp: r = std::exp(eval_node(e->a.get(), c)); break;
  }
  if (c.memo) (*c.memo)[e] = r;
  return r;
}

}  // namespace

double SmoothField::eval(const std::vector<double>& point) const {
  // Shared-subtree DAGs report huge expanded sizes; memoize only those so
  // plain polynomial trees keep the cheap recursive path.
  if (node_->tree_size < 512) {
    EvalCtx c{point, nullptr};
    return eval_node(node_.get(), c);
  }
  std::unordered_map<const ExprNode*, double> memo;
  memo.reserve(256);
  EvalCtx c{point, &memo};
  return eval_node(node_.get(), c);
}

// ---------------------------------------------------------------------------
// differentiation (exact, with sharing-preserving memoization)
// ---------------------------------------------------------------------------

namespace {

ExprNodePtr diff_node(const ExprNodePtr& e, int v,
                      std::unordered_map<const ExprNode*, ExprNodePtr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  ExprNodePtr r;
  switch (e->op) {
    case ExprOp::Const: r = zero_node(); break;
    case ExprOp::Var: r = (e->var == v) ? one_node() : zero_node(); break;
    case ExprOp::Add: r = nadd(diff_node(e->a, v, memo), diff_node(e->b, v, memo)); break;
    case ExprOp::Sub: r = nsub(diff_node(e->a, v, memo), diff_node(e->b, v, memo)); break;
    case ExprOp::Mul:
      r = nadd(nmul(diff_node(e->a, v, memo), e->b), nmul(e->a, diff_node(e->b, v, memo)));
      break;
    case ExprOp::Div:
      // (f/g)' = f'/g - f g' / g^2
      r = nsub(ndiv(diff_node(e->a, v, memo), e->b),
               ndiv(nmul(e->a, diff_node(e->b, v, memo)), npow(e->b, 2)));
      break;
    case ExprOp::Pow:
      r = nmul(nmul(make_const(double(e->exponent)), npow(e->a, e->exponent - 1)),
               diff_node(e->a, v, memo));
      break;
    case ExprOp::Neg: r = nneg(diff_node(e->a, v, memo)); break;
    case ExprOp::Sin: r = nmul(nfun(ExprOp::Cos, e->a), diff_node(e->a, v, memo)); break;
    case ExprOp::Cos: r = nneg(nmul(nfun(ExprOp::Sin, e->a), diff_node(e->a, v, memo))); break;
    case ExprOp::Exp: r = nmul(e, diff_node(e->a, v, memo)); break;
  }
  memo.emplace(e.get(), r);
  return r;
}

}  // namespace

SmoothField SmoothField::derivative(int index) const {
  std::unordered_map<const ExprNode*, ExprNodePtr> memo;
  return SmoothField(diff_node(node_, index, memo));
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

namespace {

ExprNodePtr subst_node(const ExprNodePtr& e, const std::vector<ExprNodePtr>& repl,
                       std::unordered_map<const ExprNode*, ExprNodePtr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  ExprNodePtr r;
  switch (e->op) {
    case ExprOp::Const: r = e; break;
    case ExprOp::Var:
      if (e->var >= static_cast<int>(repl.size()))
        throw DimensionMismatch("substitution map covers " + std::to_string(repl.size()) +
                                " coordinates but the expression uses coordinate " +
                                std::to_string(e->var + 1));
      r = repl[e->var];
      break;
    case ExprOp::Add: r = nadd(subst_node(e->a, repl, memo), subst_node(e->b, repl, memo)); break;
    case ExprOp::Sub: r = nsub(subst_node(e->a, repl, memo), subst_node(e->b, repl, memo)); break;
    case ExprOp::Mul: r = nmul(subst_node(e->a, repl, memo), subst_node(e->b, repl, memo)); break;
    case ExprOp::Div: r = ndiv(subst_node(e->a, repl, memo), subst_node(e->b, repl, memo)); break;
    case ExprOp::Pow: r = npow(subst_node(e->a, repl, memo), e->exponent); break;
    case ExprOp::Neg: r = nneg(subst_node(e->a, repl, memo)); break;
    case ExprOp::Sin: r = nfun(ExprOp::Sin, subst_node(e->a, repl, memo)); break;
    case ExprOp::Cos: r = nfun(ExprOp::Cos, subst_node(e->a, repl, memo)); break;
    case ExprOp::Exp: r = nfun(ExprOp::Exp, subst_node(e->a, repl, memo)); break;
  }
  memo.emplace(e.get(), r);
  return r;
}

int min_dim_node(const ExprNode* e) {
  switch (e->op) {
    case ExprOp::Const: return 0;
    case ExprOp::Var: return e->var + 1;
    default: {
      int d = e->a ? min_dim_node(e->a.get()) : 0;
      if (e->b) d = std::max(d, min_dim_node(e->b.get()));
      return d;
    }
  }
}

}  // namespace

SmoothField SmoothField::substitute(const std::vector<SmoothField>& replacement) const {
  std::vector<ExprNodePtr> repl;
  repl.reserve(replacement.size());
  for (const auto& f : replacement) repl.push_back(f.node());
  std::unordered_map<const ExprNode*, ExprNodePtr> memo;
  return SmoothField(subst_node(node_, repl, memo));
}

SmoothField SmoothField::scale_coordinates(double scale, int dim) const {
  std::vector<SmoothField> repl;
  repl.reserve(dim);
  for (int i = 0; i < dim; ++i) repl.push_back(SmoothField(scale) * coordinate(i));
  return substitute(repl);
}

int SmoothField::min_dim() const { return min_dim_node(node_.get()); }

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  char buf[64];
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// precedence levels: 0 add/sub, 1 mul/div, 2 unary minus, 3 pow, 4 atom
void print_node(const ExprNode* e, const Chart& chart, std::string& out, int parent_prec) {
  auto open = [&](int prec) { if (prec < parent_prec) out += '('; };
  auto close = [&](int prec) { if (prec < parent_prec) out += ')'; };
  switch (e->op) {
    case ExprOp::Const: {
      if (e->value < 0.0) {
        open(2);
        out += format_double(e->value);
        close(2);
      } else {
        out += format_double(e->value);
      }
      break;
    }
    case ExprOp::Var:
      if (e->var < chart.dim) {
        out += chart.coordinate_names[e->var];
      } else {
        out += "x" + std::to_string(e->var + 1);
      }
      break;
    case ExprOp::Add:
      open(0);
      print_node(e->a.get(), chart, out, 0);
      out += " + ";
      print_node(e->b.get(), chart, out, 0);
      close(0);
      break;
    case ExprOp::Sub:
      open(0);
      print_node(e->a.get(), chart, out, 0);
      out += " - ";
      print_node(e->b.get(), chart, out, 1);  // right side binds one tighter
      close(0);
      break;
    case ExprOp::Mul:
      open(1);
      print_node(e->a.get(), chart, out, 1);
      out += "*";
      print_node(e->b.get(), chart, out, 1);
      close(1);
      break;
    case ExprOp::Div:
      open(1);
      print_node(e->a.get(), chart, out, 1);
      out += "/";
      print_node(e->b.get(), chart, out, 2);
      close(1);
      break;
    case ExprOp::Neg:
      open(2);
      out += "-";
      print_node(e->a.get(), chart, out, 2);
      close(2);
      break;
    case ExprOp::Pow:
      open(3);
      print_node(e->a.get(), chart, out, 4);
      out += "^";
      if (e->exponent < 0) {
        out += "(" + std::to_string(e->exponent) + ")";
      } else {
        out += std::to_string(e->exponent);
      }
      close(3);
      break;
    case ExprOp::Sin:
      out += "sin(";
      print_node(e->a.get(), chart, out, 0);
      out += ")";
      break;
    case ExprOp::Cos:
      out += "cos(";
      print_node(e->a.get(), chart, out, 0);
      out += ")";
      break;
    case ExprOp::Exp:
      out += "exp(";
      print_node(e->a.get(), chart, out, 0);
      out += ")";
      break;
  }
}

}  // namespace

std::string SmoothField::to_string(const Chart& chart) const {
  std::string out;
  print_node(node_.get(), chart, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End } kind;
  std::size_t offset;
  double number = 0.0;
  std::string ident;
};

const char* token_name(Token::Kind k) {
  switch (k) {
    case Token::Number: return "number";
    case Token::Ident: return "identifier";
    case Token::Plus: return "'+'";
    case Token::Minus: return "'-'";
    case Token::Star: return "'*'";
    case Token::Slash: return "'/'";
    case Token::Caret: return "'^'";
    case Token::LParen: return "'('";
    case Token::RParen: return "')'";
    case Token::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const char* begin = s.c_str() + i;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      out.push_back({Token::Number, i, v, {}});
      i += static_cast<std::size_t>(end - begin);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Token::Ident, i, 0.0, s.substr(i, j - i)});
      i = j;
      continue;
    }
    Token::Kind k;
    switch (c) {
      case '+': k = Token::Plus; break;
      case '-': k = Token::Minus; break;
      case '*': k = Token::Star; break;
      case '/': k = Token::Slash; break;
      case '^': k = Token::Caret; break;
      case '(': k = Token::LParen; break;
      case ')': k = Token::RParen; break;
      default:
        throw ParseError("unexpected character '" + std::string(1, c) + "' at byte " +
                             std::to_string(i),
                         i, {"number", "identifier", "operator", "'('", "')'"});
    }
    out.push_back({k, i, 0.0, {}});
    ++i;
  }
  out.push_back({Token::End, s.size(), 0.0, {}});
  return out;
}

struct Parser {
  const std::vector<Token>& toks;
  const Chart& chart;
  std::size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  Token take() { return toks[pos++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = peek();
    std::string msg = "unexpected " + std::string(token_name(t.kind)) + " at byte " +
                      std::to_string(t.offset) + "; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    throw ParseError(msg, t.offset, std::move(expected));
  }

  ExprNodePtr parse_expression() {
    ExprNodePtr lhs = parse_term();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      Token op = take();
      ExprNodePtr rhs = parse_term();
      lhs = op.kind == Token::Plus ? nadd(lhs, rhs) : nsub(lhs, rhs);
    }
    return lhs;
  }

  ExprNodePtr parse_term() {
    ExprNodePtr lhs = parse_unary();
    while (peek().kind == Token::Star || peek().kind == Token::Slash) {
      Token op = take();
      ExprNodePtr rhs = parse_unary();
      lhs = op.kind == Token::Star ? nmul(lhs, rhs) : ndiv(lhs, rhs);
    }
    return lhs;
  }

  ExprNodePtr parse_unary() {
    if (peek().kind == Token::Minus) {
      take();
      return nneg(parse_unary());
    }
    if (peek().kind == Token::Plus) {
      take();
      return parse_unary();
    }
    return parse_power();
  }

  ExprNodePtr parse_power() {
    ExprNodePtr base = parse_atom();
    while (peek().kind == Token::Caret) {
      take();
      base = npow(base, parse_integer_exponent());
    }
    return base;
  }

  int parse_integer_exponent() {
    bool negate = false;
    bool parens = false;
    if (peek().kind == Token::LParen) {
      parens = true;
      take();
    }
    if (peek().kind == Token::Minus) {
      negate = true;
      take();
    } else if (peek().kind == Token::Plus) {
      take();
    }
    if (peek().kind != Token::Number) fail({"integer exponent"});
    Token t = take();
    double v = t.number;
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw ParseError("exponent at byte " + std::to_string(t.offset) + " must be an integer",
                       t.offset, {"integer exponent"});
    if (parens) {
      if (peek().kind != Token::RParen) fail({"')'"});
      take();
    }
    int k = static_cast<int>(v);
    return negate ? -k : k;
  }

  ExprNodePtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Number: {
        Token n = take();
        return make_const(n.number);
      }
      case Token::LParen: {
        take();
        ExprNodePtr inner = parse_expression();
        if (peek().kind != Token::RParen) fail({"')'", "operator"});
        take();
        return inner;
      }
      case Token::Ident: {
        Token id = take();
        if (id.ident == "sin" || id.ident == "cos" || id.ident == "exp") {
          if (peek().kind != Token::LParen) fail({"'('"});
          take();
          ExprNodePtr arg = parse_expression();
          if (peek().kind != Token::RParen) fail({"')'", "operator"});
          take();
          if (id.ident == "sin") return nfun(ExprOp::Sin, arg);
          if (id.ident == "cos") return nfun(ExprOp::Cos, arg);
          return nfun(ExprOp::Exp, arg);
        }
        int idx = chart.coordinate_index(id.ident);
        if (idx < 0)
          throw UnknownIdentifier("unknown identifier '" + id.ident + "' at byte " +
                                      std::to_string(id.offset) +
                                      " (not a coordinate of the chart, not sin/cos/exp)",
                                  id.ident, id.offset);
        return make_var(idx);
      }
      default:
        fail({"number", "identifier", "'('", "'-'"});
    }
  }
};

}  // namespace

SmoothField parse_expr(const std::string& text, const Chart& chart) {
  std::vector<Token> toks = tokenize(text);
  Parser p{toks, chart};
  ExprNodePtr e = p.parse_expression();
  if (p.peek().kind != Token::End) p.fail({"operator", "end of input"});
  return SmoothField(e);
}

double fd_oracle(const SmoothField& f, int index, std::vector<double> point, double h) {
  std::vector<double> hi = point, lo = point;
  hi[index] += h;
  lo[index] -= h;
  return (f.eval(hi) - f.eval(lo)) / (2.0 * h);
}

}  // namespace labgauge
