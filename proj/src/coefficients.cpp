#include "lv/coefficients.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "lv/errors.hpp"

namespace lv {

class ExprParser {
 public:
  ExprParser(const std::string& src, Expr& out) : src_(src), out_(out) {}

  void run() {
    out_.source_ = src_;
    pos_ = 0;
    out_.root_ = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("trailing input");
  }

 private:
  const std::string& src_;
  Expr& out_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("expression parse error at offset " +
                      std::to_string(pos_) + ": " + what + " in \"" + src_ +
                      "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add(Expr::Op op, int a = -1, int b = -1, double value = 0.0) {
    out_.nodes_.push_back({op, a, b, value});
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        lhs = add(Expr::Op::Add, lhs, parse_term());
      } else if (eat('-')) {
        lhs = add(Expr::Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (eat('*')) lhs = add(Expr::Op::Mul, lhs, parse_unary());
    return lhs;
  }

  int parse_unary() {
    if (eat('-')) return add(Expr::Op::Neg, parse_unary());
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (eat('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ == start) fail("'^' needs a nonnegative integer exponent");
      const int k = std::atoi(src_.substr(start, pos_ - start).c_str());
      if (k > 16) fail("exponent too large");
      return add(Expr::Op::Pow, base, -1, static_cast<double>(k));
    }
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(src_.c_str() + pos_, &end);
      if (end == src_.c_str() + pos_) fail("bad number");
      pos_ = end - src_.c_str();
      return add(Expr::Op::Const, -1, -1, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string name = src_.substr(start, pos_ - start);
      if (name == "x") return add(Expr::Op::VarX);
      if (name == "y") return add(Expr::Op::VarY);
      if (name == "t") {
        out_.uses_t_ = true;
        return add(Expr::Op::VarT);
      }
      Expr::Op fn;
      if (name == "sin") fn = Expr::Op::Sin;
      else if (name == "cos") fn = Expr::Op::Cos;
      else if (name == "exp") fn = Expr::Op::Exp;
      else fail("unknown identifier '" + name + "'");
      if (!eat('(')) fail("function '" + name + "' needs '('");
      int arg = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return add(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Expr Expr::parse(const std::string& source) {
  Expr e;
  ExprParser(source, e).run();
  return e;
}

double Expr::eval_node(int idx, double x, double y, double t) const {
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarX: return x;
    case Op::VarY: return y;
    case Op::VarT: return t;
    case Op::Add: return eval_node(n.a, x, y, t) + eval_node(n.b, x, y, t);
    case Op::Sub: return eval_node(n.a, x, y, t) - eval_node(n.b, x, y, t);
    case Op::Mul: return eval_node(n.a, x, y, t) * eval_node(n.b, x, y, t);
    case Op::Neg: return -eval_node(n.a, x, y, t);
    case Op::Pow: {
      double base = eval_node(n.a, x, y, t);
      double r = 1.0;
      for (int k = 0; k < static_cast<int>(n.value); ++k) r *= base;
      return r;
    }
    case Op::Sin: return std::sin(eval_node(n.a, x, y, t));
    case Op::Cos: return std::cos(eval_node(n.a, x, y, t));
    case Op::Exp: return std::exp(eval_node(n.a, x, y, t));
  }
  return 0.0;
}

double Expr::eval(double x, double y, double t) const {
  return eval_node(root_, x, y, t);
}

CoefficientField CoefficientField::constant(double v) {
  CoefficientField f;
  f.kind = Kind::Constant;
  f.value = v;
  return f;
}

CoefficientField CoefficientField::expression(const std::string& source) {
  CoefficientField f;
  f.kind = Kind::Expression;
  f.expr = Expr::parse(source);
  return f;
}

CoefficientField CoefficientField::sampled(int dim, std::array<int, 2> shape,
                                           std::array<double, 2> lo,
                                           std::array<double, 2> hi,
                                           double period,
                                           std::vector<std::vector<double>> slices) {
  CoefficientField f;
  f.kind = Kind::Sampled;
  f.dim = dim;
  f.shape = shape;
  f.lo = lo;
  f.hi = hi;
  f.period = period;
  f.slices = std::move(slices);
  if (f.slices.empty()) throw DataError("sampled coefficient needs at least one slice");
  const std::size_t want =
      static_cast<std::size_t>(shape[0]) * (dim == 2 ? shape[1] : 1);
  for (const auto& s : f.slices) {
    if (s.size() != want) throw DataError("sampled coefficient slice size mismatch");
    for (double v : s)
      if (!std::isfinite(v)) throw DataError("sampled coefficient has a non-finite value");
  }
  return f;
}

namespace {

double table_lerp(const CoefficientField& f, const std::vector<double>& slice,
                  double x, double y) {
  auto axis = [&](int ax, double p, int& i0, double& w) {
    const int m = f.shape[ax];
    if (m == 1) {
      i0 = 0;
      w = 0.0;
      return;
    }
    const double hh = (f.hi[ax] - f.lo[ax]) / (m - 1);
    double s = (p - f.lo[ax]) / hh;
    if (s < 0.0) s = 0.0;
    if (s > m - 1) s = m - 1;
    i0 = static_cast<int>(s);
    if (i0 > m - 2) i0 = m - 2;
    w = s - i0;
  };
  int i0;
  double wx;
  axis(0, x, i0, wx);
  if (f.dim == 1) {
    return (1.0 - wx) * slice[i0] + wx * slice[i0 + 1];
  }
  int j0;
  double wy;
  axis(1, y, j0, wy);
  const int n1 = f.shape[1];
  auto at = [&](int i, int j) { return slice[static_cast<std::size_t>(i) * n1 + j]; };
  const double a = (1.0 - wy) * at(i0, j0) + wy * at(i0, j0 + 1);
  const double b = (1.0 - wy) * at(i0 + 1, j0) + wy * at(i0 + 1, j0 + 1);
  return (1.0 - wx) * a + wx * b;
}

}  // namespace

double CoefficientField::eval(double x, double y, double t) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Expression: return expr.eval(x, y, t);
    case Kind::Sampled: {
      const int nt = static_cast<int>(slices.size());
      if (nt == 1 || period <= 0.0) return table_lerp(*this, slices[0], x, y);
      // Exactly periodic: wrap the phase, then interpolate between slices.
      double phase = std::fmod(t / period, 1.0);
      if (phase < 0.0) phase += 1.0;
      const double s = phase * nt;
      int j0 = static_cast<int>(s);
      if (j0 >= nt) j0 = 0;
      const double w = s - j0;
      const int j1 = (j0 + 1) % nt;
      const double v0 = table_lerp(*this, slices[j0], x, y);
      const double v1 = table_lerp(*this, slices[j1], x, y);
      return (1.0 - w) * v0 + w * v1;
    }
  }
  return 0.0;
}

bool CoefficientField::depends_on_t() const {
  switch (kind) {
    case Kind::Constant: return false;
    case Kind::Expression: return expr.uses_t();
    case Kind::Sampled: return slices.size() > 1 && period > 0.0;
  }
  return false;
}

void CoefficientField::sample_on(const Grid& grid, double t,
                                 std::vector<double>& out) const {
  out.resize(grid.size());
  if (kind == Kind::Constant) {
    std::fill(out.begin(), out.end(), value);
    return;
  }
  if (grid.dim == 1) {
    for (int i = 0; i < grid.n[0]; ++i) out[i] = eval(grid.coords[0][i], 0.0, t);
  } else {
    for (int i = 0; i < grid.n[0]; ++i)
      for (int j = 0; j < grid.n[1]; ++j)
        out[grid.index(i, j)] = eval(grid.coords[0][i], grid.coords[1][j], t);
  }
}

}  // namespace lv
