#pragma once

#include <array>
#include <string>
#include <vector>

#include "lv/grid.hpp"

namespace lv {

/// Compiled closed-form expression in x, y, t built from the config grammar:
/// decimal constants, the variables x, y, t, the operators + - * ^ (integer
/// exponents), unary minus, parentheses, and the functions sin, cos, exp.
class Expr {
 public:
  static Expr parse(const std::string& source);

  double eval(double x, double y, double t) const;
  bool uses_t() const { return uses_t_; }
  const std::string& source() const { return source_; }

 private:
  enum class Op : unsigned char { Const, VarX, VarY, VarT, Add, Sub, Mul, Neg, Pow, Sin, Cos, Exp };
  struct Node {
    Op op;
    int a = -1, b = -1;
    double value = 0.0;  // constant, or integer exponent for Pow
  };
  std::vector<Node> nodes_;
  int root_ = -1;
  bool uses_t_ = false;
  std::string source_;

  double eval_node(int idx, double x, double y, double t) const;
  friend class ExprParser;
};

/// One coefficient of the reaction system: a constant, a closed-form
/// expression, or a sampled space-time table (linearly interpolated, exactly
/// periodic in t when a period is set).
struct CoefficientField {
  enum class Kind { Constant, Expression, Sampled };

  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant
  Expr expr;           // Expression

  // Sampled: values[s][k] over `shape` spatial points (endpoints included)
  // per axis and `time_samples` slices spanning one period (period 0 means
  // static, one slice).
  int dim = 1;
  std::array<int, 2> shape{0, 0};
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  double period = 0.0;
  std::vector<std::vector<double>> slices;

  static CoefficientField constant(double v);
  static CoefficientField expression(const std::string& source);
  static CoefficientField sampled(int dim, std::array<int, 2> shape,
                                  std::array<double, 2> lo,
                                  std::array<double, 2> hi, double period,
                                  std::vector<std::vector<double>> slices);

  double eval(double x, double y, double t) const;
  bool depends_on_t() const;
  /// Fills `out` (grid.size() entries) with the values at time t.
  void sample_on(const Grid& grid, double t, std::vector<double>& out) const;
};

}  // namespace lv
