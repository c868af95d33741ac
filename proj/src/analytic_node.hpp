#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cmc/analytic.hpp"

namespace cmc::detail {

enum class Op { Const, Var, Add, Mul, Pow, Exp, Ln, Sin, Cos, Sinh, Cosh, Series };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  cplx value{};                               // Const
  double exponent = 0.0;                      // Pow
  std::vector<NodePtr> args;                  // Add/Mul operands, unary argument
  std::shared_ptr<const TaylorData> series;   // Series (argument in args[0])
  std::string key;
};

NodePtr make_const(cplx value);
NodePtr make_var();
NodePtr make_add(std::vector<NodePtr> terms);
NodePtr make_mul(std::vector<NodePtr> factors);
NodePtr make_pow(const NodePtr& base, double exponent);
NodePtr make_unary(Op op, const NodePtr& arg);
NodePtr make_series(std::shared_ptr<const TaylorData> data, const NodePtr& arg);

bool is_integer(double e);
const char* function_name(Op op);

}  // namespace cmc::detail
