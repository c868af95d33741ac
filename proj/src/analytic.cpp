#include "cmc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "analytic_node.hpp"
#include "cmc/error.hpp"

namespace cmc {

namespace detail {

namespace {

std::string number_key(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string const_key(cplx v) { return "#" + number_key(v.real()) + "," + number_key(v.imag()); }

NodePtr finish(Node n) {
  switch (n.op) {
    case Op::Const: n.key = const_key(n.value); break;
    case Op::Var: n.key = "z"; break;
    case Op::Add:
    case Op::Mul: {
      std::string k = n.op == Op::Add ? "+(" : "*(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) k += ";";
        k += n.args[i]->key;
      }
      n.key = k + ")";
      break;
    }
    case Op::Pow: n.key = "^(" + n.args[0]->key + ";" + number_key(n.exponent) + ")"; break;
    case Op::Series: {
      std::string k = "T(" + number_key(n.series->center) + ";" + number_key(n.series->radius);
      for (const cplx& c : n.series->coeffs) k += ";" + const_key(c);
      n.key = k + "|" + n.args[0]->key + ")";
      break;
    }
    default: n.key = std::string(function_name(n.op)) + "(" + n.args[0]->key + ")"; break;
  }
  return std::make_shared<const Node>(std::move(n));
}

bool is_const(const NodePtr& n) { return n->op == Op::Const; }

cplx ipow(cplx b, long long e) {
  if (e < 0) {
    if (b == cplx(0.0)) throw Error(ErrorKind::OutOfDomain, "zero raised to a negative power");
    return cplx(1.0) / ipow(b, -e);
  }
  cplx result(1.0);
  while (e) {
    if (e & 1) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

bool on_cut(cplx w) { return w.imag() == 0.0 && w.real() <= 0.0; }

}  // namespace

bool is_integer(double e) { return std::isfinite(e) && e == std::floor(e) && std::abs(e) < 1e9; }

const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    default: return "?";
  }
}

cplx power_value(cplx w, double e) {
  if (is_integer(e)) {
    if (w.imag() == 0.0) {
      if (w.real() == 0.0 && e < 0) throw Error(ErrorKind::OutOfDomain, "pole of a negative power");
      return std::pow(w.real(), e);
    }
    return ipow(w, static_cast<long long>(e));
  }
  if (on_cut(w)) throw Error(ErrorKind::OutOfDomain, "non-integer power evaluated on its branch cut");
  return std::pow(w, e);
}

cplx unary_value(Op op, cplx w) {
  const bool real = w.imag() == 0.0;
  switch (op) {
    case Op::Exp: return real ? cplx(std::exp(w.real())) : std::exp(w);
    case Op::Ln:
      if (on_cut(w)) throw Error(ErrorKind::OutOfDomain, "logarithm evaluated on its branch cut");
      return real ? cplx(std::log(w.real())) : std::log(w);
    case Op::Sin: return real ? cplx(std::sin(w.real())) : std::sin(w);
    case Op::Cos: return real ? cplx(std::cos(w.real())) : std::cos(w);
    case Op::Sinh: return real ? cplx(std::sinh(w.real())) : std::sinh(w);
    case Op::Cosh: return real ? cplx(std::cosh(w.real())) : std::cosh(w);
    default: throw std::logic_error("not a unary function");
  }
}

cplx series_value(const TaylorData& t, cplx w) {
  const cplx d = w - t.center;
  if (std::abs(d) >= t.radius) throw Error(ErrorKind::OutOfDomain, "point outside the Taylor disc");
  cplx acc(0.0);
  for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) acc = acc * d + *it;
  return acc;
}

NodePtr make_const(cplx value) {
  Node n;
  n.op = Op::Const;
  n.value = cplx(value.real() + 0.0, value.imag() + 0.0);  // no signed zeros in keys
  return finish(std::move(n));
}

NodePtr make_var() {
  static const NodePtr var = [] {
    Node n;
    n.op = Op::Var;
    return finish(std::move(n));
  }();
  return var;
}

namespace {

struct Factor {
  NodePtr base;
  double exponent;
};

std::vector<Factor> factors_of(const NodePtr& n) {
  std::vector<Factor> out;
  auto push = [&out](const NodePtr& f) {
    if (f->op == Op::Pow) {
      out.push_back({f->args[0], f->exponent});
    } else {
      out.push_back({f, 1.0});
    }
  };
  if (n->op == Op::Mul) {
    for (const NodePtr& f : n->args) push(f);
  } else {
    push(n);
  }
  return out;
}

NodePtr product_of(const std::vector<Factor>& factors) {
  std::vector<NodePtr> parts;
  for (const Factor& f : factors) parts.push_back(make_pow(f.base, f.exponent));
  return make_mul(std::move(parts));
}

struct Term {
  cplx coef;
  NodePtr rest;
};

Term split_term(const NodePtr& t) {
  if (t->op == Op::Mul && is_const(t->args.front())) {
    std::vector<NodePtr> rest(t->args.begin() + 1, t->args.end());
    return {t->args.front()->value, rest.size() == 1 ? rest.front() : make_mul(std::move(rest))};
  }
  return {cplx(1.0), t};
}

// Looks for c*M*f(w)^2 + c*M*g(w)^2 (sign = +1) or c*M*f(w)^2 - c*M*g(w)^2
// (sign = -1) and replaces the pair by c*M.
bool fold_square_identity(std::vector<Term>& terms, Op f_op, Op g_op, double sign) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::vector<Factor> fi = factors_of(terms[i].rest);
    for (std::size_t p = 0; p < fi.size(); ++p) {
      if (fi[p].base->op != f_op || fi[p].exponent < 2.0) continue;
      std::vector<Factor> reduced_i = fi;
      reduced_i[p].exponent -= 2.0;
      const NodePtr rest_i = product_of(reduced_i);
      for (std::size_t j = 0; j < terms.size(); ++j) {
        if (j == i || terms[j].coef != sign * terms[i].coef) continue;
        const std::vector<Factor> fj = factors_of(terms[j].rest);
        for (std::size_t q = 0; q < fj.size(); ++q) {
          if (fj[q].base->op != g_op || fj[q].exponent < 2.0) continue;
          if (fj[q].base->args[0]->key != fi[p].base->args[0]->key) continue;
          std::vector<Factor> reduced_j = fj;
          reduced_j[q].exponent -= 2.0;
          if (product_of(reduced_j)->key != rest_i->key) continue;
          terms[i].rest = rest_i;
          terms.erase(terms.begin() + static_cast<std::ptrdiff_t>(j));
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

NodePtr make_add(std::vector<NodePtr> input) {
  std::vector<NodePtr> flat;
  for (const NodePtr& t : input) {
    if (t->op == Op::Add) {
      flat.insert(flat.end(), t->args.begin(), t->args.end());
    } else {
      flat.push_back(t);
    }
  }

  cplx constant(0.0);
  std::vector<Term> terms;
  std::unordered_map<std::string, std::size_t> index;
  for (const NodePtr& t : flat) {
    if (is_const(t)) {
      constant += t->value;
      continue;
    }
    Term term = split_term(t);
    auto [it, fresh] = index.emplace(term.rest->key, terms.size());
    if (fresh) {
      terms.push_back(std::move(term));
    } else {
      terms[it->second].coef += term.coef;
    }
  }
  std::erase_if(terms, [](const Term& t) { return t.coef == cplx(0.0); });

  bool changed = true;
  while (changed) {
    changed = fold_square_identity(terms, Op::Sin, Op::Cos, 1.0) ||
              fold_square_identity(terms, Op::Cosh, Op::Sinh, -1.0);
    if (!changed) continue;
    // The folded pair may now be constant or collide with another term.
    std::vector<NodePtr> rebuilt;
    rebuilt.push_back(make_const(constant));
    for (const Term& t : terms) rebuilt.push_back(make_mul({make_const(t.coef), t.rest}));
    return make_add(std::move(rebuilt));
  }

  std::vector<NodePtr> out;
  for (const Term& t : terms) {
    out.push_back(t.coef == cplx(1.0) ? t.rest : make_mul({make_const(t.coef), t.rest}));
  }
  std::sort(out.begin(), out.end(), [](const NodePtr& a, const NodePtr& b) { return a->key < b->key; });
  if (constant != cplx(0.0)) out.insert(out.begin(), make_const(constant));
  if (out.empty()) return make_const(0.0);
  if (out.size() == 1) return out.front();
  Node n;
  n.op = Op::Add;
  n.args = std::move(out);
  return finish(std::move(n));
}

NodePtr make_mul(std::vector<NodePtr> input) {
  std::vector<NodePtr> flat;
  for (const NodePtr& f : input) {
    if (f->op == Op::Mul) {
      flat.insert(flat.end(), f->args.begin(), f->args.end());
    } else {
      flat.push_back(f);
    }
  }

  cplx coef(1.0);
  std::vector<Factor> factors;
  std::unordered_map<std::string, std::size_t> index;
  for (const NodePtr& f : flat) {
    if (is_const(f)) {
      coef *= f->value;
      continue;
    }
    for (const Factor& part : factors_of(f)) {
      auto [it, fresh] = index.emplace(part.base->key, factors.size());
      if (fresh) {
        factors.push_back(part);
      } else {
        factors[it->second].exponent += part.exponent;
      }
    }
  }
  if (coef == cplx(0.0)) return make_const(0.0);

  std::vector<NodePtr> out;
  bool needs_flatten = false;
  for (const Factor& f : factors) {
    if (f.exponent == 0.0) continue;
    NodePtr p = make_pow(f.base, f.exponent);
    if (p->op == Op::Mul || is_const(p)) needs_flatten = true;
    out.push_back(std::move(p));
  }
  if (needs_flatten) {
    out.push_back(make_const(coef));
    return make_mul(std::move(out));
  }
  std::sort(out.begin(), out.end(), [](const NodePtr& a, const NodePtr& b) { return a->key < b->key; });

  if (out.empty()) return make_const(coef);
  if (out.size() == 1 && out.front()->op == Op::Add && coef != cplx(1.0)) {
    std::vector<NodePtr> distributed;
    for (const NodePtr& t : out.front()->args) distributed.push_back(make_mul({make_const(coef), t}));
    return make_add(std::move(distributed));
  }
  if (coef == cplx(1.0) && out.size() == 1) return out.front();
  if (coef != cplx(1.0)) out.insert(out.begin(), make_const(coef));
  Node n;
  n.op = Op::Mul;
  n.args = std::move(out);
  return finish(std::move(n));
}

NodePtr make_pow(const NodePtr& base, double exponent) {
  if (exponent == 0.0) return make_const(1.0);
  if (exponent == 1.0) return base;
  if (is_const(base)) return make_const(power_value(base->value, exponent));
  if (is_integer(exponent)) {
    if (base->op == Op::Pow) return make_pow(base->args[0], base->exponent * exponent);
    if (base->op == Op::Mul) {
      std::vector<NodePtr> parts;
      for (const NodePtr& f : base->args) parts.push_back(make_pow(f, exponent));
      return make_mul(std::move(parts));
    }
  }
  Node n;
  n.op = Op::Pow;
  n.exponent = exponent;
  n.args = {base};
  return finish(std::move(n));
}

NodePtr make_unary(Op op, const NodePtr& arg) {
  if (is_const(arg)) return make_const(unary_value(op, arg->value));
  if (op == Op::Exp && arg->op == Op::Ln) return arg->args[0];
  Node n;
  n.op = op;
  n.args = {arg};
  return finish(std::move(n));
}

NodePtr make_series(std::shared_ptr<const TaylorData> data, const NodePtr& arg) {
  if (is_const(arg)) return make_const(series_value(*data, arg->value));
  Node n;
  n.op = Op::Series;
  n.series = std::move(data);
  n.args = {arg};
  return finish(std::move(n));
}

}  // namespace detail

using detail::make_add;
using detail::make_const;
using detail::make_mul;
using detail::make_pow;
using detail::make_unary;
using detail::Node;
using detail::NodePtr;
using detail::Op;

namespace {

cplx eval_node(const Node& n, cplx z) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return z;
    case Op::Add: {
      cplx s(0.0);
      for (const NodePtr& a : n.args) s += eval_node(*a, z);
      return s;
    }
    case Op::Mul: {
      cplx p(1.0);
      for (const NodePtr& a : n.args) p *= eval_node(*a, z);
      return p;
    }
    case Op::Pow: return detail::power_value(eval_node(*n.args[0], z), n.exponent);
    case Op::Series: return detail::series_value(*n.series, eval_node(*n.args[0], z));
    default: return detail::unary_value(n.op, eval_node(*n.args[0], z));
  }
}

double eval_real_node(const Node& n, double x) {
  switch (n.op) {
    case Op::Const: return n.value.real();
    case Op::Var: return x;
    case Op::Add: {
      double s = 0.0;
      for (const NodePtr& a : n.args) s += eval_real_node(*a, x);
      return s;
    }
    case Op::Mul: {
      double p = 1.0;
      for (const NodePtr& a : n.args) p *= eval_real_node(*a, x);
      return p;
    }
    case Op::Pow: {
      const double b = eval_real_node(*n.args[0], x);
      if (b == 0.0 && n.exponent < 0) throw Error(ErrorKind::OutOfDomain, "pole of a negative power");
      if (b < 0.0 && !detail::is_integer(n.exponent)) {
        throw Error(ErrorKind::OutOfDomain, "non-integer power of a negative number");
      }
      return std::pow(b, n.exponent);
    }
    case Op::Exp: return std::exp(eval_real_node(*n.args[0], x));
    case Op::Ln: {
      const double w = eval_real_node(*n.args[0], x);
      if (w <= 0.0) throw Error(ErrorKind::OutOfDomain, "logarithm of a non-positive number");
      return std::log(w);
    }
    case Op::Sin: return std::sin(eval_real_node(*n.args[0], x));
    case Op::Cos: return std::cos(eval_real_node(*n.args[0], x));
    case Op::Sinh: return std::sinh(eval_real_node(*n.args[0], x));
    case Op::Cosh: return std::cosh(eval_real_node(*n.args[0], x));
    case Op::Series: return detail::series_value(*n.series, eval_real_node(*n.args[0], x)).real();
  }
  return 0.0;
}

bool has_complex(const Node& n) {
  if (n.op == Op::Const) return n.value.imag() != 0.0;
  if (n.op == Op::Series) {
    for (const cplx& c : n.series->coeffs) {
      if (c.imag() != 0.0) return true;
    }
  }
  for (const NodePtr& a : n.args) {
    if (has_complex(*a)) return true;
  }
  return false;
}

NodePtr derivative_node(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return make_const(0.0);
    case Op::Var: return make_const(1.0);
    case Op::Add: {
      std::vector<NodePtr> terms;
      for (const NodePtr& a : n->args) terms.push_back(derivative_node(a));
      return make_add(std::move(terms));
    }
    case Op::Mul: {
      std::vector<NodePtr> terms;
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        std::vector<NodePtr> parts = n->args;
        parts[i] = derivative_node(n->args[i]);
        terms.push_back(make_mul(std::move(parts)));
      }
      return make_add(std::move(terms));
    }
    default: break;
  }
  const NodePtr& w = n->args[0];
  const NodePtr dw = derivative_node(w);
  NodePtr outer;
  switch (n->op) {
    case Op::Pow:
      outer = make_mul({make_const(n->exponent), make_pow(w, n->exponent - 1.0)});
      break;
    case Op::Exp: outer = n; break;
    case Op::Ln: outer = make_pow(w, -1.0); break;
    case Op::Sin: outer = make_unary(Op::Cos, w); break;
    case Op::Cos: outer = make_mul({make_const(-1.0), make_unary(Op::Sin, w)}); break;
    case Op::Sinh: outer = make_unary(Op::Cosh, w); break;
    case Op::Cosh: outer = make_unary(Op::Sinh, w); break;
    case Op::Series: {
      auto d = std::make_shared<TaylorData>();
      d->center = n->series->center;
      d->radius = n->series->radius;
      const auto& c = n->series->coeffs;
      for (std::size_t k = 1; k < c.size(); ++k) d->coeffs.push_back(static_cast<double>(k) * c[k]);
      if (d->coeffs.empty()) d->coeffs.push_back(0.0);
      outer = detail::make_series(std::move(d), w);
      break;
    }
    default: throw std::logic_error("unhandled node in derivative");
  }
  return make_mul({outer, dw});
}

template <class LeafFn>
NodePtr rebuild(const NodePtr& n, const LeafFn& leaf) {
  switch (n->op) {
    case Op::Const:
    case Op::Var: return leaf(n);
    case Op::Add:
    case Op::Mul: {
      std::vector<NodePtr> args;
      for (const NodePtr& a : n->args) args.push_back(rebuild(a, leaf));
      return n->op == Op::Add ? make_add(std::move(args)) : make_mul(std::move(args));
    }
    case Op::Pow: return make_pow(rebuild(n->args[0], leaf), n->exponent);
    case Op::Series: return detail::make_series(leaf(n)->series, rebuild(n->args[0], leaf));
    default: return make_unary(n->op, rebuild(n->args[0], leaf));
  }
}

}  // namespace

AnalyticFn::AnalyticFn() : node_(make_const(0.0)) {}
AnalyticFn::AnalyticFn(double value) : node_(make_const(value)) {}
AnalyticFn::AnalyticFn(cplx value) : node_(make_const(value)) {}

AnalyticFn AnalyticFn::variable() { return AnalyticFn(detail::make_var()); }

AnalyticFn AnalyticFn::taylor(TaylorData data) {
  if (data.coeffs.empty()) data.coeffs.push_back(0.0);
  if (!(data.radius > 0.0)) throw Error(ErrorKind::InvalidData, "Taylor radius must be positive");
  return AnalyticFn(detail::make_series(std::make_shared<const TaylorData>(std::move(data)),
                                        detail::make_var()));
}

cplx AnalyticFn::eval_complex(cplx z) const { return eval_node(*node_, z); }

double AnalyticFn::eval_real(double x) const {
  if (has_complex(*node_)) throw Error(ErrorKind::InvalidData, "expression is not real-valued");
  return eval_real_node(*node_, x);
}

AnalyticFn AnalyticFn::derivative() const { return AnalyticFn(derivative_node(node_)); }

AnalyticFn AnalyticFn::conj_extension() const {
  return AnalyticFn(rebuild(node_, [](const NodePtr& leaf) -> NodePtr {
    if (leaf->op == Op::Const) return make_const(std::conj(leaf->value));
    if (leaf->op == Op::Series) {
      TaylorData d = *leaf->series;
      for (cplx& c : d.coeffs) c = std::conj(c);
      Node carrier;
      carrier.op = Op::Series;
      carrier.series = std::make_shared<const TaylorData>(std::move(d));
      return std::make_shared<const Node>(std::move(carrier));
    }
    return leaf;
  }));
}

AnalyticFn AnalyticFn::substitute(const AnalyticFn& inner) const {
  const NodePtr& replacement = inner.node_;
  return AnalyticFn(rebuild(node_, [&replacement](const NodePtr& leaf) -> NodePtr {
    return leaf->op == Op::Var ? replacement : leaf;
  }));
}

std::optional<cplx> AnalyticFn::constant_value() const {
  if (node_->op == Op::Const) return node_->value;
  return std::nullopt;
}

std::optional<TaylorData> AnalyticFn::taylor_data() const {
  if (node_->op == Op::Series && node_->args[0]->op == Op::Var) return *node_->series;
  return std::nullopt;
}

bool AnalyticFn::is_zero() const { return node_->op == Op::Const && node_->value == cplx(0.0); }

bool AnalyticFn::has_complex_constants() const { return has_complex(*node_); }

const std::string& AnalyticFn::key() const { return node_->key; }

AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) {
  return AnalyticFn(make_add({a.node_, b.node_}));
}

AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b) {
  return AnalyticFn(make_add({a.node_, make_mul({make_const(-1.0), b.node_})}));
}

AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) {
  return AnalyticFn(make_mul({a.node_, b.node_}));
}

AnalyticFn operator/(const AnalyticFn& a, const AnalyticFn& b) {
  if (b.is_zero()) throw Error(ErrorKind::OutOfDomain, "division by the zero function");
  return AnalyticFn(make_mul({a.node_, make_pow(b.node_, -1.0)}));
}

AnalyticFn operator-(const AnalyticFn& a) { return AnalyticFn(make_mul({make_const(-1.0), a.node_})); }

AnalyticFn exp(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Exp, f.node())); }
AnalyticFn ln(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Ln, f.node())); }
AnalyticFn sin(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Sin, f.node())); }
AnalyticFn cos(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Cos, f.node())); }
AnalyticFn sinh(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Sinh, f.node())); }
AnalyticFn cosh(const AnalyticFn& f) { return AnalyticFn(make_unary(Op::Cosh, f.node())); }
AnalyticFn pow(const AnalyticFn& f, double exponent) { return AnalyticFn(make_pow(f.node(), exponent)); }
AnalyticFn sqrt(const AnalyticFn& f) { return AnalyticFn(make_pow(f.node(), 0.5)); }

// ---------------------------------------------------------------------------
// Power-series arithmetic for taylor_of.

namespace {

using Series = std::vector<cplx>;

Series series_mul(const Series& a, const Series& b) {
  const std::size_t n = a.size();
  Series out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == cplx(0.0)) continue;
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

struct SeriesContext {
  double center;
  std::size_t n;
  double singular_distance = std::numeric_limits<double>::infinity();
  bool needs_root_test = false;
  std::map<const Node*, Series> memo;

  void note_singularity(const Series& arg) {
    const bool affine = std::all_of(arg.begin() + std::min<std::size_t>(2, arg.size()), arg.end(),
                                    [](const cplx& c) { return c == cplx(0.0); });
    if (affine && arg.size() > 1 && arg[1] != cplx(0.0)) {
      singular_distance = std::min(singular_distance, std::abs(-arg[0] / arg[1]));
    } else {
      needs_root_test = true;
    }
  }

  [[noreturn]] void singular(const char* what) const {
    throw Error(ErrorKind::SingularCenter,
                std::string(what) + " at the expansion center " + std::to_string(center));
  }

  const Series& eval(const Node& node) {
    auto found = memo.find(&node);
    if (found != memo.end()) return found->second;
    Series out(n, 0.0);
    switch (node.op) {
      case Op::Const: out[0] = node.value; break;
      case Op::Var:
        out[0] = center;
        if (n > 1) out[1] = 1.0;
        break;
      case Op::Add:
        for (const NodePtr& a : node.args) {
          const Series& s = eval(*a);
          for (std::size_t k = 0; k < n; ++k) out[k] += s[k];
        }
        break;
      case Op::Mul:
        out[0] = 1.0;
        for (const NodePtr& a : node.args) out = series_mul(out, eval(*a));
        break;
      case Op::Pow: out = power(eval(*node.args[0]), node.exponent); break;
      case Op::Exp: {
        const Series& a = eval(*node.args[0]);
        out[0] = std::exp(a[0]);
        for (std::size_t k = 1; k < n; ++k) {
          cplx s(0.0);
          for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * out[k - j];
          out[k] = s / static_cast<double>(k);
        }
        break;
      }
      case Op::Ln: {
        const Series& a = eval(*node.args[0]);
        if (a[0] == cplx(0.0) || (a[0].imag() == 0.0 && a[0].real() < 0.0)) singular("logarithm singular");
        note_singularity(a);
        out[0] = std::log(a[0]);
        for (std::size_t k = 1; k < n; ++k) {
          cplx s(0.0);
          for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * out[j] * a[k - j];
          out[k] = (a[k] - s / static_cast<double>(k)) / a[0];
        }
        break;
      }
      case Op::Sin:
      case Op::Cos:
      case Op::Sinh:
      case Op::Cosh: {
        const Series& a = eval(*node.args[0]);
        const bool hyper = node.op == Op::Sinh || node.op == Op::Cosh;
        Series s(n, 0.0), c(n, 0.0);
        s[0] = hyper ? std::sinh(a[0]) : std::sin(a[0]);
        c[0] = hyper ? std::cosh(a[0]) : std::cos(a[0]);
        for (std::size_t k = 1; k < n; ++k) {
          cplx ds(0.0), dc(0.0);
          for (std::size_t j = 1; j <= k; ++j) {
            ds += static_cast<double>(j) * a[j] * c[k - j];
            dc += static_cast<double>(j) * a[j] * s[k - j];
          }
          s[k] = ds / static_cast<double>(k);
          c[k] = (hyper ? dc : -dc) / static_cast<double>(k);
        }
        out = (node.op == Op::Sin || node.op == Op::Sinh) ? s : c;
        break;
      }
      case Op::Series: {
        const Series& a = eval(*node.args[0]);
        const TaylorData& t = *node.series;
        const cplx offset = a[0] - t.center;
        if (std::abs(offset) >= t.radius) singular("Taylor leaf expanded outside its disc");
        if (a.size() > 1 && std::abs(a[1]) > 0.0) {
          singular_distance = std::min(singular_distance, (t.radius - std::abs(offset)) / std::abs(a[1]));
        }
        Series shifted = a;
        shifted[0] = offset;
        for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) {
          out = series_mul(out, shifted);
          out[0] += *it;
        }
        break;
      }
    }
    return memo.emplace(&node, std::move(out)).first->second;
  }

  Series power(const Series& a, double p) {
    Series out(n, 0.0);
    if (detail::is_integer(p) && p > 0) {
      out[0] = 1.0;
      for (long long i = 0; i < static_cast<long long>(p); ++i) out = series_mul(out, a);
      return out;
    }
    if (a[0] == cplx(0.0)) singular("power singular");
    if (!detail::is_integer(p) && a[0].imag() == 0.0 && a[0].real() < 0.0) singular("power branch cut");
    note_singularity(a);
    out[0] = detail::power_value(a[0], p);
    for (std::size_t k = 1; k < n; ++k) {
      cplx s(0.0);
      for (std::size_t j = 1; j <= k; ++j) {
        s += (p * static_cast<double>(j) - static_cast<double>(k - j)) * a[j] * out[k - j];
      }
      out[k] = s / (static_cast<double>(k) * a[0]);
    }
    return out;
  }
};

double root_test_radius(const Series& c) {
  double r = std::numeric_limits<double>::infinity();
  const std::size_t n = c.size();
  for (std::size_t k = std::max<std::size_t>(1, n / 2); k < n; ++k) {
    const double m = std::abs(c[k]);
    if (m > 0.0) r = std::min(r, std::pow(m, -1.0 / static_cast<double>(k)));
  }
  return r;
}

}  // namespace

AnalyticFn taylor_of(const AnalyticFn& f, double center, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("taylor_of needs at least one term");
  SeriesContext ctx{center, static_cast<std::size_t>(n_terms), std::numeric_limits<double>::infinity(), false, {}};
  TaylorData data;
  data.center = center;
  data.coeffs = ctx.eval(*f.node());
  double radius = ctx.singular_distance;
  if (ctx.needs_root_test) radius = std::min(radius, root_test_radius(data.coeffs));
  data.radius = radius;
  return AnalyticFn::taylor(std::move(data));
}

// ---------------------------------------------------------------------------
// Compiled tape.

namespace detail {

struct Instr {
  Op op;
  std::vector<int> args;
  cplx value;
  double exponent;
  const TaylorData* series;
};

struct Tape {
  std::vector<NodePtr> keep_alive;
  std::vector<Instr> code;
  std::vector<int> outputs;
};

}  // namespace detail

namespace {

int emit(detail::Tape& tape, std::unordered_map<std::string, int>& seen, const NodePtr& n) {
  auto found = seen.find(n->key);
  if (found != seen.end()) return found->second;
  detail::Instr ins{n->op, {}, n->value, n->exponent, n->series.get()};
  for (const NodePtr& a : n->args) ins.args.push_back(emit(tape, seen, a));
  tape.code.push_back(std::move(ins));
  const int slot = static_cast<int>(tape.code.size()) - 1;
  seen.emplace(n->key, slot);
  return slot;
}

}  // namespace

CompiledFns::CompiledFns(std::span<const AnalyticFn> fns) : size_(fns.size()) {
  auto tape = std::make_shared<detail::Tape>();
  std::unordered_map<std::string, int> seen;
  for (const AnalyticFn& f : fns) {
    tape->keep_alive.push_back(f.node());
    tape->outputs.push_back(emit(*tape, seen, f.node()));
  }
  tape_ = std::move(tape);
}

void CompiledFns::evaluate(cplx z, std::span<cplx> out) const {
  if (out.size() < size_) throw std::invalid_argument("output span too small");
  if (!tape_) return;
  std::vector<cplx> reg(tape_->code.size());
  for (std::size_t i = 0; i < tape_->code.size(); ++i) {
    const detail::Instr& ins = tape_->code[i];
    switch (ins.op) {
      case Op::Const: reg[i] = ins.value; break;
      case Op::Var: reg[i] = z; break;
      case Op::Add: {
        cplx s(0.0);
        for (int a : ins.args) s += reg[a];
        reg[i] = s;
        break;
      }
      case Op::Mul: {
        cplx p(1.0);
        for (int a : ins.args) p *= reg[a];
        reg[i] = p;
        break;
      }
      case Op::Pow: reg[i] = detail::power_value(reg[ins.args[0]], ins.exponent); break;
      case Op::Series: reg[i] = detail::series_value(*ins.series, reg[ins.args[0]]); break;
      default: reg[i] = detail::unary_value(ins.op, reg[ins.args[0]]); break;
    }
  }
  for (std::size_t k = 0; k < size_; ++k) out[k] = reg[tape_->outputs[k]];
}

// ---------------------------------------------------------------------------
// Vector helpers.

AnalyticVec3 AnalyticVec3::parse(const std::array<std::string, 3>& text) {
  return {{AnalyticFn::parse(text[0]), AnalyticFn::parse(text[1]), AnalyticFn::parse(text[2])}};
}

AnalyticVec3 AnalyticVec3::derivative() const {
  return {{c[0].derivative(), c[1].derivative(), c[2].derivative()}};
}

AnalyticVec3 AnalyticVec3::scaled(const AnalyticFn& s) const { return {{s * c[0], s * c[1], s * c[2]}}; }

AnalyticVec3 AnalyticVec3::conj_extension() const {
  return {{c[0].conj_extension(), c[1].conj_extension(), c[2].conj_extension()}};
}

std::array<cplx, 3> AnalyticVec3::eval_complex(cplx z) const {
  return {c[0].eval_complex(z), c[1].eval_complex(z), c[2].eval_complex(z)};
}

Vec3 AnalyticVec3::eval_real(double x) const {
  return {c[0].eval_real(x), c[1].eval_real(x), c[2].eval_real(x)};
}

std::array<std::string, 3> AnalyticVec3::to_strings() const {
  return {c[0].to_string(), c[1].to_string(), c[2].to_string()};
}

AnalyticFn dot(const AnalyticVec3& a, const AnalyticVec3& b) {
  return AnalyticFn(make_add({make_mul({a[0].node(), b[0].node()}), make_mul({a[1].node(), b[1].node()}),
                              make_mul({a[2].node(), b[2].node()})}));
}

AnalyticVec3 cross(const AnalyticVec3& a, const AnalyticVec3& b) {
  return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

AnalyticVec3 operator+(const AnalyticVec3& a, const AnalyticVec3& b) {
  return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}

AnalyticVec3 operator-(const AnalyticVec3& a, const AnalyticVec3& b) {
  return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}};
}

}  // namespace cmc
