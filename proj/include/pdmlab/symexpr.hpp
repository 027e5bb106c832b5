#ifndef PDMLAB_SYMEXPR_HPP
#define PDMLAB_SYMEXPR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdmlab/errors.hpp"

namespace pdmlab {

using Rational = boost::multiprecision::cpp_rational;

enum class ExprKind { number, coord, param, func, sum, product, power, call };
enum class ElemFn { sin, cos, exp };

class ExprNode;
// Immutable shared expression tree. Structural construction is total;
// meaning is fixed by eval and canonicalization.
using ScalarExpr = std::shared_ptr<const ExprNode>;

class ExprNode {
 public:
  ExprKind kind;
  Rational value;                // number
  std::string name;              // param / func
  int order = 0;                 // func: derivative order (>= 0)
  ElemFn elem = ElemFn::sin;     // call
  std::vector<ScalarExpr> kids;  // sum/product: terms/factors
                                 // power: {base, exponent}; call: {argument}

  explicit ExprNode(ExprKind k) : kind(k) {}
};

// The closed set of abstract function-symbol names.
bool is_function_symbol_name(const std::string& name);

// Leaf constructors.
ScalarExpr num(Rational v);
ScalarExpr num(long long v);
ScalarExpr num(long long numer, long long denom);
ScalarExpr coord();                                  // the coordinate x
ScalarExpr param(const std::string& name);           // named scalar parameter
ScalarExpr func(const std::string& name, int order); // abstract function symbol

// Composite constructors. These flatten nested sums/products, fold
// rational constants and drop neutral elements, but perform no deep
// simplification; canonicalize() is the equality backend.
ScalarExpr sum_of(std::vector<ScalarExpr> terms);
ScalarExpr product_of(std::vector<ScalarExpr> factors);
ScalarExpr add(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr sub(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr neg(const ScalarExpr& a);
ScalarExpr mul(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr div(const ScalarExpr& a, const ScalarExpr& b);  // stored as a * b^-1
ScalarExpr pow_of(const ScalarExpr& base, const ScalarExpr& exponent);
ScalarExpr ipow(const ScalarExpr& base, long long exponent);
ScalarExpr elem_call(ElemFn fn, const ScalarExpr& arg);
ScalarExpr sin_of(const ScalarExpr& arg);
ScalarExpr cos_of(const ScalarExpr& arg);
ScalarExpr exp_of(const ScalarExpr& arg);

inline bool is_number(const ScalarExpr& e) { return e->kind == ExprKind::number; }
inline bool is_zero(const ScalarExpr& e) { return is_number(e) && e->value == 0; }
inline bool is_one(const ScalarExpr& e) { return is_number(e) && e->value == 1; }
bool is_integer(const Rational& r);

// True if e mentions the coordinate (directly or through a function
// symbol, which implicitly depends on x).
bool depends_on_coord(const ScalarExpr& e);

// Exact d/dx. Function symbols bump their derivative order; parameters
// differentiate to zero. Throws eval_error for a power whose exponent
// depends on x (outside the supported algebra).
ScalarExpr differentiate(const ScalarExpr& e);
ScalarExpr differentiate(const ScalarExpr& e, int times);

// Binds abstract function symbols to closed-form profiles and parameters
// to real values. Bound profiles must be fully concrete (no function
// symbols); derivatives of bound profiles are produced symbolically and
// cached. Immutable after construction apart from the internal cache;
// safe for concurrent reads.
class ProfileBinding {
 public:
  ProfileBinding() = default;
  ProfileBinding(const ProfileBinding& other);
  ProfileBinding& operator=(const ProfileBinding& other);

  void bind_function(const std::string& name, ScalarExpr closed_form);
  void bind_param(const std::string& name, double value);

  bool has_function(const std::string& name) const;
  bool has_param(const std::string& name) const;
  std::optional<double> param(const std::string& name) const;

  // k-th symbolic derivative of the bound profile, cached.
  ScalarExpr derivative(const std::string& name, int order) const;

 private:
  std::map<std::string, ScalarExpr> funcs_;
  std::map<std::string, double> params_;
  mutable std::map<std::pair<std::string, int>, ScalarExpr> dcache_;
  mutable std::mutex mu_;
};

// Numeric evaluation at coordinate x. `pi` is a reserved parameter bound
// to the circle constant. Throws eval_error on unbound symbols and on
// singularities (|divisor| below 1e-300).
double eval(const ScalarExpr& e, const ProfileBinding& binding, double x);
double eval(const ScalarExpr& e, double x);  // empty binding

// Parses the expression grammar: rational/decimal literals, identifiers
// with prime suffixes for derivative orders (J'' = order 2), + - * / ^,
// parentheses, sin/cos/exp, and the constant pi. `^` is right
// associative and binds tighter than unary minus, which binds tighter
// than * and /. Unknown identifiers become parameters; primes on a name
// outside the function-symbol set are an error.
ScalarExpr parse_expr(const std::string& text);

// Round-trip stable printing: parse_expr(to_string(e)) canonically
// equals e on the canonicalizable fragment.
std::string to_string(const ScalarExpr& e);
std::string to_string(const Rational& r);

}  // namespace pdmlab

#endif
