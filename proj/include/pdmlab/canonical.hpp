#ifndef PDMLAB_CANONICAL_HPP
#define PDMLAB_CANONICAL_HPP

#include <map>
#include <string>

#include "pdmlab/symexpr.hpp"

namespace pdmlab {

// Laurent monomial in the named parameters: name -> nonzero integer
// exponent. The empty monomial is 1.
using ParamMonomial = std::map<std::string, int>;

// Multivariate Laurent polynomial in the parameters with exact rational
// coefficients. This is the coefficient ring of CanonicalPoly and also
// the exponent domain for function-symbol powers, so that J^alpha and
// its relatives stay exact.
class ParamPoly {
 public:
  ParamPoly() = default;
  static ParamPoly constant(Rational c);
  static ParamPoly variable(const std::string& name);

  bool is_zero() const { return terms_.empty(); }
  bool is_one() const;
  // Constant value if the polynomial has no parameter dependence.
  const Rational* constant_value() const;
  // Integer value if constant and integral.
  bool integer_value(long long* out) const;

  ParamPoly operator-() const;
  ParamPoly& operator+=(const ParamPoly& o);
  ParamPoly& operator-=(const ParamPoly& o);
  ParamPoly operator*(const ParamPoly& o) const;
  ParamPoly scaled(const Rational& c) const;

  const std::map<ParamMonomial, Rational>& terms() const { return terms_; }
  void insert_term(ParamMonomial m, Rational c);

  friend bool operator==(const ParamPoly& a, const ParamPoly& b) {
    return a.terms_ == b.terms_;
  }
  friend int compare(const ParamPoly& a, const ParamPoly& b);

 private:
  std::map<ParamMonomial, Rational> terms_;
};

inline ParamPoly operator+(ParamPoly a, const ParamPoly& b) { return a += b; }
inline ParamPoly operator-(ParamPoly a, const ParamPoly& b) { return a -= b; }

// A function symbol at a fixed derivative order.
struct FuncKey {
  std::string name;
  int order;
  friend bool operator==(const FuncKey&, const FuncKey&) = default;
  friend bool operator<(const FuncKey& a, const FuncKey& b) {
    return a.name != b.name ? a.name < b.name : a.order < b.order;
  }
};

// Monomial over function symbols: FuncKey -> nonzero exponent. Exponents
// are parameter polynomials so that unexpanded von Roos powers such as
// J^(beta+gamma-1) flow through products exactly; plain integers embed as
// constants, and negative integer exponents house terms like (J')^2/J.
struct FuncMonomial {
  std::map<FuncKey, ParamPoly> factors;
  friend bool operator==(const FuncMonomial&, const FuncMonomial&) = default;
};
int compare(const FuncMonomial& a, const FuncMonomial& b);
struct FuncMonomialLess {
  bool operator()(const FuncMonomial& a, const FuncMonomial& b) const {
    return compare(a, b) < 0;
  }
};

// Fully expanded, collected normal form on the polynomial fragment.
// Two values are equal iff their term maps are identical, which makes
// equality on this fragment a decision procedure.
class CanonicalPoly {
 public:
  CanonicalPoly() = default;
  static CanonicalPoly constant(Rational c);
  static CanonicalPoly from_param(const std::string& name);
  static CanonicalPoly from_func(const std::string& name, int order);

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  CanonicalPoly operator-() const;
  CanonicalPoly& operator+=(const CanonicalPoly& o);
  CanonicalPoly& operator-=(const CanonicalPoly& o);
  CanonicalPoly operator*(const CanonicalPoly& o) const;
  CanonicalPoly pow_int(long long k) const;  // k >= 0

  const std::map<FuncMonomial, ParamPoly, FuncMonomialLess>& terms() const {
    return terms_;
  }
  void insert_term(FuncMonomial m, ParamPoly c);

  friend bool operator==(const CanonicalPoly& a, const CanonicalPoly& b) {
    return a.terms_ == b.terms_;
  }

 private:
  std::map<FuncMonomial, ParamPoly, FuncMonomialLess> terms_;
};

// Expands e into canonical form. The fragment excludes the coordinate
// and elementary calls; violations raise fragment_error naming the
// offending subexpression. Exact rational arithmetic throughout.
CanonicalPoly canonicalize(const ScalarExpr& e);

// Deterministic expression reconstruction; canonicalize(to_expr(c)) == c.
ScalarExpr to_expr(const CanonicalPoly& c);
std::string to_string(const CanonicalPoly& c);

// Keeps only the terms whose degree in the named parameter lies in
// [min_deg, max_deg]; used for order-by-order work in a small parameter.
CanonicalPoly filter_param_degree(const CanonicalPoly& c, const std::string& name,
                                  int min_deg, int max_deg);

enum class EqualMethod { exact, numeric };

struct EqualVerdict {
  bool equal = false;
  EqualMethod method = EqualMethod::exact;
  double max_rel_dev = 0.0;  // numeric method only
  std::string detail;
  explicit operator bool() const { return equal; }
};

struct EqualOptions {
  int points = 32;        // quasi-random sample count
  double lo = 0.0;        // sampling interval
  double hi = 1.0;
  double rel_tol = 1e-10;
};

// Exact equality via canonical difference. Throws undecidable_error when
// either side lies outside the fragment.
EqualVerdict expr_equal(const ScalarExpr& e1, const ScalarExpr& e2);

// Exact when possible, otherwise probabilistic: evaluates both sides at
// `points` golden-ratio quasi-random coordinates under the binding.
EqualVerdict expr_equal(const ScalarExpr& e1, const ScalarExpr& e2,
                        const ProfileBinding& binding, const EqualOptions& opts = {});

}  // namespace pdmlab

#endif
