#ifndef PDMLAB_DIFFOP_HPP
#define PDMLAB_DIFFOP_HPP

#include <map>
#include <string>
#include <vector>

#include "pdmlab/canonical.hpp"
#include "pdmlab/symexpr.hpp"

namespace pdmlab {

// Linear ordinary differential operator in normal form:
//   sum_k c_k(x) d^k/dx^k
// with every coefficient standing to the left of the derivatives. The
// zero operator has an empty coefficient map; literal-zero coefficients
// are never stored.
class LinDiffOp {
 public:
  LinDiffOp() = default;

  static LinDiffOp zero() { return {}; }
  static LinDiffOp identity();
  static LinDiffOp deriv(int k = 1);           // d^k/dx^k
  static LinDiffOp mul_op(const ScalarExpr& f);  // multiplication by f(x)

  bool is_zero() const { return coeffs_.empty(); }
  int max_order() const;
  // Coefficient of d^k/dx^k; literal zero when absent.
  ScalarExpr coeff(int k) const;
  const std::map<int, ScalarExpr>& coeffs() const { return coeffs_; }

  void set_coeff(int k, ScalarExpr c);
  void add_to_coeff(int k, const ScalarExpr& c);

 private:
  std::map<int, ScalarExpr> coeffs_;
};

LinDiffOp op_add(const LinDiffOp& a, const LinDiffOp& b);
LinDiffOp op_sub(const LinDiffOp& a, const LinDiffOp& b);
LinDiffOp op_scale(const ScalarExpr& s, const LinDiffOp& a);
LinDiffOp op_neg(const LinDiffOp& a);

// Operator composition in normal form via the general Leibniz rule
//   D^k (f g) = sum_i C(k,i) f^(i) g^(k-i),
// so that apply(op_compose(A, B), psi) equals A acting on B psi.
LinDiffOp op_compose(const LinDiffOp& a, const LinDiffOp& b);

// One token of an operator word: either d/dx or multiplication by f.
struct WordToken {
  bool is_d = false;
  ScalarExpr factor;  // set when !is_d
};
inline WordToken tok_d() { return WordToken{true, nullptr}; }
inline WordToken tok_mul(ScalarExpr f) { return WordToken{false, std::move(f)}; }

// Left-to-right composition of a token word such as J^a D J^b D J^c
// into normal form using D(Mul f) = (Mul f)D + Mul f'.
LinDiffOp op_from_word(const std::vector<WordToken>& word);

// Config surface: whitespace-separated tokens, `D` for the derivative,
// anything else parsed as an expression factor.
std::vector<WordToken> parse_word(const std::string& text);
LinDiffOp op_from_word(const std::string& text);

// Applies the operator to an abstract function symbol:
// sum_k c_k * FuncSym(target, k).
ScalarExpr apply(const LinDiffOp& a, const std::string& target);

// Action on a concrete expression, expanding derivatives symbolically.
ScalarExpr act(const LinDiffOp& a, const ScalarExpr& target);

// Integration-by-parts dual sum_k (-1)^k D^k (Mul c_k), renormalized.
// Involutive; fixes the hermitian forms the experiments care about.
LinDiffOp formal_adjoint(const LinDiffOp& a);

struct OpCoeffCheck {
  int order = 0;
  bool equal = false;
  std::string detail;
};

struct OpVerdict {
  bool equal = false;
  EqualMethod method = EqualMethod::exact;
  double max_rel_dev = 0.0;
  std::vector<OpCoeffCheck> coefficients;
  explicit operator bool() const { return equal; }
};

// Order-by-order coefficient equality; exact when every coefficient is
// canonicalizable, otherwise numeric under the binding.
OpVerdict op_equal(const LinDiffOp& a, const LinDiffOp& b);
OpVerdict op_equal(const LinDiffOp& a, const LinDiffOp& b, const ProfileBinding& binding,
                   const EqualOptions& opts = {});

std::string to_string(const LinDiffOp& a);

}  // namespace pdmlab

#endif
