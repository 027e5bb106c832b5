#include "pdmlab/diffop.hpp"

#include <sstream>

namespace pdmlab {

LinDiffOp LinDiffOp::identity() {
  LinDiffOp op;
  op.coeffs_[0] = num(1);
  return op;
}

LinDiffOp LinDiffOp::deriv(int k) {
  if (k < 0) throw error("negative derivative order");
  LinDiffOp op;
  op.coeffs_[k] = num(1);
  return op;
}

LinDiffOp LinDiffOp::mul_op(const ScalarExpr& f) {
  LinDiffOp op;
  if (!is_zero(f)) op.coeffs_[0] = f;
  return op;
}

int LinDiffOp::max_order() const {
  return coeffs_.empty() ? -1 : coeffs_.rbegin()->first;
}

ScalarExpr LinDiffOp::coeff(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? num(0) : it->second;
}

void LinDiffOp::set_coeff(int k, ScalarExpr c) {
  if (k < 0) throw error("negative derivative order");
  if (is_zero(c))
    coeffs_.erase(k);
  else
    coeffs_[k] = std::move(c);
}

void LinDiffOp::add_to_coeff(int k, const ScalarExpr& c) {
  set_coeff(k, add(coeff(k), c));
}

LinDiffOp op_add(const LinDiffOp& a, const LinDiffOp& b) {
  LinDiffOp r = a;
  for (const auto& [k, c] : b.coeffs()) r.add_to_coeff(k, c);
  return r;
}

LinDiffOp op_sub(const LinDiffOp& a, const LinDiffOp& b) {
  return op_add(a, op_neg(b));
}

LinDiffOp op_scale(const ScalarExpr& s, const LinDiffOp& a) {
  LinDiffOp r;
  for (const auto& [k, c] : a.coeffs()) r.set_coeff(k, mul(s, c));
  return r;
}

LinDiffOp op_neg(const LinDiffOp& a) { return op_scale(num(-1), a); }

LinDiffOp op_compose(const LinDiffOp& a, const LinDiffOp& b) {
  LinDiffOp r;
  for (const auto& [k, ak] : a.coeffs()) {
    for (const auto& [j, bj] : b.coeffs()) {
      // D^k (Mul bj) = sum_i C(k,i) Mul(bj^(i)) D^(k-i)
      Rational binom(1);
      ScalarExpr bj_d = bj;
      for (int i = 0; i <= k; ++i) {
        if (i > 0) {
          binom = binom * Rational(k - i + 1) / Rational(i);
          bj_d = differentiate(bj_d);
        }
        r.add_to_coeff(k - i + j, product_of({ak, num(binom), bj_d}));
      }
    }
  }
  return r;
}

LinDiffOp op_from_word(const std::vector<WordToken>& word) {
  LinDiffOp r = LinDiffOp::identity();
  for (const auto& t : word)
    r = op_compose(r, t.is_d ? LinDiffOp::deriv() : LinDiffOp::mul_op(t.factor));
  return r;
}

std::vector<WordToken> parse_word(const std::string& text) {
  std::vector<WordToken> word;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "D")
      word.push_back(tok_d());
    else
      word.push_back(tok_mul(parse_expr(tok)));
  }
  return word;
}

LinDiffOp op_from_word(const std::string& text) { return op_from_word(parse_word(text)); }

ScalarExpr apply(const LinDiffOp& a, const std::string& target) {
  std::vector<ScalarExpr> terms;
  for (const auto& [k, c] : a.coeffs()) terms.push_back(mul(c, func(target, k)));
  return sum_of(std::move(terms));
}

ScalarExpr act(const LinDiffOp& a, const ScalarExpr& target) {
  std::vector<ScalarExpr> terms;
  for (const auto& [k, c] : a.coeffs()) terms.push_back(mul(c, differentiate(target, k)));
  return sum_of(std::move(terms));
}

LinDiffOp formal_adjoint(const LinDiffOp& a) {
  LinDiffOp r;
  for (const auto& [k, c] : a.coeffs()) {
    LinDiffOp term = op_compose(LinDiffOp::deriv(k), LinDiffOp::mul_op(c));
    if (k % 2) term = op_neg(term);
    r = op_add(r, term);
  }
  return r;
}

namespace {

template <typename EqualFn>
OpVerdict op_equal_impl(const LinDiffOp& a, const LinDiffOp& b, EqualFn&& check) {
  OpVerdict v;
  v.equal = true;
  int hi = std::max(a.max_order(), b.max_order());
  for (int k = 0; k <= hi; ++k) {
    EqualVerdict ek = check(a.coeff(k), b.coeff(k));
    OpCoeffCheck cc;
    cc.order = k;
    cc.equal = ek.equal;
    cc.detail = ek.detail;
    if (ek.method == EqualMethod::numeric) v.method = EqualMethod::numeric;
    v.max_rel_dev = std::max(v.max_rel_dev, ek.max_rel_dev);
    v.equal = v.equal && ek.equal;
    v.coefficients.push_back(std::move(cc));
  }
  return v;
}

}  // namespace

OpVerdict op_equal(const LinDiffOp& a, const LinDiffOp& b) {
  return op_equal_impl(a, b,
                       [](const ScalarExpr& x, const ScalarExpr& y) { return expr_equal(x, y); });
}

OpVerdict op_equal(const LinDiffOp& a, const LinDiffOp& b, const ProfileBinding& binding,
                   const EqualOptions& opts) {
  return op_equal_impl(a, b, [&](const ScalarExpr& x, const ScalarExpr& y) {
    return expr_equal(x, y, binding, opts);
  });
}

std::string to_string(const LinDiffOp& a) {
  if (a.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = a.coeffs().rbegin(); it != a.coeffs().rend(); ++it) {
    if (!first) out << " + ";
    first = false;
    out << '(' << to_string(it->second) << ')';
    if (it->first == 1)
      out << "*D";
    else if (it->first > 1)
      out << "*D^" << it->first;
  }
  return out.str();
}

}  // namespace pdmlab
