#include "pdmlab/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdmlab {

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare(const ParamMonomial& a, const ParamMonomial& b) {
  auto ia = a.begin(), ib = b.begin();
  for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
    if (int c = cmp3(ia->first, ib->first)) return c;
    if (int c = cmp3(ia->second, ib->second)) return c;
  }
  return ia != a.end() ? 1 : (ib != b.end() ? -1 : 0);
}

Rational rat_ipow(const Rational& base, long long e) {
  if (e == 0) return Rational(1);
  bool invert = e < 0;
  unsigned long long n = invert ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  Rational acc(1), b = base;
  while (n) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return invert ? Rational(1) / acc : acc;
}

}  // namespace

ParamPoly ParamPoly::constant(Rational c) {
  ParamPoly p;
  if (c != 0) p.terms_.emplace(ParamMonomial{}, std::move(c));
  return p;
}

ParamPoly ParamPoly::variable(const std::string& name) {
  ParamPoly p;
  p.terms_.emplace(ParamMonomial{{name, 1}}, Rational(1));
  return p;
}

bool ParamPoly::is_one() const {
  const Rational* c = constant_value();
  return c && *c == 1;
}

const Rational* ParamPoly::constant_value() const {
  if (terms_.empty()) {
    static const Rational zero(0);
    return &zero;
  }
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return &terms_.begin()->second;
  return nullptr;
}

bool ParamPoly::integer_value(long long* out) const {
  const Rational* c = constant_value();
  if (!c || !is_integer(*c)) return false;
  if (numerator(*c) > 1000000 || numerator(*c) < -1000000) return false;
  *out = numerator(*c).convert_to<long long>();
  return true;
}

void ParamPoly::insert_term(ParamMonomial m, Rational c) {
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), std::move(c));
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ParamPoly ParamPoly::operator-() const {
  ParamPoly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

ParamPoly& ParamPoly::operator+=(const ParamPoly& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, c);
  return *this;
}

ParamPoly& ParamPoly::operator-=(const ParamPoly& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, -c);
  return *this;
}

ParamPoly ParamPoly::operator*(const ParamPoly& o) const {
  ParamPoly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      ParamMonomial m = ma;
      for (const auto& [name, e] : mb) {
        int& slot = m[name];
        slot += e;
        if (slot == 0) m.erase(name);
      }
      r.insert_term(std::move(m), ca * cb);
    }
  }
  return r;
}

ParamPoly ParamPoly::scaled(const Rational& c) const {
  ParamPoly r;
  if (c == 0) return r;
  for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
  return r;
}

int compare(const ParamPoly& a, const ParamPoly& b) {
  auto ia = a.terms_.begin(), ib = b.terms_.begin();
  for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
    if (int c = compare(ia->first, ib->first)) return c;
    if (int c = cmp3(ia->second, ib->second)) return c;
  }
  return ia != a.terms_.end() ? 1 : (ib != b.terms_.end() ? -1 : 0);
}

int compare(const FuncMonomial& a, const FuncMonomial& b) {
  auto ia = a.factors.begin(), ib = b.factors.begin();
  for (; ia != a.factors.end() && ib != b.factors.end(); ++ia, ++ib) {
    if (int c = cmp3(ia->first, ib->first)) return c;
    if (int c = compare(ia->second, ib->second)) return c;
  }
  return ia != a.factors.end() ? 1 : (ib != b.factors.end() ? -1 : 0);
}

CanonicalPoly CanonicalPoly::constant(Rational c) {
  CanonicalPoly p;
  ParamPoly coeff = ParamPoly::constant(std::move(c));
  if (!coeff.is_zero()) p.terms_.emplace(FuncMonomial{}, std::move(coeff));
  return p;
}

CanonicalPoly CanonicalPoly::from_param(const std::string& name) {
  CanonicalPoly p;
  p.terms_.emplace(FuncMonomial{}, ParamPoly::variable(name));
  return p;
}

CanonicalPoly CanonicalPoly::from_func(const std::string& name, int order) {
  CanonicalPoly p;
  FuncMonomial m;
  m.factors.emplace(FuncKey{name, order}, ParamPoly::constant(Rational(1)));
  p.terms_.emplace(std::move(m), ParamPoly::constant(Rational(1)));
  return p;
}

void CanonicalPoly::insert_term(FuncMonomial m, ParamPoly c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), std::move(c));
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

CanonicalPoly CanonicalPoly::operator-() const {
  CanonicalPoly r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

CanonicalPoly& CanonicalPoly::operator+=(const CanonicalPoly& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, c);
  return *this;
}

CanonicalPoly& CanonicalPoly::operator-=(const CanonicalPoly& o) {
  for (const auto& [m, c] : o.terms_) insert_term(m, -c);
  return *this;
}

CanonicalPoly CanonicalPoly::operator*(const CanonicalPoly& o) const {
  CanonicalPoly r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      FuncMonomial m = ma;
      for (const auto& [key, e] : mb.factors) {
        auto it = m.factors.find(key);
        if (it == m.factors.end()) {
          m.factors.emplace(key, e);
        } else {
          it->second += e;
          if (it->second.is_zero()) m.factors.erase(it);
        }
      }
      r.insert_term(std::move(m), ca * cb);
    }
  }
  return r;
}

CanonicalPoly CanonicalPoly::pow_int(long long k) const {
  CanonicalPoly acc = constant(Rational(1));
  CanonicalPoly base = *this;
  unsigned long long n = static_cast<unsigned long long>(k);
  while (n) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

namespace {

// Exponents may be arbitrary parameter polynomials; this lifts a
// CanonicalPoly with no function content back into the coefficient ring.
ParamPoly as_param_poly(const CanonicalPoly& c, const ScalarExpr& where) {
  ParamPoly out;
  for (const auto& [m, coeff] : c.terms()) {
    if (!m.factors.empty())
      throw fragment_error("exponent contains a function symbol in " + to_string(where));
    out += coeff;
  }
  return out;
}

CanonicalPoly canon_power(const CanonicalPoly& base, const ParamPoly& expo,
                          const ScalarExpr& where) {
  long long k = 0;
  if (expo.is_zero()) return CanonicalPoly::constant(Rational(1));
  if (expo.integer_value(&k)) {
    if (k >= 0) {
      if (k > 64)
        throw fragment_error("exponent too large to expand in " + to_string(where));
      return base.pow_int(k);
    }
    // negative integer: invertible only for a single monomial term
    if (base.term_count() != 1)
      throw fragment_error("negative power of a non-monomial in " + to_string(where));
    const auto& [fm, coeff] = *base.terms().begin();
    if (coeff.terms().size() != 1)
      throw fragment_error("negative power of a non-monomial coefficient in " + to_string(where));
    const auto& [pm, c] = *coeff.terms().begin();
    FuncMonomial rm;
    for (const auto& [key, e] : fm.factors) rm.factors.emplace(key, e.scaled(Rational(k)));
    ParamMonomial rpm;
    for (const auto& [name, e] : pm) rpm.emplace(name, e * static_cast<int>(k));
    ParamPoly rc;
    rc.insert_term(std::move(rpm), rat_ipow(c, k));
    CanonicalPoly out;
    out.insert_term(std::move(rm), std::move(rc));
    return out;
  }
  // symbolic (or non-integer rational) exponent: only a bare function
  // monomial with unit coefficient can carry it, e.g. J^alpha
  if (base.term_count() != 1)
    throw fragment_error("symbolic power of a non-monomial in " + to_string(where));
  const auto& [fm, coeff] = *base.terms().begin();
  if (!coeff.is_one())
    throw fragment_error("symbolic power of a scaled monomial in " + to_string(where));
  FuncMonomial rm;
  for (const auto& [key, e] : fm.factors) {
    ParamPoly scaled = e * expo;
    if (!scaled.is_zero()) rm.factors.emplace(key, std::move(scaled));
  }
  CanonicalPoly out;
  out.insert_term(std::move(rm), ParamPoly::constant(Rational(1)));
  return out;
}

}  // namespace

CanonicalPoly canonicalize(const ScalarExpr& e) {
  switch (e->kind) {
    case ExprKind::number:
      return CanonicalPoly::constant(e->value);
    case ExprKind::param:
      return CanonicalPoly::from_param(e->name);
    case ExprKind::func:
      return CanonicalPoly::from_func(e->name, e->order);
    case ExprKind::coord:
      throw fragment_error("the coordinate x is outside the canonicalizable fragment");
    case ExprKind::call:
      throw fragment_error("elementary call outside the canonicalizable fragment: " +
                           to_string(e));
    case ExprKind::sum: {
      CanonicalPoly r;
      for (const auto& k : e->kids) r += canonicalize(k);
      return r;
    }
    case ExprKind::product: {
      CanonicalPoly r = CanonicalPoly::constant(Rational(1));
      for (const auto& k : e->kids) r = r * canonicalize(k);
      return r;
    }
    case ExprKind::power: {
      ParamPoly expo = as_param_poly(canonicalize(e->kids[1]), e);
      return canon_power(canonicalize(e->kids[0]), expo, e);
    }
  }
  throw error("unreachable expression kind");
}

namespace {

ScalarExpr param_poly_to_expr(const ParamPoly& p) {
  std::vector<ScalarExpr> terms;
  for (const auto& [m, c] : p.terms()) {
    std::vector<ScalarExpr> factors;
    factors.push_back(num(c));
    for (const auto& [name, e] : m) factors.push_back(ipow(param(name), e));
    terms.push_back(product_of(std::move(factors)));
  }
  return sum_of(std::move(terms));
}

}  // namespace

ScalarExpr to_expr(const CanonicalPoly& c) {
  std::vector<ScalarExpr> terms;
  for (const auto& [m, coeff] : c.terms()) {
    std::vector<ScalarExpr> factors;
    factors.push_back(param_poly_to_expr(coeff));
    for (const auto& [key, e] : m.factors) {
      long long k;
      if (e.integer_value(&k))
        factors.push_back(ipow(func(key.name, key.order), k));
      else
        factors.push_back(pow_of(func(key.name, key.order), param_poly_to_expr(e)));
    }
    terms.push_back(product_of(std::move(factors)));
  }
  return sum_of(std::move(terms));
}

std::string to_string(const CanonicalPoly& c) { return to_string(to_expr(c)); }

CanonicalPoly filter_param_degree(const CanonicalPoly& c, const std::string& name,
                                  int min_deg, int max_deg) {
  CanonicalPoly out;
  for (const auto& [m, coeff] : c.terms()) {
    ParamPoly kept;
    for (const auto& [pm, v] : coeff.terms()) {
      auto it = pm.find(name);
      int deg = it == pm.end() ? 0 : it->second;
      if (deg >= min_deg && deg <= max_deg) kept.insert_term(pm, v);
    }
    out.insert_term(m, std::move(kept));
  }
  return out;
}

EqualVerdict expr_equal(const ScalarExpr& e1, const ScalarExpr& e2) {
  CanonicalPoly diff;
  try {
    diff = canonicalize(sub(e1, e2));
  } catch (const fragment_error& fe) {
    throw undecidable_error(std::string("equality undecidable without a binding: ") + fe.what());
  }
  EqualVerdict v;
  v.method = EqualMethod::exact;
  v.equal = diff.is_zero();
  v.detail = v.equal ? "canonical difference is zero"
                     : "canonical difference: " + to_string(diff);
  return v;
}

EqualVerdict expr_equal(const ScalarExpr& e1, const ScalarExpr& e2,
                        const ProfileBinding& binding, const EqualOptions& opts) {
  try {
    CanonicalPoly diff = canonicalize(sub(e1, e2));
    EqualVerdict v;
    v.method = EqualMethod::exact;
    v.equal = diff.is_zero();
    v.detail = v.equal ? "canonical difference is zero"
                       : "canonical difference: " + to_string(diff);
    return v;
  } catch (const fragment_error&) {
    // fall through to sampling
  }
  EqualVerdict v;
  v.method = EqualMethod::numeric;
  constexpr double kGolden = 0.61803398874989484820;
  double u = 0.0;
  double maxdev = 0.0;
  for (int i = 0; i < opts.points; ++i) {
    u += kGolden;
    u -= std::floor(u);
    double x = opts.lo + (opts.hi - opts.lo) * u;
    double v1 = eval(e1, binding, x);
    double v2 = eval(e2, binding, x);
    double dev = std::abs(v1 - v2) / std::max({std::abs(v1), std::abs(v2), 1.0});
    maxdev = std::max(maxdev, dev);
  }
  v.max_rel_dev = maxdev;
  v.equal = maxdev <= opts.rel_tol;
  std::ostringstream os;
  os << "sampled " << opts.points << " points, max relative deviation " << maxdev;
  v.detail = os.str();
  return v;
}

}  // namespace pdmlab
