#include "pdmlab/symexpr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace pdmlab {

namespace {

const char* const kFuncNames[] = {"J", "J1", "J2", "J3", "eps", "psi"};

ScalarExpr make(ExprKind k) { return std::make_shared<ExprNode>(k); }

Rational rational_ipow(const Rational& base, long long e) {
  if (e == 0) return Rational(1);
  bool invert = e < 0;
  unsigned long long n = invert ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
  Rational acc(1), b = base;
  while (n) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (invert) {
    if (acc == 0) throw eval_error("zero raised to a negative power");
    acc = Rational(1) / acc;
  }
  return acc;
}

}  // namespace

bool is_function_symbol_name(const std::string& name) {
  for (const char* n : kFuncNames)
    if (name == n) return true;
  return false;
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

ScalarExpr num(Rational v) {
  auto n = std::make_shared<ExprNode>(ExprKind::number);
  n->value = std::move(v);
  return n;
}

ScalarExpr num(long long v) { return num(Rational(v)); }

ScalarExpr num(long long numer, long long denom) { return num(Rational(numer, denom)); }

ScalarExpr coord() {
  static const ScalarExpr x = make(ExprKind::coord);
  return x;
}

ScalarExpr param(const std::string& name) {
  auto n = std::make_shared<ExprNode>(ExprKind::param);
  n->name = name;
  return n;
}

ScalarExpr func(const std::string& name, int order) {
  if (!is_function_symbol_name(name))
    throw error("unknown function symbol '" + name + "'");
  if (order < 0) throw error("negative derivative order");
  auto n = std::make_shared<ExprNode>(ExprKind::func);
  n->name = name;
  n->order = order;
  return n;
}

ScalarExpr sum_of(std::vector<ScalarExpr> terms) {
  std::vector<ScalarExpr> kids;
  Rational constant(0);
  for (auto& t : terms) {
    if (t->kind == ExprKind::sum) {
      for (const auto& k : t->kids) {
        if (is_number(k))
          constant += k->value;
        else
          kids.push_back(k);
      }
    } else if (is_number(t)) {
      constant += t->value;
    } else {
      kids.push_back(std::move(t));
    }
  }
  if (constant != 0 || kids.empty()) kids.push_back(num(constant));
  if (kids.size() == 1) return kids[0];
  auto n = make(ExprKind::sum);
  const_cast<ExprNode&>(*n).kids = std::move(kids);
  return n;
}

ScalarExpr product_of(std::vector<ScalarExpr> factors) {
  std::vector<ScalarExpr> kids;
  Rational constant(1);
  for (auto& f : factors) {
    if (f->kind == ExprKind::product) {
      for (const auto& k : f->kids) {
        if (is_number(k))
          constant *= k->value;
        else
          kids.push_back(k);
      }
    } else if (is_number(f)) {
      constant *= f->value;
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (constant == 0) return num(0);
  if (kids.empty()) return num(constant);
  if (constant != 1) kids.insert(kids.begin(), num(constant));
  if (kids.size() == 1) return kids[0];
  auto n = make(ExprKind::product);
  const_cast<ExprNode&>(*n).kids = std::move(kids);
  return n;
}

ScalarExpr add(const ScalarExpr& a, const ScalarExpr& b) { return sum_of({a, b}); }

ScalarExpr sub(const ScalarExpr& a, const ScalarExpr& b) { return sum_of({a, neg(b)}); }

ScalarExpr neg(const ScalarExpr& a) {
  if (is_number(a)) return num(-a->value);
  return product_of({num(-1), a});
}

ScalarExpr mul(const ScalarExpr& a, const ScalarExpr& b) { return product_of({a, b}); }

ScalarExpr div(const ScalarExpr& a, const ScalarExpr& b) {
  return product_of({a, pow_of(b, num(-1))});
}

ScalarExpr pow_of(const ScalarExpr& base, const ScalarExpr& exponent) {
  if (is_number(exponent)) {
    const Rational& e = exponent->value;
    if (e == 0) return num(1);
    if (e == 1) return base;
    if (is_number(base) && is_integer(e) && (base->value != 0 || e > 0)) {
      // small exponents only; anything larger stays symbolic
      if (numerator(e) <= 1024 && numerator(e) >= -1024)
        return num(rational_ipow(base->value, numerator(e).convert_to<long long>()));
    }
  }
  auto n = make(ExprKind::power);
  const_cast<ExprNode&>(*n).kids = {base, exponent};
  return n;
}

ScalarExpr ipow(const ScalarExpr& base, long long exponent) {
  return pow_of(base, num(exponent));
}

ScalarExpr elem_call(ElemFn fn, const ScalarExpr& arg) {
  auto n = make(ExprKind::call);
  const_cast<ExprNode&>(*n).elem = fn;
  const_cast<ExprNode&>(*n).kids = {arg};
  return n;
}

ScalarExpr sin_of(const ScalarExpr& a) { return elem_call(ElemFn::sin, a); }
ScalarExpr cos_of(const ScalarExpr& a) { return elem_call(ElemFn::cos, a); }
ScalarExpr exp_of(const ScalarExpr& a) { return elem_call(ElemFn::exp, a); }

bool depends_on_coord(const ScalarExpr& e) {
  switch (e->kind) {
    case ExprKind::coord:
    case ExprKind::func:
      return true;
    case ExprKind::number:
    case ExprKind::param:
      return false;
    default:
      for (const auto& k : e->kids)
        if (depends_on_coord(k)) return true;
      return false;
  }
}

ScalarExpr differentiate(const ScalarExpr& e) {
  switch (e->kind) {
    case ExprKind::number:
    case ExprKind::param:
      return num(0);
    case ExprKind::coord:
      return num(1);
    case ExprKind::func:
      return func(e->name, e->order + 1);
    case ExprKind::sum: {
      std::vector<ScalarExpr> terms;
      terms.reserve(e->kids.size());
      for (const auto& k : e->kids) terms.push_back(differentiate(k));
      return sum_of(std::move(terms));
    }
    case ExprKind::product: {
      std::vector<ScalarExpr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        std::vector<ScalarExpr> factors = e->kids;
        factors[i] = differentiate(e->kids[i]);
        terms.push_back(product_of(std::move(factors)));
      }
      return sum_of(std::move(terms));
    }
    case ExprKind::power: {
      const ScalarExpr& base = e->kids[0];
      const ScalarExpr& expo = e->kids[1];
      if (depends_on_coord(expo))
        throw eval_error("cannot differentiate a power with x-dependent exponent: " +
                         to_string(e));
      // d/dx b^e = e * b^(e-1) * b'
      return product_of({expo, pow_of(base, sub(expo, num(1))), differentiate(base)});
    }
    case ExprKind::call: {
      const ScalarExpr& arg = e->kids[0];
      ScalarExpr outer;
      switch (e->elem) {
        case ElemFn::sin: outer = cos_of(arg); break;
        case ElemFn::cos: outer = neg(sin_of(arg)); break;
        case ElemFn::exp: outer = exp_of(arg); break;
      }
      return mul(outer, differentiate(arg));
    }
  }
  throw error("unreachable expression kind");
}

ScalarExpr differentiate(const ScalarExpr& e, int times) {
  ScalarExpr r = e;
  for (int i = 0; i < times; ++i) r = differentiate(r);
  return r;
}

ProfileBinding::ProfileBinding(const ProfileBinding& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  funcs_ = other.funcs_;
  params_ = other.params_;
  dcache_ = other.dcache_;
}

ProfileBinding& ProfileBinding::operator=(const ProfileBinding& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  funcs_ = other.funcs_;
  params_ = other.params_;
  dcache_ = other.dcache_;
  return *this;
}

namespace {
bool contains_func_symbol(const ScalarExpr& e) {
  if (e->kind == ExprKind::func) return true;
  for (const auto& k : e->kids)
    if (contains_func_symbol(k)) return true;
  return false;
}
}  // namespace

void ProfileBinding::bind_function(const std::string& name, ScalarExpr closed_form) {
  if (contains_func_symbol(closed_form))
    throw error("profile for '" + name + "' must be a closed form (contains function symbols)");
  std::lock_guard<std::mutex> lock(mu_);
  funcs_[name] = std::move(closed_form);
  for (auto it = dcache_.begin(); it != dcache_.end();)
    it = it->first.first == name ? dcache_.erase(it) : std::next(it);
}

void ProfileBinding::bind_param(const std::string& name, double value) {
  std::lock_guard<std::mutex> lock(mu_);
  params_[name] = value;
}

bool ProfileBinding::has_function(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  return funcs_.count(name) != 0;
}

bool ProfileBinding::has_param(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  return params_.count(name) != 0;
}

std::optional<double> ProfileBinding::param(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = params_.find(name);
  if (it == params_.end()) return std::nullopt;
  return it->second;
}

ScalarExpr ProfileBinding::derivative(const std::string& name, int order) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto fit = funcs_.find(name);
  if (fit == funcs_.end()) throw eval_error("unbound function symbol '" + name + "'");
  auto key = std::make_pair(name, order);
  auto cit = dcache_.find(key);
  if (cit != dcache_.end()) return cit->second;
  ScalarExpr d = fit->second;
  for (int i = 0; i < order; ++i) d = differentiate(d);
  dcache_[key] = d;
  return d;
}

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSingular = 1e-300;

double eval_node(const ScalarExpr& e, const ProfileBinding& b, double x) {
  switch (e->kind) {
    case ExprKind::number:
      return e->value.convert_to<double>();
    case ExprKind::coord:
      return x;
    case ExprKind::param: {
      if (e->name == "pi") return kPi;
      auto v = b.param(e->name);
      if (!v) throw eval_error("unbound parameter '" + e->name + "'");
      return *v;
    }
    case ExprKind::func:
      return eval_node(b.derivative(e->name, e->order), b, x);
    case ExprKind::sum: {
      double s = 0;
      for (const auto& k : e->kids) s += eval_node(k, b, x);
      return s;
    }
    case ExprKind::product: {
      double p = 1;
      for (const auto& k : e->kids) p *= eval_node(k, b, x);
      return p;
    }
    case ExprKind::power: {
      double base = eval_node(e->kids[0], b, x);
      const ScalarExpr& expo = e->kids[1];
      double ev = eval_node(expo, b, x);
      double rounded = std::nearbyint(ev);
      if (ev == rounded && std::abs(ev) <= 1e6) {
        long long n = static_cast<long long>(rounded);
        bool invert = n < 0;
        unsigned long long m = invert ? static_cast<unsigned long long>(-n)
                                      : static_cast<unsigned long long>(n);
        double acc = 1, bb = base;
        while (m) {
          if (m & 1) acc *= bb;
          bb *= bb;
          m >>= 1;
        }
        if (invert) {
          if (std::abs(acc) < kSingular)
            throw eval_error("singular evaluation: divisor magnitude below 1e-300 in " +
                             to_string(e));
          return 1.0 / acc;
        }
        return acc;
      }
      if (base < 0)
        throw eval_error("non-integer power of a negative base in " + to_string(e));
      if (base == 0 && ev < 0)
        throw eval_error("singular evaluation: zero base with negative exponent");
      return std::pow(base, ev);
    }
    case ExprKind::call: {
      double a = eval_node(e->kids[0], b, x);
      switch (e->elem) {
        case ElemFn::sin: return std::sin(a);
        case ElemFn::cos: return std::cos(a);
        case ElemFn::exp: return std::exp(a);
      }
    }
  }
  throw error("unreachable expression kind");
}
}  // namespace

double eval(const ScalarExpr& e, const ProfileBinding& binding, double x) {
  return eval_node(e, binding, x);
}

double eval(const ScalarExpr& e, double x) {
  static const ProfileBinding empty;
  return eval_node(e, empty, x);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Type { number, ident, op, lparen, rparen, end } type;
  std::string text;
  int primes = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    Token t;
    t.pos = i_;
    if (i_ >= s_.size()) {
      t.type = Token::end;
      return t;
    }
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
      t.type = Token::number;
      std::size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (i_ < s_.size() && s_[i_] == '.') {
        ++i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      }
      if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
        std::size_t j = i_ + 1;
        if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
        if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
          ++j;
          while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
          i_ = j;
        }
      }
      t.text = s_.substr(start, i_ - start);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.type = Token::ident;
      std::size_t start = i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
      t.text = s_.substr(start, i_ - start);
      while (i_ < s_.size() && s_[i_] == '\'') {
        ++t.primes;
        ++i_;
      }
      return t;
    }
    if (c == '(') {
      t.type = Token::lparen;
      ++i_;
      return t;
    }
    if (c == ')') {
      t.type = Token::rparen;
      ++i_;
      return t;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      t.type = Token::op;
      t.text = std::string(1, c);
      ++i_;
      return t;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", i_);
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
};

// Exact rational from a decimal literal like "0.25" or "1.5e-3".
Rational rational_from_decimal(const std::string& text, std::size_t pos) {
  std::string digits;
  long long exp10 = 0;
  std::size_t i = 0;
  bool seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (seen_dot) --exp10;
    } else if (c == '.') {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exp10 += std::strtoll(text.c_str() + i + 1, nullptr, 10);
      break;
    } else {
      throw parse_error("bad numeric literal '" + text + "'", pos);
    }
  }
  if (digits.empty()) throw parse_error("bad numeric literal '" + text + "'", pos);
  Rational r{boost::multiprecision::cpp_int(digits)};
  Rational ten(10);
  if (exp10 > 0)
    for (long long k = 0; k < exp10; ++k) r *= ten;
  else
    for (long long k = 0; k < -exp10; ++k) r /= ten;
  return r;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  ScalarExpr parse() {
    ScalarExpr e = parse_sum();
    if (cur_.type != Token::end)
      throw parse_error("trailing input after expression", cur_.pos);
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool accept_op(const char* o) {
    if (cur_.type == Token::op && cur_.text == o) {
      advance();
      return true;
    }
    return false;
  }

  ScalarExpr parse_sum() {
    ScalarExpr e = parse_term();
    for (;;) {
      if (accept_op("+"))
        e = add(e, parse_term());
      else if (accept_op("-"))
        e = sub(e, parse_term());
      else
        return e;
    }
  }

  ScalarExpr parse_term() {
    ScalarExpr e = parse_unary();
    for (;;) {
      if (accept_op("*"))
        e = mul(e, parse_unary());
      else if (accept_op("/"))
        e = div(e, parse_unary());
      else
        return e;
    }
  }

  ScalarExpr parse_unary() {
    if (accept_op("-")) return neg(parse_unary());
    if (accept_op("+")) return parse_unary();
    return parse_power();
  }

  ScalarExpr parse_power() {
    ScalarExpr base = parse_atom();
    if (accept_op("^")) return pow_of(base, parse_unary());
    return base;
  }

  ScalarExpr parse_atom() {
    if (cur_.type == Token::number) {
      Rational r = rational_from_decimal(cur_.text, cur_.pos);
      advance();
      return num(std::move(r));
    }
    if (cur_.type == Token::lparen) {
      advance();
      ScalarExpr e = parse_sum();
      if (cur_.type != Token::rparen) throw parse_error("expected ')'", cur_.pos);
      advance();
      return e;
    }
    if (cur_.type == Token::ident) {
      Token t = cur_;
      advance();
      if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
        if (t.primes > 0)
          throw parse_error("prime suffix on elementary function '" + t.text + "'", t.pos);
        if (cur_.type != Token::lparen)
          throw parse_error("expected '(' after '" + t.text + "'", t.pos);
        advance();
        ScalarExpr arg = parse_sum();
        if (cur_.type != Token::rparen) throw parse_error("expected ')'", cur_.pos);
        advance();
        ElemFn fn = t.text == "sin" ? ElemFn::sin : t.text == "cos" ? ElemFn::cos : ElemFn::exp;
        return elem_call(fn, arg);
      }
      if (is_function_symbol_name(t.text)) return func(t.text, t.primes);
      if (t.primes > 0)
        throw parse_error("'" + t.text + "' is not a function symbol but carries primes", t.pos);
      if (t.text == "x") return coord();
      return param(t.text);  // unknown identifiers default to parameters
    }
    throw parse_error("expected a number, identifier or '('", cur_.pos);
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace

ScalarExpr parse_expr(const std::string& text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels used only for parenthesization.
enum { kSumLvl = 10, kNegLvl = 15, kProdLvl = 20, kPowLvl = 30, kAtomLvl = 40 };

int print_level(const ScalarExpr& e) {
  switch (e->kind) {
    case ExprKind::number:
      if (e->value < 0) return kNegLvl;
      return is_integer(e->value) ? kAtomLvl : kProdLvl;
    case ExprKind::sum: return kSumLvl;
    case ExprKind::product: return kProdLvl;
    case ExprKind::power: return kPowLvl;
    default: return kAtomLvl;
  }
}

void print_into(const ScalarExpr& e, std::ostringstream& out, int min_level);

void print_wrapped(const ScalarExpr& e, std::ostringstream& out, int min_level) {
  if (print_level(e) < min_level) {
    out << '(';
    print_into(e, out, 0);
    out << ')';
  } else {
    print_into(e, out, 0);
  }
}

// Splits off a leading rational sign for prettier sums.
bool term_is_negative(const ScalarExpr& e) {
  if (is_number(e)) return e->value < 0;
  if (e->kind == ExprKind::product && !e->kids.empty() && is_number(e->kids[0]))
    return e->kids[0]->value < 0;
  return false;
}

ScalarExpr term_negated(const ScalarExpr& e) {
  if (is_number(e)) return num(-e->value);
  std::vector<ScalarExpr> kids = e->kids;
  kids[0] = num(-kids[0]->value);
  return product_of(std::move(kids));
}

void print_into(const ScalarExpr& e, std::ostringstream& out, int min_level) {
  switch (e->kind) {
    case ExprKind::number:
      out << to_string(e->value);
      return;
    case ExprKind::coord:
      out << 'x';
      return;
    case ExprKind::param:
      out << e->name;
      return;
    case ExprKind::func:
      out << e->name << std::string(static_cast<std::size_t>(e->order), '\'');
      return;
    case ExprKind::sum: {
      print_wrapped(e->kids[0], out, kSumLvl);
      for (std::size_t i = 1; i < e->kids.size(); ++i) {
        if (term_is_negative(e->kids[i])) {
          out << " - ";
          print_wrapped(term_negated(e->kids[i]), out, kSumLvl + 1);
        } else {
          out << " + ";
          print_wrapped(e->kids[i], out, kSumLvl + 1);
        }
      }
      return;
    }
    case ExprKind::product: {
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out << '*';
        print_wrapped(e->kids[i], out, kProdLvl + 1);
      }
      return;
    }
    case ExprKind::power: {
      print_wrapped(e->kids[0], out, kPowLvl + 1);
      out << '^';
      print_wrapped(e->kids[1], out, kPowLvl + 1);
      return;
    }
    case ExprKind::call: {
      out << (e->elem == ElemFn::sin ? "sin" : e->elem == ElemFn::cos ? "cos" : "exp") << '(';
      print_into(e->kids[0], out, 0);
      out << ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << numerator(r);
  if (denominator(r) != 1) out << '/' << denominator(r);
  return out.str();
}

std::string to_string(const ScalarExpr& e) {
  std::ostringstream out;
  print_into(e, out, 0);
  return out.str();
}

}  // namespace pdmlab
