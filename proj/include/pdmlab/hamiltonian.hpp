#ifndef PDMLAB_HAMILTONIAN_HPP
#define PDMLAB_HAMILTONIAN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pdmlab/diffop.hpp"

namespace pdmlab {

// Ordering exponents (alpha, gamma); beta is always derived as
// 1 - alpha - gamma so the constraint cannot be violated.
struct OrderingParams {
  ScalarExpr alpha;
  ScalarExpr gamma;

  ScalarExpr beta() const { return sub(num(1), add(alpha, gamma)); }

  static OrderingParams symbolic() { return {param("alpha"), param("gamma")}; }
  static OrderingParams numeric(const Rational& a, const Rational& g) {
    return {num(a), num(g)};
  }
};

// Factorization (J1, J2, J3); the product *defines* J for every formula
// consuming the triple, so the factorization constraint holds by
// construction.
struct FactorTriple {
  ScalarExpr j1;
  ScalarExpr j2;
  ScalarExpr j3;

  ScalarExpr product() const { return product_of({j1, j2, j3}); }

  static FactorTriple abstract_symbols() {
    return {func("J1", 0), func("J2", 0), func("J3", 0)};
  }
  // Specialization J1 = J^alpha, J2 = J^beta, J3 = J^gamma.
  static FactorTriple powers_of_j(const OrderingParams& p);
};

// Position assigned to the hopping integral J_i when promoting it to a
// function of x: the left site, the right site, or the bond midpoint.
enum class SiteConvention { left, right, midpoint };
std::string to_string(SiteConvention c);

// Scalar part of the hermitian-form Hamiltonian:
//   (a^2/2) J'' - a J' + 2 J + eps
// with J standing for the given expression and derivatives expanded.
ScalarExpr effective_potential_with(const ScalarExpr& j, const ScalarExpr& eps,
                                    const ScalarExpr& a);

// a^2 (D J D) + Mul((a^2/2) J'' - a J' + 2 J + eps) in normal form.
LinDiffOp effective_hamiltonian_with(const ScalarExpr& j, const ScalarExpr& eps,
                                     const ScalarExpr& a);
LinDiffOp effective_hamiltonian(const ScalarExpr& a);

// (a^2/2) [J^alpha D J^beta D J^gamma + J^gamma D J^beta D J^alpha] in
// normal form; for symbolic alpha, gamma the coefficients come out as
// polynomials in the exponents over J-derivative monomials.
LinDiffOp vonroos_kinetic(const OrderingParams& p, const ScalarExpr& a);

// (a^2/2)(1 - alpha - gamma) J'' + a^2 alpha gamma (J')^2/J - a J' + 2 J + eps.
ScalarExpr vonroos_potential(const OrderingParams& p, const ScalarExpr& a);

// (a^2/2) [J1 D J2 D J3 + J3 D J2 D J1] in normal form.
LinDiffOp general_kinetic(const FactorTriple& t, const ScalarExpr& a);

// (a^2/2) J'' - a J' + 2 J + eps - (a^2/2)[J1 (J2 J3')' + J3 (J2 J1')']
// with J expanded as J1 J2 J3.
ScalarExpr general_potential(const FactorTriple& t, const ScalarExpr& a);

// Mechanical continuum limit of the site recurrence
//   J_i c_{i+1} + J_{i-1} c_{i-1} + eps_i c_i
// with second-order Taylor expansions substituted at the convention's
// positions, collected by psi-derivative order, truncated past a^2.
struct RecurrenceReport {
  SiteConvention convention = SiteConvention::left;
  LinDiffOp op;
  ScalarExpr first_order_term;  // the a^1 component of the scalar term
  std::string truncation_note;
};
RecurrenceReport expand_recurrence(SiteConvention c, const ScalarExpr& a);

// Outcome of one symbolic identity check, coefficient by coefficient.
struct ProofReport {
  std::string name;
  bool equal = false;
  std::vector<OpCoeffCheck> coefficients;
  std::string summary;
};

// T(alpha,beta,gamma) + U(alpha,beta,gamma) == H_eff, decided exactly in
// the polynomial algebra (works for symbolic and for rational exponents).
ProofReport verify_vonroos_invariance(const OrderingParams& p, const ScalarExpr& a);

// T_G + U_G == H_eff under J = J1 J2 J3, decided exactly.
ProofReport verify_general_invariance(const FactorTriple& t, const ScalarExpr& a);

// Independent numeric cross-check: canonicalizes each operator's
// coefficients separately, evaluates both at `points` seeded-random
// coordinates in [lo, hi] under the binding, and returns the largest
// relative deviation seen.
double numeric_spot_check(const LinDiffOp& a, const LinDiffOp& b,
                          const ProfileBinding& binding, int points, double lo, double hi,
                          std::uint64_t seed);

// Checks that op == scale*(J D^2 + J' D) + Mul(s) and returns s in
// canonicalized form; this is the divergence-plus-scalar decomposition
// the discretizer consumes. Throws build_error when the divergence
// structure is violated.
ScalarExpr divergence_scalar_part(const LinDiffOp& op, const ScalarExpr& scale);

}  // namespace pdmlab

#endif
