#ifndef PDMLAB_ERRORS_HPP
#define PDMLAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdmlab {

// Root of every exception thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expression text could not be tokenized or parsed; `position` is a
// zero-based byte offset into the input.
struct parse_error : error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Numeric evaluation failed: unbound symbol, division by (near-)zero,
// or a power that leaves the reals.
struct eval_error : error {
  using error::error;
};

// Canonicalization was asked for an expression outside the polynomial
// fragment (contains the coordinate or an elementary call).
struct fragment_error : error {
  using error::error;
};

// Equality could not be decided: neither side canonicalizes and no
// binding was supplied for numeric sampling.
struct undecidable_error : error {
  using error::error;
};

// Chain or grid construction violated a precondition (J sign change,
// non-finite entry, bad geometry).
struct build_error : error {
  using error::error;
};

// Eigensolver failure: out-of-range request or non-convergence.
struct solver_error : error {
  using error::error;
};

// Config file rejected: unknown/missing keys or invalid values.
struct config_error : error {
  using error::error;
};

}  // namespace pdmlab

#endif
