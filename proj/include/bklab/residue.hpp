#pragma once

// Exact arithmetic in characteristic-p residue fields: F_{p^f} and rational
// function fields F_{p^f}(t1,...,tr) with r <= 2.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bklab/errors.hpp"

namespace bklab {

/// F_{p^f} with elements encoded as integers 0..q-1: the element
/// sum c_i g^i is stored as sum c_i p^i, where g is a root of the shipped
/// irreducible polynomial. All operations are table lookups.
class FiniteField {
 public:
  using Elem = std::uint16_t;

  /// `modulus` is monic of degree f, constant term first.
  FiniteField(int p, int f, std::vector<int> modulus);

  /// Field built from the shipped polynomial table (p in {2,3,5}, f <= 3).
  static std::shared_ptr<const FiniteField> shipped(int p, int f);
  static std::vector<int> shipped_modulus(int p, int f);

  int p() const { return p_; }
  int f() const { return f_; }
  int q() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem from_int(long long n) const;
  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  Elem inv(Elem a) const;
  Elem pow(Elem a, long long n) const;
  Elem frobenius(Elem a) const { return frob_[a]; }
  Elem frobenius_inverse(Elem a) const { return frob_inv_[a]; }

  /// Coordinate j of a in the F_p-basis 1, g, ..., g^{f-1}.
  int digit(Elem a, int j) const;
  Elem from_digits(const std::vector<int>& digits) const;
  /// F_p-basis element g^j.
  Elem basis(int j) const;
  int trace(Elem a) const;
  /// Smallest generator of the multiplicative group.
  Elem primitive_element() const;

  /// Base-p digit string, most significant digit first ("11" is g+1).
  std::string to_string(Elem a) const;

 private:
  int p_, f_, q_;
  std::vector<int> modulus_;
  std::vector<Elem> add_, mul_, neg_, inv_, frob_, frob_inv_;
};

using Fq = FiniteField::Elem;

/// Exponent vector (t1, t2); entries may be negative only inside Laurent
/// coordinate maps, never inside a Poly.
using Monomial = std::array<int, 2>;

/// Graded lexicographic order with t1 < t2.
bool grlex_less(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_less(a, b); }
};

/// Sparse polynomial over F_q in up to two variables. Terms are kept sorted
/// in decreasing grlex order with no zero coefficients.
class Poly {
 public:
  using Term = std::pair<Monomial, Fq>;

  Poly() = default;
  explicit Poly(const FiniteField* field) : field_(field) {}
  static Poly constant(const FiniteField* field, Fq c);
  static Poly monomial(const FiniteField* field, Monomial m, Fq c = 1);
  static Poly variable(const FiniteField* field, int index);

  const FiniteField* field() const { return field_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Term& leading() const { return terms_.front(); }
  int degree_in(int var) const;
  int total_degree() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(Fq c) const;
  Poly shifted(Monomial m) const;
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  /// Coefficient-wise Frobenius composed with t -> t^p.
  Poly frobenius() const;
  Poly derivative(int var) const;
  Poly pow(int n) const;
  /// Scale so the grlex-leading coefficient is 1 (zero stays zero).
  Poly monic() const;

  /// Multivariate division by leading term; returns (quotient, remainder).
  std::pair<Poly, Poly> divmod(const Poly& divisor) const;
  /// Exact quotient; throws math_error when `divisor` does not divide.
  Poly exact_div(const Poly& divisor) const;

  std::string to_string(const std::vector<std::string>& names) const;

  static Poly from_terms(const FiniteField* field, std::vector<Term> terms);

 private:
  const FiniteField* field_ = nullptr;
  std::vector<Term> terms_;
};

/// Monic gcd (grlex) of two polynomials in up to two variables.
Poly gcd(const Poly& a, const Poly& b);

/// Residue field descriptor: F_{p^f}(t1..tr), r in {0,1,2}.
class ResidueField {
 public:
  ResidueField(std::shared_ptr<const FiniteField> constants, int r);
  static std::shared_ptr<const ResidueField> make(int p, int f, int r);

  const FiniteField& constants() const { return *fq_; }
  const FiniteField* constants_ptr() const { return fq_.get(); }
  int p() const { return fq_->p(); }
  int f() const { return fq_->f(); }
  int r() const { return r_; }
  bool is_finite() const { return r_ == 0; }
  const std::vector<std::string>& variable_names() const { return names_; }

 private:
  std::shared_ptr<const FiniteField> fq_;
  int r_;
  std::vector<std::string> names_;
};

using ResidueFieldPtr = std::shared_ptr<const ResidueField>;

/// Element of a residue field, always in canonical lowest terms with a monic
/// denominator; two elements are equal iff their representations are.
class ResidueElement {
 public:
  ResidueElement() = default;
  ResidueElement(ResidueFieldPtr field, Poly num, Poly den);
  static ResidueElement zero(ResidueFieldPtr field);
  static ResidueElement one(ResidueFieldPtr field);
  static ResidueElement constant(ResidueFieldPtr field, Fq c);
  static ResidueElement variable(ResidueFieldPtr field, int index);
  static ResidueElement monomial(ResidueFieldPtr field, Monomial m, Fq c = 1);
  static ResidueElement from_poly(ResidueFieldPtr field, Poly num);

  const ResidueFieldPtr& field() const { return field_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  /// True when the element lies in F_q.
  bool is_constant() const;
  Fq constant_value() const;

  ResidueElement operator+(const ResidueElement& o) const;
  ResidueElement operator-(const ResidueElement& o) const;
  ResidueElement operator-() const;
  ResidueElement operator*(const ResidueElement& o) const;
  ResidueElement operator/(const ResidueElement& o) const;
  ResidueElement inverse() const;
  ResidueElement pow(long long n) const;
  ResidueElement scaled(Fq c) const;
  bool operator==(const ResidueElement& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const ResidueElement& o) const { return !(*this == o); }

  ResidueElement frobenius() const;
  /// y with y^p = x when x is a p-th power in the field, otherwise nullopt.
  std::optional<ResidueElement> pth_root() const;
  ResidueElement derivative(int var) const;

  /// Decomposition x = sum_alpha t^alpha * c_alpha^p over alpha in [0,p)^r.
  /// Keys are alpha; only nonzero components are returned.
  std::map<Monomial, ResidueElement, MonomialLess> p_basis_components() const;

  /// Laurent expansion when the denominator is a monomial; nullopt otherwise.
  std::optional<std::vector<std::pair<Monomial, Fq>>> laurent_terms() const;

  std::string to_string() const;

 private:
  ResidueFieldPtr field_;
  Poly num_, den_;
};

/// Arithmetic operation selector for the uniform `arith` entry point.
enum class ArithOp { add, mul, inv, neg };

/// Uniform arithmetic; `y` is ignored for unary ops. Division by zero throws.
ResidueElement arith(const ResidueElement& x, const ResidueElement& y, ArithOp op);

}  // namespace bklab
