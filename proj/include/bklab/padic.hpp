#pragma once

// Finite extensions K of Q_p given as an unramified base Z_q = Z_p[g]/(h)
// followed by an Eisenstein polynomial E over Z. Elements of O_K are stored
// as sum_{i<e, j<f} c_ij pi^i g^j with c_ij in Z/p^M, i.e. exactly in the
// ring O_K / p^M. PadicElement adds a valuation and a relative precision on
// top of that ring.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bklab/graded.hpp"
#include "bklab/residue.hpp"

namespace bklab {

struct LocalFieldDescriptor {
  std::string name;
  int p = 2;
  int f = 1;
  /// Monic, constant term first; must be the shipped residue polynomial.
  std::vector<int> unramified_poly;
  /// Monic Eisenstein polynomial over Z, constant term first.
  std::vector<long long> eisenstein_poly;
  /// Working precision in powers of pi; 0 selects 3e + ceil(e') + 2.
  int precision = 0;

  int e() const { return static_cast<int>(eisenstein_poly.size()) - 1; }

  std::string to_json() const;
  static LocalFieldDescriptor from_json(const std::string& text);
  static LocalFieldDescriptor load(const std::string& path);
};

/// Descriptors shipped with the library, in menu order.
const std::vector<LocalFieldDescriptor>& shipped_descriptors();
/// Menu entry by name, or a descriptor file path.
LocalFieldDescriptor resolve_descriptor(const std::string& name_or_path);

/// Element of O_K / p^M.
struct Raw {
  static constexpr int kCapacity = 8;
  std::array<std::int64_t, kCapacity> c{};
  bool operator==(const Raw& o) const { return c == o.c; }
};

class LocalField;
using LocalFieldPtr = std::shared_ptr<const LocalField>;

class LocalField {
 public:
  static LocalFieldPtr make(const LocalFieldDescriptor& d);
  static LocalFieldPtr make(const std::string& name_or_path) { return make(resolve_descriptor(name_or_path)); }
  /// Same field at another working precision.
  LocalFieldPtr with_precision(int precision) const;

  const LocalFieldDescriptor& descriptor() const { return desc_; }
  const std::string& name() const { return desc_.name; }
  int p() const { return p_; }
  int f() const { return f_; }
  int e() const { return e_; }
  int q() const { return residue_->q(); }
  /// Working precision in powers of pi.
  int precision() const { return N_; }
  /// Storage depth: coefficients live in Z/p^M, so the ring is O_K / pi^{eM}.
  int storage_digits() const { return M_; }
  std::int64_t modulus() const { return P_; }
  Rational eprime() const { return ramification().eprime(); }
  bool eprime_integral() const { return eprime().is_integer(); }
  /// e' as an integer; throws math_error when it is not one.
  int eprime_int() const;
  /// Residue class of p / pi^e.
  Fq a() const { return a_; }
  Ramification ramification() const { return {p_, e_, a_}; }

  const FiniteField& residue_field() const { return *residue_; }
  /// The residue field as a (zero-variable) ResidueField for form computations.
  const ResidueFieldPtr& residue_ring() const { return residue_ring_; }

  // Ring arithmetic in O_K / p^M.
  int dim() const { return e_ * f_; }
  Raw zero() const { return {}; }
  Raw one() const { return from_int(1); }
  Raw from_int(long long n) const;
  /// pi^k, k >= 0.
  Raw pi_power(int k) const;
  /// Naive lift of a residue: the element sum d_j g^j with digits d_j.
  Raw naive_lift(Fq x) const;
  Raw teichmuller(Fq x) const { return teich_[x]; }

  Raw add(const Raw& x, const Raw& y) const;
  Raw sub(const Raw& x, const Raw& y) const;
  Raw neg(const Raw& x) const;
  Raw mul(const Raw& x, const Raw& y) const;
  Raw scale(const Raw& x, std::int64_t n) const;
  Raw pow(const Raw& x, long long n) const;
  Raw mul_pi(const Raw& x, int k = 1) const;
  /// x / pi for x in pi O_K; the top p-adic digit of the result is unknown.
  Raw div_pi(const Raw& x) const;
  /// x / pi^k after reduction mod pi^known; throws math_error when v(x) < k.
  Raw div_pi_power(const Raw& x, int k, int known) const;
  /// Inverse of a unit (exact in O_K / p^M); throws math_error on non-units.
  Raw inverse(const Raw& x) const;

  /// Canonical representative of x mod pi^r.
  Raw reduce(const Raw& x, int r) const;
  bool equal_mod(const Raw& x, const Raw& y, int r) const;
  /// min(v(x), cap).
  int valuation(const Raw& x, int cap) const;
  /// Residue class of x (the constant part mod p).
  Fq residue(const Raw& x) const;
  /// Residue of x / pi^t for x in pi^t O_K.
  Fq leading_residue(const Raw& x, int t) const;
  /// Level of a unit: largest m <= cap with x = 1 mod pi^m (0 when x is not 1 mod pi).
  int unit_level(const Raw& x, int cap) const;

  std::string raw_to_string(const Raw& x, int precision) const;

 private:
  explicit LocalField(const LocalFieldDescriptor& d);

  LocalFieldDescriptor desc_;
  int p_, f_, e_, N_, M_;
  std::int64_t P_;
  std::vector<std::int64_t> h_;  // unramified polynomial, low coefficients
  std::vector<std::int64_t> E_;  // Eisenstein polynomial, low coefficients
  std::vector<std::int64_t> p_power_;
  Raw p_over_pi_;
  Fq a_ = 1;
  std::shared_ptr<const FiniteField> residue_;
  ResidueFieldPtr residue_ring_;
  std::vector<Raw> teich_;
};

/// Element pi^v * u of K with u a unit known modulo pi^rel, or a zero marker
/// known modulo pi^v.
class PadicElement {
 public:
  PadicElement() = default;

  static PadicElement zero(LocalFieldPtr field, int absolute_precision);
  static PadicElement one(LocalFieldPtr field) { return from_int(std::move(field), 1); }
  static PadicElement from_int(LocalFieldPtr field, long long n);
  static PadicElement pi(LocalFieldPtr field);
  /// Teichmueller representative of a residue.
  static PadicElement lift(LocalFieldPtr field, Fq x);
  static PadicElement lift(LocalFieldPtr field, const ResidueElement& x);
  /// Element of O_K given in the ring, known modulo pi^absolute_precision.
  static PadicElement from_raw(LocalFieldPtr field, const Raw& x, int absolute_precision);
  /// pi^v * u for a unit u known modulo pi^relative_precision.
  static PadicElement from_unit(LocalFieldPtr field, int v, const Raw& u, int relative_precision);

  const LocalFieldPtr& field() const { return field_; }
  bool is_zero() const { return zero_; }
  /// Throws precision_error on a zero marker.
  int valuation() const;
  int absolute_precision() const { return zero_ ? v_ : v_ + rel_; }
  int relative_precision() const { return zero_ ? 0 : rel_; }
  const Raw& unit() const { return u_; }
  /// Requires v >= 0; throws math_error otherwise.
  Fq residue() const;
  /// Element of O_K as a ring element (requires v >= 0).
  Raw to_raw() const;

  PadicElement operator+(const PadicElement& o) const;
  PadicElement operator-(const PadicElement& o) const;
  PadicElement operator-() const;
  PadicElement operator*(const PadicElement& o) const;
  PadicElement operator/(const PadicElement& o) const;
  PadicElement inverse() const;
  PadicElement pow(long long n) const;
  /// Equal at the common precision.
  bool operator==(const PadicElement& o) const { return (*this - o).is_zero(); }
  bool operator!=(const PadicElement& o) const { return !(*this == o); }

  /// Teichmueller digits d_v, d_{v+1}, ... with x = sum lift(d_k) pi^k, up to the precision.
  std::vector<Fq> digits() const;
  std::string to_string() const;

 private:
  LocalFieldPtr field_;
  bool zero_ = true;
  int v_ = 0;
  Raw u_{};
  int rel_ = 0;
};

/// Parses integers, `pi`, `u(d)` (Teichmueller lift of the residue with digit
/// string d), sums, differences, products, quotients, powers and parentheses.
PadicElement parse_element(const LocalFieldPtr& field, const std::string& text);

/// Largest m <= precision with u = 1 mod pi^m; 0 when the residue of u is not 1.
int unit_filtration_level(const PadicElement& u);

struct UnitFactor {
  int level;
  Fq residue;
  bool operator==(const UnitFactor& o) const { return level == o.level && residue == o.residue; }
};

/// u = lift(residue u) * prod (1 + pi^m lift(x_m)) (1 + O(pi^N)).
std::vector<UnitFactor> principal_unit_decomposition(const PadicElement& u);
std::vector<UnitFactor> principal_unit_decomposition(const LocalField& field, const Raw& u);
/// 1 + pi^m lift(x) in the ring.
Raw unit_factor(const LocalField& field, int m, Fq x);

Fq eprime_constant_a(const LocalField& field);
std::optional<PadicElement> zeta_p(const LocalFieldPtr& field);
/// Residue of (1 - zeta_p)^p / pi^{e'}.
Fq step4_multiplier(const LocalFieldPtr& field);

/// p-th root of x in K, or none. Works for any nonzero x; the root carries
/// e fewer digits of precision than x.
std::optional<PadicElement> pth_root(const PadicElement& x);
/// Ring version for units known modulo pi^N: y with y^p = u mod pi^N.
std::optional<Raw> pth_root_unit(const LocalField& field, const Raw& u);
/// p-th root of a unit of level m; must succeed for m > e'.
std::optional<PadicElement> pth_power_test(const PadicElement& u, int m);

/// Random principal unit of level >= m with uniform coefficients below precision.
PadicElement random_principal_unit(const LocalFieldPtr& field, int m, std::mt19937_64& rng);
/// Random element of O_K / pi^N.
Raw random_raw(const LocalField& field, std::mt19937_64& rng);

}  // namespace bklab
