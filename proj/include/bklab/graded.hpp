#pragma once

// Graded models G_m^q of the unit filtration on mod-p Milnor K-groups, built
// from differential forms of the residue field, and the pairing
//   phi_m : G_m^q x G_{e'-m}^{r+2-q} -> Omega^r / d Omega^{r-1}.

#include <optional>
#include <string>
#include <vector>

#include "bklab/forms.hpp"

namespace bklab {

/// Exact rational number with positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  bool is_integer() const { return num % den == 0; }
  long long floor() const;
  long long ceil() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator<(long long m, const Rational& r) { return m * r.den < r.num; }
  friend bool operator>(long long m, const Rational& r) { return m * r.den > r.num; }
  friend bool operator==(long long m, const Rational& r) { return m * r.den == r.num; }
};

/// Ramification data of the ambient local field: e = v(p) and the residue a
/// of p * pi^{-e}. e' = p e / (p - 1).
struct Ramification {
  int p = 2;
  int e = 1;
  Fq a = 1;

  Rational eprime() const;
};

enum class Regime { zero_level, prime_to_p, divisible_by_p, at_eprime, above_eprime };
const char* to_string(Regime r);

/// Subspace a summand is divided by.
enum class Quotient { none, exact, closed, twisted_closed, everything };

class GradedModel {
 public:
  GradedModel(int q, int m, ResidueFieldPtr field, Ramification ram);
  /// G_{e'}^q; throws math_error when e' is not an integer.
  static GradedModel at_eprime(int q, ResidueFieldPtr field, Ramification ram);

  int q() const { return q_; }
  int m() const { return m_; }
  Regime regime() const { return regime_; }
  const ResidueFieldPtr& field() const { return field_; }
  const Ramification& ramification() const { return ram_; }

  /// Form degree of summand 0 or 1; negative degrees denote the zero space.
  int summand_degree(int summand) const;
  Quotient summand_quotient(int summand) const;
  /// Whether the summand can carry a nonzero class at all.
  bool summand_present(int summand) const;

  /// Membership of w in the subspace that summand `summand` is divided by.
  /// The (1 + aC) Z_1 case is decided inside `window`.
  bool in_quotient_subspace(const DifferentialForm& w, int summand, const TruncationWindow& window) const;

  /// F_p-dimension of the model restricted to `window` (exact for finite k).
  std::size_t window_dimension(const TruncationWindow& window) const;

  std::string describe() const;

 private:
  int q_, m_;
  ResidueFieldPtr field_;
  Ramification ram_;
  Regime regime_;
};

/// Element of a graded model given by representatives of both summands.
/// In the zero-level regime the summands are nu_q and nu_{q-1} classes.
struct GradedClass {
  DifferentialForm first;
  DifferentialForm second;

  static GradedClass zero(const GradedModel& model);
  static GradedClass of(const GradedModel& model, DifferentialForm first,
                        std::optional<DifferentialForm> second = std::nullopt);
};

/// Equality in the model, decided modulo its quotient subspace on `window`.
bool graded_class_eq(const GradedModel& model, const GradedClass& a, const GradedClass& b, const TruncationWindow& window);
bool graded_class_is_zero(const GradedModel& model, const GradedClass& a, const TruncationWindow& window);

/// Representative in Omega^r of phi_m(u, v); compare with equal_mod_exact.
/// `swapped` evaluates the wedge products in the opposite order.
DifferentialForm phi_m(const GradedModel& left, const GradedClass& u, const GradedModel& right, const GradedClass& v,
                       bool swapped = false);

/// Readout of a class in Omega^r / d Omega^{r-1}: the coordinates of C(w) in
/// the logarithmic generator. Zero exactly on exact forms.
SparseVec pairing_readout(const DifferentialForm& w);

struct PairingReport {
  std::size_t left_dim = 0;
  std::size_t right_dim = 0;
  /// Rank of the left window's image in Hom(right window, readout space).
  std::size_t rank = 0;
  std::size_t kernel_dim = 0;
  /// Left vectors pairing to zero against the whole right window that are
  /// nonzero in the model.
  std::vector<GradedClass> degenerate;
  bool nondegenerate() const { return degenerate.empty(); }
};

PairingReport pairing_rank(const GradedModel& left, const std::vector<GradedClass>& left_basis, const GradedModel& right,
                           const std::vector<GradedClass>& right_basis, const TruncationWindow& quotient_window,
                           bool swapped = false);

/// Basis of a model's ambient window (both summands).
std::vector<GradedClass> graded_window_basis(const GradedModel& model, const TruncationWindow& window);

/// Pairing check for G_m^q against G_{e'-m}^{r+2-q} on the given windows.
PairingReport pairing_rank(int m, int q, const ResidueFieldPtr& field, const Ramification& ram,
                           const TruncationWindow& left_window, const TruncationWindow& right_window);

}  // namespace bklab
