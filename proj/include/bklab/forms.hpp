#pragma once

// Kaehler differentials of F_q(t1..tr) over F_p: exterior derivative, wedge,
// dlog, the Cartier operator and its inverse, closed/exact tests and the
// logarithmic kernel nu_q.
//
// A q-form is stored as sum_I f_I dt_I with I a sorted index set (bitmask).
// C and C^{-1} act on the logarithmic rewrite
//   f_I dt_I = (f_I t_I) dlog t_I,   t_I = prod_{i in I} t_i,
// which is total on this representation.

#include <map>
#include <string>
#include <vector>

#include "bklab/linalg.hpp"
#include "bklab/residue.hpp"

namespace bklab {

class DifferentialForm {
 public:
  DifferentialForm() = default;
  DifferentialForm(ResidueFieldPtr field, int degree);

  static DifferentialForm zero(ResidueFieldPtr field, int degree) { return {std::move(field), degree}; }
  static DifferentialForm function(const ResidueElement& f);
  /// coeff * dt_I.
  static DifferentialForm term(ResidueFieldPtr field, unsigned mask, const ResidueElement& coeff);
  /// coeff * dlog t_I.
  static DifferentialForm log_term(ResidueFieldPtr field, unsigned mask, const ResidueElement& coeff);
  static DifferentialForm dt(ResidueFieldPtr field, int index);

  const ResidueFieldPtr& field() const { return field_; }
  int degree() const { return degree_; }
  const std::map<unsigned, ResidueElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of dt_I (zero when absent).
  ResidueElement coefficient(unsigned mask) const;
  /// Coefficient of dlog t_I, i.e. f_I * t_I.
  ResidueElement log_coefficient(unsigned mask) const;

  DifferentialForm operator+(const DifferentialForm& o) const;
  DifferentialForm operator-(const DifferentialForm& o) const;
  DifferentialForm operator-() const;
  DifferentialForm operator*(const ResidueElement& f) const;
  DifferentialForm scaled(int c) const;
  bool operator==(const DifferentialForm& o) const { return degree_ == o.degree_ && terms_ == o.terms_; }

  /// Terms as `g * dt_i/t_i ^ ...` with g the logarithmic coefficient.
  std::string to_string() const;

 private:
  void add_term(unsigned mask, const ResidueElement& coeff);

  ResidueFieldPtr field_;
  int degree_ = 0;
  std::map<unsigned, ResidueElement> terms_;
};

/// Number of elements of an index mask.
int mask_size(unsigned mask);
/// All index sets of size q among r variables, increasing.
std::vector<unsigned> masks_of_size(int r, int q);
/// Product of the variables in the mask.
ResidueElement mask_monomial(const ResidueFieldPtr& field, unsigned mask);

DifferentialForm d(const DifferentialForm& w);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
/// dx/x; throws math_error when x = 0.
DifferentialForm dlog(const ResidueElement& x);
/// dlog x_1 ^ ... ^ dlog x_q (the function 1 when xs is empty).
DifferentialForm dlog_wedge(const std::vector<ResidueElement>& xs);

bool is_closed(const DifferentialForm& w);
/// Cartier operator on closed forms; throws math_error on non-closed input.
DifferentialForm cartier(const DifferentialForm& w);
/// Representative of C^{-1}(w) in Omega^q / d Omega^{q-1}.
DifferentialForm cartier_inverse(const DifferentialForm& w);
/// w in d Omega^{q-1}, decided exactly as: closed and C(w) = 0.
bool is_exact(const DifferentialForm& w);
bool equal_mod_exact(const DifferentialForm& a, const DifferentialForm& b);

/// F_p coordinates of a Laurent form in the logarithmic basis.
SparseVec form_coordinates(const DifferentialForm& w);
/// F_p-basis of the window of q-forms: b * dlog t_I, b in window basis.
std::vector<DifferentialForm> form_window_basis(const ResidueFieldPtr& field, const TruncationWindow& window, int q);
/// Linear combination sum c_i basis_i.
DifferentialForm combine(const std::vector<DifferentialForm>& basis, const FpVector& coeffs, const ResidueFieldPtr& field,
                         int degree);

/// F_p-basis of Z_1 Omega^q intersected with the window.
std::vector<DifferentialForm> closed_forms(const ResidueFieldPtr& field, const TruncationWindow& window, int q);
/// F_p-basis of nu_q(k) intersected with the window: closed forms fixed by C.
std::vector<DifferentialForm> nu_q(const ResidueFieldPtr& field, const TruncationWindow& window, int q);

}  // namespace bklab
