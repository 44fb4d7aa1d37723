#include "bklab/forms.hpp"

#include <bit>
#include <sstream>

namespace bklab {

int mask_size(unsigned mask) { return std::popcount(mask); }

std::vector<unsigned> masks_of_size(int r, int q) {
  std::vector<unsigned> out;
  if (q < 0) return out;
  for (unsigned m = 0; m < (1u << r); ++m)
    if (mask_size(m) == q) out.push_back(m);
  return out;
}

ResidueElement mask_monomial(const ResidueFieldPtr& field, unsigned mask) {
  Monomial m{(mask & 1u) ? 1 : 0, (mask & 2u) ? 1 : 0};
  return ResidueElement::monomial(field, m, 1);
}

namespace {

// Sign of dt_I ^ dt_J relative to dt_{I cup J}; 0 when I and J meet.
int wedge_sign(unsigned I, unsigned J) {
  if (I & J) return 0;
  int inversions = 0;
  for (int i = 0; i < 32; ++i)
    if (I & (1u << i)) inversions += mask_size(J & ((1u << i) - 1));
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

DifferentialForm::DifferentialForm(ResidueFieldPtr field, int degree) : field_(std::move(field)), degree_(degree) {
  if (degree < 0) throw math_error("negative form degree");
}

DifferentialForm DifferentialForm::function(const ResidueElement& f) {
  DifferentialForm out(f.field(), 0);
  out.add_term(0, f);
  return out;
}

DifferentialForm DifferentialForm::term(ResidueFieldPtr field, unsigned mask, const ResidueElement& coeff) {
  if (mask >= (1u << field->r())) throw math_error("differential of an indeterminate outside the field");
  DifferentialForm out(field, mask_size(mask));
  out.add_term(mask, coeff);
  return out;
}

DifferentialForm DifferentialForm::log_term(ResidueFieldPtr field, unsigned mask, const ResidueElement& coeff) {
  const auto t = mask_monomial(field, mask);
  return term(std::move(field), mask, coeff / t);
}

DifferentialForm DifferentialForm::dt(ResidueFieldPtr field, int index) {
  const auto one = ResidueElement::one(field);
  return term(std::move(field), 1u << index, one);
}

void DifferentialForm::add_term(unsigned mask, const ResidueElement& coeff) {
  if (coeff.is_zero()) return;
  auto it = terms_.find(mask);
  if (it == terms_.end()) {
    terms_.emplace(mask, coeff);
    return;
  }
  it->second = it->second + coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

ResidueElement DifferentialForm::coefficient(unsigned mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? ResidueElement::zero(field_) : it->second;
}

ResidueElement DifferentialForm::log_coefficient(unsigned mask) const {
  return coefficient(mask) * mask_monomial(field_, mask);
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm& o) const {
  if (degree_ != o.degree_) throw math_error("adding forms of different degree");
  DifferentialForm out = *this;
  if (!out.field_) out.field_ = o.field_;
  for (const auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

DifferentialForm DifferentialForm::operator-() const {
  DifferentialForm out(field_, degree_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

DifferentialForm DifferentialForm::operator-(const DifferentialForm& o) const { return *this + (-o); }

DifferentialForm DifferentialForm::operator*(const ResidueElement& f) const {
  DifferentialForm out(field_, degree_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * f);
  return out;
}

DifferentialForm DifferentialForm::scaled(int c) const {
  return *this * ResidueElement::constant(field_, field_->constants().from_int(c));
}

std::string DifferentialForm::to_string() const {
  if (terms_.empty()) return "0";
  const auto& names = field_->variable_names();
  std::ostringstream os;
  bool first = true;
  for (const auto& [mask, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << log_coefficient(mask).to_string() << ')';
    bool first_factor = true;
    for (int i = 0; i < field_->r(); ++i) {
      if (!(mask & (1u << i))) continue;
      os << (first_factor ? " * " : "^") << 'd' << names[i] << '/' << names[i];
      first_factor = false;
    }
  }
  return os.str();
}

DifferentialForm d(const DifferentialForm& w) {
  DifferentialForm out(w.field(), w.degree() + 1);
  const int r = w.field()->r();
  for (const auto& [mask, f] : w.terms()) {
    for (int j = 0; j < r; ++j) {
      const unsigned jm = 1u << j;
      const int sign = wedge_sign(jm, mask);
      if (sign == 0) continue;
      const auto df = f.derivative(j);
      if (df.is_zero()) continue;
      out = out + DifferentialForm::term(w.field(), jm | mask, sign > 0 ? df : -df);
    }
  }
  return out;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  DifferentialForm out(a.field(), a.degree() + b.degree());
  for (const auto& [I, f] : a.terms())
    for (const auto& [J, g] : b.terms()) {
      const int sign = wedge_sign(I, J);
      if (sign == 0) continue;
      const auto c = f * g;
      out = out + DifferentialForm::term(a.field(), I | J, sign > 0 ? c : -c);
    }
  return out;
}

DifferentialForm dlog(const ResidueElement& x) {
  if (x.is_zero()) throw math_error("dlog of zero");
  DifferentialForm out(x.field(), 1);
  for (int j = 0; j < x.field()->r(); ++j) {
    const auto c = x.derivative(j) / x;
    if (!c.is_zero()) out = out + DifferentialForm::term(x.field(), 1u << j, c);
  }
  return out;
}

DifferentialForm dlog_wedge(const std::vector<ResidueElement>& xs) {
  if (xs.empty()) throw math_error("dlog_wedge needs at least one entry");
  DifferentialForm out = dlog(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) out = wedge(out, dlog(xs[i]));
  return out;
}

bool is_closed(const DifferentialForm& w) { return d(w).is_zero(); }

DifferentialForm cartier(const DifferentialForm& w) {
  if (!is_closed(w)) throw math_error("Cartier operator applied to a non-closed form");
  DifferentialForm out(w.field(), w.degree());
  const Monomial origin{0, 0};
  for (const auto& [mask, f] : w.terms()) {
    const auto components = (f * mask_monomial(w.field(), mask)).p_basis_components();
    auto it = components.find(origin);
    if (it == components.end()) continue;
    out = out + DifferentialForm::log_term(w.field(), mask, it->second);
  }
  return out;
}

DifferentialForm cartier_inverse(const DifferentialForm& w) {
  DifferentialForm out(w.field(), w.degree());
  for (const auto& [mask, f] : w.terms()) {
    const auto g = f * mask_monomial(w.field(), mask);
    out = out + DifferentialForm::log_term(w.field(), mask, g.frobenius());
  }
  return out;
}

bool is_exact(const DifferentialForm& w) {
  if (w.is_zero()) return true;
  if (w.degree() == 0) return false;
  return is_closed(w) && cartier(w).is_zero();
}

bool equal_mod_exact(const DifferentialForm& a, const DifferentialForm& b) { return is_exact(a - b); }

SparseVec form_coordinates(const DifferentialForm& w) {
  SparseVec out;
  for (const auto& [mask, f] : w.terms()) {
    auto part = laurent_coordinates(w.log_coefficient(mask), mask);
    out.insert(part.begin(), part.end());
  }
  return out;
}

std::vector<DifferentialForm> form_window_basis(const ResidueFieldPtr& field, const TruncationWindow& window, int q) {
  std::vector<DifferentialForm> out;
  const auto masks = masks_of_size(field->r(), q);
  const auto functions = window.basis(field);
  for (unsigned mask : masks)
    for (const auto& b : functions) out.push_back(DifferentialForm::log_term(field, mask, b));
  return out;
}

DifferentialForm combine(const std::vector<DifferentialForm>& basis, const FpVector& coeffs, const ResidueFieldPtr& field,
                         int degree) {
  DifferentialForm out(field, degree);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (coeffs[i] != 0) out = out + basis[i].scaled(coeffs[i]);
  return out;
}

std::vector<DifferentialForm> closed_forms(const ResidueFieldPtr& field, const TruncationWindow& window, int q) {
  const auto basis = form_window_basis(field, window, q);
  std::vector<SparseVec> images;
  images.reserve(basis.size());
  for (const auto& w : basis) images.push_back(form_coordinates(d(w)));
  std::vector<DifferentialForm> out;
  for (const auto& k : kernel_basis(field->p(), images)) out.push_back(combine(basis, k, field, q));
  return out;
}

std::vector<DifferentialForm> nu_q(const ResidueFieldPtr& field, const TruncationWindow& window, int q) {
  const auto closed = closed_forms(field, window, q);
  std::vector<SparseVec> images;
  images.reserve(closed.size());
  for (const auto& z : closed) images.push_back(form_coordinates(cartier(z) - z));
  std::vector<DifferentialForm> out;
  for (const auto& k : kernel_basis(field->p(), images)) out.push_back(combine(closed, k, field, q));
  return out;
}

}  // namespace bklab
