#include "bklab/graded.hpp"

#include <numeric>
#include <sstream>

namespace bklab {

long long Rational::floor() const {
  long long q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

long long Rational::ceil() const { return is_integer() ? num / den : floor() + 1; }

std::string Rational::to_string() const {
  if (is_integer()) return std::to_string(num / den);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Ramification::eprime() const {
  long long n = static_cast<long long>(p) * e, d = p - 1;
  const long long g = std::gcd(n, d);
  return {n / g, d / g};
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::zero_level: return "zero_level";
    case Regime::prime_to_p: return "prime_to_p";
    case Regime::divisible_by_p: return "divisible_by_p";
    case Regime::at_eprime: return "at_eprime";
    case Regime::above_eprime: return "above_eprime";
  }
  return "?";
}

GradedModel::GradedModel(int q, int m, ResidueFieldPtr field, Ramification ram)
    : q_(q), m_(m), field_(std::move(field)), ram_(ram) {
  if (q < 0 || m < 0) throw math_error("graded model needs q >= 0 and m >= 0");
  if (ram.p != field_->p()) throw math_error("ramification data and residue field disagree on p");
  const Rational ep = ram.eprime();
  if (m == 0)
    regime_ = Regime::zero_level;
  else if (m > ep)
    regime_ = Regime::above_eprime;
  else if (m == ep)
    regime_ = Regime::at_eprime;
  else
    regime_ = (m % ram.p == 0) ? Regime::divisible_by_p : Regime::prime_to_p;
}

GradedModel GradedModel::at_eprime(int q, ResidueFieldPtr field, Ramification ram) {
  const Rational ep = ram.eprime();
  if (!ep.is_integer()) throw math_error("e' = " + ep.to_string() + " is not an integer");
  return GradedModel(q, static_cast<int>(ep.num / ep.den), std::move(field), ram);
}

int GradedModel::summand_degree(int summand) const {
  if (regime_ == Regime::zero_level) return q_ - summand;
  return q_ - 1 - summand;
}

Quotient GradedModel::summand_quotient(int summand) const {
  switch (regime_) {
    case Regime::zero_level: return Quotient::exact;
    case Regime::prime_to_p: return summand == 0 ? Quotient::none : Quotient::everything;
    case Regime::divisible_by_p: return Quotient::closed;
    case Regime::at_eprime: return Quotient::twisted_closed;
    case Regime::above_eprime: return Quotient::everything;
  }
  return Quotient::everything;
}

bool GradedModel::summand_present(int summand) const {
  const int deg = summand_degree(summand);
  return deg >= 0 && deg <= field_->r() && summand_quotient(summand) != Quotient::everything;
}

namespace {

// Generators of (1 + aC) Z_1 built from the closed forms of the window.
std::vector<DifferentialForm> twisted_closed_generators(const GradedModel& model, int degree,
                                                        const TruncationWindow& window) {
  const auto a = ResidueElement::constant(model.field(), model.ramification().a);
  std::vector<DifferentialForm> out;
  for (const auto& z : closed_forms(model.field(), window, degree)) out.push_back(z + cartier(z) * a);
  return out;
}

}  // namespace

bool GradedModel::in_quotient_subspace(const DifferentialForm& w, int summand, const TruncationWindow& window) const {
  const int deg = summand_degree(summand);
  if (deg < 0 || deg > field_->r()) return true;
  switch (summand_quotient(summand)) {
    case Quotient::none: return w.is_zero();
    case Quotient::exact: return is_exact(w);
    case Quotient::closed: return is_closed(w);
    case Quotient::everything: return true;
    case Quotient::twisted_closed: {
      if (w.is_zero()) return true;
      const auto gens = twisted_closed_generators(*this, deg, window);
      std::vector<SparseVec> images;
      for (const auto& g : gens) images.push_back(form_coordinates(g));
      return solve_fp_linear(field_->p(), images, form_coordinates(w), images.size()).solvable;
    }
  }
  return false;
}

std::size_t GradedModel::window_dimension(const TruncationWindow& window) const {
  const int p = field_->p();
  std::size_t dim = 0;
  for (int s = 0; s < 2; ++s) {
    if (!summand_present(s)) continue;
    const int deg = summand_degree(s);
    if (regime_ == Regime::zero_level) {
      dim += nu_q(field_, window, deg).size();
      continue;
    }
    std::vector<SparseVec> subspace;
    if (summand_quotient(s) == Quotient::closed)
      for (const auto& z : closed_forms(field_, window, deg)) subspace.push_back(form_coordinates(z));
    if (summand_quotient(s) == Quotient::twisted_closed)
      for (const auto& g : twisted_closed_generators(*this, deg, window)) subspace.push_back(form_coordinates(g));
    std::vector<SparseVec> all = subspace;
    for (const auto& w : form_window_basis(field_, window, deg)) all.push_back(form_coordinates(w));
    dim += rank_of(p, all) - rank_of(p, subspace);
  }
  return dim;
}

std::string GradedModel::describe() const {
  static const char* omega[] = {"Omega^0", "Omega^1", "Omega^2", "Omega^3"};
  auto summand = [&](int s) -> std::string {
    const int deg = summand_degree(s);
    if (deg < 0 || deg > field_->r()) return "0";
    const std::string base = regime_ == Regime::zero_level ? "nu_" + std::to_string(deg) : omega[deg];
    switch (summand_quotient(s)) {
      case Quotient::none: return base;
      case Quotient::exact: return base;
      case Quotient::closed: return base + "/Z_1";
      case Quotient::twisted_closed: return base + "/(1+aC)Z_1";
      case Quotient::everything: return "0";
    }
    return base;
  };
  std::ostringstream os;
  os << "G_" << m_ << "^" << q_ << " [" << to_string(regime_) << "] = " << summand(0) << " + " << summand(1);
  return os.str();
}

GradedClass GradedClass::zero(const GradedModel& model) {
  const auto& k = model.field();
  return {DifferentialForm::zero(k, std::max(0, model.summand_degree(0))),
          DifferentialForm::zero(k, std::max(0, model.summand_degree(1)))};
}

GradedClass GradedClass::of(const GradedModel& model, DifferentialForm first, std::optional<DifferentialForm> second) {
  GradedClass out = zero(model);
  out.first = std::move(first);
  if (second) out.second = std::move(*second);
  return out;
}

bool graded_class_is_zero(const GradedModel& model, const GradedClass& a, const TruncationWindow& window) {
  return model.in_quotient_subspace(a.first, 0, window) && model.in_quotient_subspace(a.second, 1, window);
}

bool graded_class_eq(const GradedModel& model, const GradedClass& a, const GradedClass& b, const TruncationWindow& window) {
  return graded_class_is_zero(model, {a.first - b.first, a.second - b.second}, window);
}

DifferentialForm phi_m(const GradedModel& left, const GradedClass& u, const GradedModel& right, const GradedClass& v,
                       bool swapped) {
  const Rational ep = left.ramification().eprime();
  const int r = left.field()->r();
  if (!ep.is_integer() || left.m() + right.m() != ep.num / ep.den)
    throw math_error("phi_m needs m + m' = e' with e' integral");
  if (left.q() + right.q() != r + 2) throw math_error("phi_m needs q + q' = r + 2");
  if (left.regime() != right.regime() ||
      (left.regime() != Regime::prime_to_p && left.regime() != Regime::divisible_by_p))
    throw math_error(std::string("phi_m regime mismatch: ") + to_string(left.regime()) + " vs " +
                     to_string(right.regime()));

  auto product = [&](const DifferentialForm& x, const DifferentialForm& y) {
    return swapped ? wedge(y, x) : wedge(x, y);
  };
  DifferentialForm out = DifferentialForm::zero(left.field(), r);
  if (left.regime() == Regime::prime_to_p) return out + product(u.first, v.first);
  // (x1, x2, y1, y2) -> x1 ^ dy2 + x2 ^ dy1
  if (left.summand_present(0) && right.summand_present(1)) out = out + product(u.first, d(v.second));
  if (left.summand_present(1) && right.summand_present(0)) out = out + product(u.second, d(v.first));
  return out;
}

SparseVec pairing_readout(const DifferentialForm& w) { return form_coordinates(cartier(w)); }

std::vector<GradedClass> graded_window_basis(const GradedModel& model, const TruncationWindow& window) {
  std::vector<GradedClass> out;
  for (int s = 0; s < 2; ++s) {
    if (!model.summand_present(s)) continue;
    for (auto& w : form_window_basis(model.field(), window, model.summand_degree(s))) {
      GradedClass c = GradedClass::zero(model);
      (s == 0 ? c.first : c.second) = std::move(w);
      out.push_back(std::move(c));
    }
  }
  return out;
}

PairingReport pairing_rank(const GradedModel& left, const std::vector<GradedClass>& left_basis, const GradedModel& right,
                           const std::vector<GradedClass>& right_basis, const TruncationWindow& quotient_window,
                           bool swapped) {
  const int p = left.field()->p();
  PairingReport report;
  report.left_dim = left_basis.size();
  report.right_dim = right_basis.size();
  std::vector<SparseVec> rows;
  rows.reserve(left_basis.size());
  for (const auto& u : left_basis) {
    SparseVec row;
    for (std::size_t j = 0; j < right_basis.size(); ++j)
      for (const auto& [key, c] : pairing_readout(phi_m(left, u, right, right_basis[j], swapped)))
        row[(static_cast<std::int64_t>(j) << 44) | key] = c;
    rows.push_back(std::move(row));
  }
  const auto kernel = kernel_basis(p, rows);
  report.kernel_dim = kernel.size();
  report.rank = report.left_dim - report.kernel_dim;
  for (const auto& k : kernel) {
    GradedClass c = GradedClass::zero(left);
    for (std::size_t i = 0; i < left_basis.size(); ++i) {
      if (k[i] == 0) continue;
      c.first = c.first + left_basis[i].first.scaled(k[i]);
      c.second = c.second + left_basis[i].second.scaled(k[i]);
    }
    if (!graded_class_is_zero(left, c, quotient_window)) report.degenerate.push_back(std::move(c));
  }
  return report;
}

PairingReport pairing_rank(int m, int q, const ResidueFieldPtr& field, const Ramification& ram,
                           const TruncationWindow& left_window, const TruncationWindow& right_window) {
  const Rational ep = ram.eprime();
  if (!ep.is_integer()) throw math_error("pairing needs an integral e'");
  const int eprime = static_cast<int>(ep.num / ep.den);
  const GradedModel left(q, m, field, ram);
  const GradedModel right(field->r() + 2 - q, eprime - m, field, ram);
  return pairing_rank(left, graded_window_basis(left, left_window), right, graded_window_basis(right, right_window),
                      left_window);
}

}  // namespace bklab
