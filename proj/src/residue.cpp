#include "bklab/residue.hpp"

#include <algorithm>
#include <sstream>

namespace bklab {

// ---------------------------------------------------------------------------
// FiniteField

namespace {

std::vector<int> poly_mulmod(const std::vector<int>& a, const std::vector<int>& b,
                             const std::vector<int>& modulus, int p) {
  const int f = static_cast<int>(modulus.size()) - 1;
  std::vector<int> prod(2 * f, 0);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  for (int d = 2 * f - 2; d >= f; --d) {
    const int c = prod[d];
    if (c == 0) continue;
    prod[d] = 0;
    for (int i = 0; i < f; ++i) prod[d - f + i] = ((prod[d - f + i] - c * modulus[i]) % p + p) % p;
  }
  prod.resize(f);
  return prod;
}

}  // namespace

std::vector<int> FiniteField::shipped_modulus(int p, int f) {
  // Conway polynomials, constant term first.
  static const std::map<std::pair<int, int>, std::vector<int>> table = {
      {{2, 1}, {1, 1}},    {{2, 2}, {1, 1, 1}}, {{2, 3}, {1, 1, 0, 1}},
      {{3, 1}, {1, 1}},    {{3, 2}, {2, 2, 1}}, {{3, 3}, {1, 2, 0, 1}},
      {{5, 1}, {3, 1}},    {{5, 2}, {2, 4, 1}}, {{5, 3}, {3, 3, 0, 1}},
  };
  auto it = table.find({p, f});
  if (it == table.end())
    throw math_error("no shipped polynomial for F_" + std::to_string(p) + "^" + std::to_string(f));
  return it->second;
}

std::shared_ptr<const FiniteField> FiniteField::shipped(int p, int f) {
  return std::make_shared<const FiniteField>(p, f, shipped_modulus(p, f));
}

FiniteField::FiniteField(int p, int f, std::vector<int> modulus)
    : p_(p), f_(f), modulus_(std::move(modulus)) {
  if (p < 2) throw math_error("characteristic must be prime");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw math_error("characteristic " + std::to_string(p) + " is not prime");
  if (f < 1 || f > 3) throw math_error("inertia degree must be in 1..3");
  if (static_cast<int>(modulus_.size()) != f + 1 || ((modulus_.back() % p) + p) % p != 1)
    throw math_error("defining polynomial must be monic of degree f");
  for (auto& c : modulus_) c = ((c % p) + p) % p;
  // Degree <= 3: irreducible iff no root in F_p.
  if (f > 1) {
    for (int x = 0; x < p; ++x) {
      long long v = 0;
      for (int i = f; i >= 0; --i) v = (v * x + modulus_[i]) % p;
      if (v == 0) throw math_error("defining polynomial is reducible over F_p");
    }
  }
  q_ = 1;
  for (int i = 0; i < f; ++i) q_ *= p;

  auto digits = [&](int a) {
    std::vector<int> d(f, 0);
    for (int i = 0; i < f; ++i, a /= p) d[i] = a % p;
    return d;
  };
  auto encode = [&](const std::vector<int>& d) {
    int a = 0;
    for (int i = f - 1; i >= 0; --i) a = a * p + d[i];
    return static_cast<Elem>(a);
  };

  add_.assign(q_ * q_, 0);
  mul_.assign(q_ * q_, 0);
  neg_.assign(q_, 0);
  inv_.assign(q_, 0);
  frob_.assign(q_, 0);
  frob_inv_.assign(q_, 0);
  for (int a = 0; a < q_; ++a) {
    const auto da = digits(a);
    std::vector<int> dn(f);
    for (int i = 0; i < f; ++i) dn[i] = (p - da[i]) % p;
    neg_[a] = encode(dn);
    for (int b = 0; b < q_; ++b) {
      const auto db = digits(b);
      std::vector<int> ds(f);
      for (int i = 0; i < f; ++i) ds[i] = (da[i] + db[i]) % p;
      add_[a * q_ + b] = encode(ds);
      mul_[a * q_ + b] = f == 1 ? static_cast<Elem>((a * b) % p) : encode(poly_mulmod(da, db, modulus_, p));
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<Elem>(b);
  for (int a = 0; a < q_; ++a) {
    frob_[a] = pow(static_cast<Elem>(a), p);
    frob_inv_[frob_[a]] = static_cast<Elem>(a);
  }
}

FiniteField::Elem FiniteField::from_int(long long n) const {
  return static_cast<Elem>(((n % p_) + p_) % p_);
}

FiniteField::Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw math_error("division by zero in F_q");
  return inv_[a];
}

FiniteField::Elem FiniteField::pow(Elem a, long long n) const {
  if (n < 0) return pow(inv(a), -n);
  Elem result = 1;
  Elem base = a;
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    base = mul(base, base);
    n >>= 1;
  }
  return result;
}

int FiniteField::digit(Elem a, int j) const {
  int v = a;
  for (int i = 0; i < j; ++i) v /= p_;
  return v % p_;
}

FiniteField::Elem FiniteField::from_digits(const std::vector<int>& digits) const {
  int a = 0;
  for (int i = f_ - 1; i >= 0; --i) a = a * p_ + (i < static_cast<int>(digits.size()) ? ((digits[i] % p_) + p_) % p_ : 0);
  return static_cast<Elem>(a);
}

FiniteField::Elem FiniteField::basis(int j) const {
  int a = 1;
  for (int i = 0; i < j; ++i) a *= p_;
  return static_cast<Elem>(a);
}

int FiniteField::trace(Elem a) const {
  Elem t = 0;
  Elem x = a;
  for (int i = 0; i < f_; ++i) {
    t = add(t, x);
    x = frobenius(x);
  }
  return digit(t, 0);
}

FiniteField::Elem FiniteField::primitive_element() const {
  for (int a = 1; a < q_; ++a) {
    int order = 1;
    Elem x = static_cast<Elem>(a);
    while (x != 1) {
      x = mul(x, static_cast<Elem>(a));
      ++order;
    }
    if (order == q_ - 1) return static_cast<Elem>(a);
  }
  return 1;
}

std::string FiniteField::to_string(Elem a) const {
  std::string s;
  for (int i = f_ - 1; i >= 0; --i) s += static_cast<char>('0' + digit(a, i));
  // Strip leading zeros but keep at least one digit.
  const auto pos = s.find_first_not_of('0');
  return pos == std::string::npos ? "0" : s.substr(pos);
}

// ---------------------------------------------------------------------------
// Poly

bool grlex_less(const Monomial& a, const Monomial& b) {
  const int da = a[0] + a[1], db = b[0] + b[1];
  if (da != db) return da < db;
  if (a[1] != b[1]) return a[1] < b[1];
  return a[0] < b[0];
}

Poly Poly::constant(const FiniteField* field, Fq c) { return monomial(field, {0, 0}, c); }

Poly Poly::monomial(const FiniteField* field, Monomial m, Fq c) {
  Poly out(field);
  if (c != 0) out.terms_.push_back({m, c});
  return out;
}

Poly Poly::variable(const FiniteField* field, int index) {
  Monomial m{0, 0};
  m[index] = 1;
  return monomial(field, m, 1);
}

Poly Poly::from_terms(const FiniteField* field, std::vector<Term> terms) {
  std::map<Monomial, Fq, MonomialLess> acc;
  for (auto& [m, c] : terms) {
    auto [it, inserted] = acc.emplace(m, c);
    if (!inserted) it->second = field->add(it->second, c);
  }
  Poly out(field);
  for (auto it = acc.rbegin(); it != acc.rend(); ++it)
    if (it->second != 0) out.terms_.push_back(*it);
  return out;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Monomial{0, 0}); }

int Poly::degree_in(int var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

int Poly::total_degree() const { return terms_.empty() ? -1 : terms_[0].first[0] + terms_[0].first[1]; }

Poly Poly::operator+(const Poly& o) const {
  const FiniteField* F = field_ ? field_ : o.field_;
  Poly out(F);
  out.terms_.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && grlex_less(o.terms_[j].first, terms_[i].first))) {
      out.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || grlex_less(terms_[i].first, o.terms_[j].first)) {
      out.terms_.push_back(o.terms_[j++]);
    } else {
      const Fq c = F->add(terms_[i].second, o.terms_[j].second);
      if (c != 0) out.terms_.push_back({terms_[i].first, c});
      ++i;
      ++j;
    }
  }
  return out;
}

Poly Poly::operator-() const {
  Poly out(field_);
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.second = field_->neg(t.second);
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  const FiniteField* F = field_ ? field_ : o.field_;
  if (terms_.empty() || o.terms_.empty()) return Poly(F);
  std::vector<Term> prod;
  prod.reserve(terms_.size() * o.terms_.size());
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) prod.push_back({{ma[0] + mb[0], ma[1] + mb[1]}, F->mul(ca, cb)});
  return from_terms(F, std::move(prod));
}

Poly Poly::scaled(Fq c) const {
  if (c == 0) return Poly(field_);
  Poly out(field_);
  out.terms_ = terms_;
  for (auto& t : out.terms_) t.second = field_->mul(t.second, c);
  return out;
}

Poly Poly::shifted(Monomial m) const {
  Poly out(field_);
  out.terms_ = terms_;
  for (auto& t : out.terms_) {
    t.first[0] += m[0];
    t.first[1] += m[1];
  }
  return out;
}

Poly Poly::frobenius() const {
  Poly out(field_);
  out.terms_ = terms_;
  const int p = field_->p();
  for (auto& t : out.terms_) {
    t.first[0] *= p;
    t.first[1] *= p;
    t.second = field_->frobenius(t.second);
  }
  return out;
}

Poly Poly::derivative(int var) const {
  std::vector<Term> out;
  for (const auto& [m, c] : terms_) {
    if (m[var] % field_->p() == 0) continue;
    Monomial dm = m;
    dm[var] -= 1;
    out.push_back({dm, field_->mul(c, field_->from_int(m[var]))});
  }
  return from_terms(field_, std::move(out));
}

Poly Poly::pow(int n) const {
  Poly result = constant(field_, 1);
  Poly base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Poly Poly::monic() const {
  if (terms_.empty()) return *this;
  return scaled(field_->inv(terms_.front().second));
}

std::pair<Poly, Poly> Poly::divmod(const Poly& divisor) const {
  if (divisor.is_zero()) throw math_error("polynomial division by zero");
  const FiniteField* F = field_ ? field_ : divisor.field_;
  const auto& [dm, dc] = divisor.leading();
  const Fq dinv = F->inv(dc);
  Poly quotient(F), remainder(F), work = *this;
  work.field_ = F;
  while (!work.is_zero()) {
    const auto [m, c] = work.leading();
    if (m[0] >= dm[0] && m[1] >= dm[1]) {
      const Monomial qm{m[0] - dm[0], m[1] - dm[1]};
      const Fq qc = F->mul(c, dinv);
      quotient = quotient + monomial(F, qm, qc);
      work = work - divisor.shifted(qm).scaled(qc);
    } else {
      remainder.terms_.push_back(work.terms_.front());
      work.terms_.erase(work.terms_.begin());
    }
  }
  return {quotient, remainder};
}

Poly Poly::exact_div(const Poly& divisor) const {
  auto [q, r] = divmod(divisor);
  if (!r.is_zero()) throw math_error("inexact polynomial division");
  return q;
}

std::string Poly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << field_->to_string(c);
    for (int v = 0; v < 2; ++v) {
      if (m[v] == 0) continue;
      os << '*' << (v < static_cast<int>(names.size()) ? names[v] : "t" + std::to_string(v + 1));
      if (m[v] != 1) os << '^' << m[v];
    }
  }
  return os.str();
}

namespace {

bool is_monomial(const Poly& a) { return a.terms().size() == 1; }

// Univariate helpers on polynomials involving only variable `var`.
Poly univariate_gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    auto r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

// Coefficients with respect to t2, indexed by t2-degree (polys in t1).
std::vector<Poly> coeffs_in_t2(const Poly& a) {
  std::vector<Poly> out(std::max(0, a.degree_in(1)) + 1, Poly(a.field()));
  std::vector<std::vector<Poly::Term>> buckets(out.size());
  for (const auto& [m, c] : a.terms()) buckets[m[1]].push_back({{m[0], 0}, c});
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Poly::from_terms(a.field(), std::move(buckets[i]));
  return out;
}

Poly content_t2(const Poly& a) {
  Poly g(a.field());
  for (const auto& c : coeffs_in_t2(a)) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.monic() : univariate_gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

Poly primitive_part_t2(const Poly& a) {
  if (a.is_zero()) return a;
  return a.exact_div(content_t2(a));
}

Poly pseudo_remainder_t2(Poly a, const Poly& b) {
  const int db = b.degree_in(1);
  const auto cb = coeffs_in_t2(b);
  const Poly& lcb = cb.back();
  while (!a.is_zero() && a.degree_in(1) >= db) {
    const int da = a.degree_in(1);
    const Poly lca = coeffs_in_t2(a).back();
    a = lcb * a - (lca * b).shifted({0, da - db});
  }
  return a;
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  const FiniteField* F = a.field() ? a.field() : b.field();
  if (a.is_constant() || b.is_constant()) return Poly::constant(F, 1);
  if (is_monomial(a) || is_monomial(b)) {
    const Poly& mono = is_monomial(a) ? a : b;
    const Poly& other = is_monomial(a) ? b : a;
    Monomial m = mono.leading().first;
    for (const auto& [om, c] : other.terms()) {
      m[0] = std::min(m[0], om[0]);
      m[1] = std::min(m[1], om[1]);
    }
    return Poly::monomial(F, m, 1);
  }
  if (a.degree_in(1) <= 0 && b.degree_in(1) <= 0) return univariate_gcd(a, b);
  if (a.degree_in(0) <= 0 && b.degree_in(0) <= 0) return univariate_gcd(a, b);

  const Poly ca = content_t2(a), cb = content_t2(b);
  const Poly c = univariate_gcd(ca, cb);
  Poly x = a.exact_div(ca), y = b.exact_div(cb);
  if (x.degree_in(1) < y.degree_in(1)) std::swap(x, y);
  while (!y.is_zero()) {
    if (y.degree_in(1) == 0) {
      x = Poly::constant(F, 1);
      break;
    }
    Poly r = pseudo_remainder_t2(x, y);
    x = std::move(y);
    y = primitive_part_t2(r);
  }
  return (c * primitive_part_t2(x)).monic();
}

// ---------------------------------------------------------------------------
// ResidueField / ResidueElement

ResidueField::ResidueField(std::shared_ptr<const FiniteField> constants, int r) : fq_(std::move(constants)), r_(r) {
  if (r < 0 || r > 2) throw math_error("number of indeterminates must be 0, 1 or 2");
  if (r == 1) names_ = {"t"};
  if (r == 2) names_ = {"t1", "t2"};
}

ResidueFieldPtr ResidueField::make(int p, int f, int r) {
  return std::make_shared<const ResidueField>(FiniteField::shipped(p, f), r);
}

ResidueElement::ResidueElement(ResidueFieldPtr field, Poly num, Poly den)
    : field_(std::move(field)), num_(std::move(num)), den_(std::move(den)) {
  const FiniteField* F = field_->constants_ptr();
  if (den_.is_zero()) throw math_error("division by zero in residue field");
  for (const auto* poly : {&num_, &den_})
    for (const auto& [m, c] : poly->terms())
      if ((field_->r() < 2 && m[1] != 0) || (field_->r() < 1 && m[0] != 0))
        throw math_error("polynomial uses an indeterminate outside the residue field");
  if (num_.is_zero()) {
    num_ = Poly(F);
    den_ = Poly::constant(F, 1);
    return;
  }
  const Poly g = gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = num_.exact_div(g);
    den_ = den_.exact_div(g);
  }
  const Fq lc_inv = F->inv(den_.leading().second);
  num_ = num_.scaled(lc_inv);
  den_ = den_.scaled(lc_inv);
}

ResidueElement ResidueElement::zero(ResidueFieldPtr field) {
  const FiniteField* F = field->constants_ptr();
  return ResidueElement(std::move(field), Poly(F), Poly::constant(F, 1));
}

ResidueElement ResidueElement::one(ResidueFieldPtr field) { return constant(std::move(field), 1); }

ResidueElement ResidueElement::constant(ResidueFieldPtr field, Fq c) {
  const FiniteField* F = field->constants_ptr();
  return ResidueElement(std::move(field), Poly::constant(F, c), Poly::constant(F, 1));
}

ResidueElement ResidueElement::variable(ResidueFieldPtr field, int index) {
  if (index < 0 || index >= field->r()) throw math_error("no such indeterminate");
  const FiniteField* F = field->constants_ptr();
  return ResidueElement(std::move(field), Poly::variable(F, index), Poly::constant(F, 1));
}

ResidueElement ResidueElement::monomial(ResidueFieldPtr field, Monomial m, Fq c) {
  const FiniteField* F = field->constants_ptr();
  Monomial num{std::max(m[0], 0), std::max(m[1], 0)};
  Monomial den{std::max(-m[0], 0), std::max(-m[1], 0)};
  return ResidueElement(std::move(field), Poly::monomial(F, num, c), Poly::monomial(F, den, 1));
}

ResidueElement ResidueElement::from_poly(ResidueFieldPtr field, Poly num) {
  const FiniteField* F = field->constants_ptr();
  return ResidueElement(std::move(field), std::move(num), Poly::constant(F, 1));
}

bool ResidueElement::is_one() const { return num_.is_constant() && !num_.is_zero() && num_.leading().second == 1 && den_.is_constant(); }

bool ResidueElement::is_constant() const { return num_.is_constant() && den_.is_constant(); }

Fq ResidueElement::constant_value() const {
  if (!is_constant()) throw math_error("element is not a constant");
  return num_.is_zero() ? 0 : num_.leading().second;
}

ResidueElement ResidueElement::operator+(const ResidueElement& o) const {
  if (den_ == o.den_) return ResidueElement(field_, num_ + o.num_, den_);
  return ResidueElement(field_, num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

ResidueElement ResidueElement::operator-() const { return ResidueElement(field_, -num_, den_); }

ResidueElement ResidueElement::operator-(const ResidueElement& o) const { return *this + (-o); }

ResidueElement ResidueElement::operator*(const ResidueElement& o) const {
  return ResidueElement(field_, num_ * o.num_, den_ * o.den_);
}

ResidueElement ResidueElement::inverse() const {
  if (is_zero()) throw math_error("division by zero in residue field");
  return ResidueElement(field_, den_, num_);
}

ResidueElement ResidueElement::operator/(const ResidueElement& o) const { return *this * o.inverse(); }

ResidueElement ResidueElement::pow(long long n) const {
  if (n < 0) return inverse().pow(-n);
  ResidueElement result = one(field_);
  ResidueElement base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

ResidueElement ResidueElement::scaled(Fq c) const { return ResidueElement(field_, num_.scaled(c), den_); }

ResidueElement ResidueElement::frobenius() const { return ResidueElement(field_, num_.frobenius(), den_.frobenius()); }

std::optional<ResidueElement> ResidueElement::pth_root() const {
  const FiniteField* F = field_->constants_ptr();
  const int p = F->p();
  auto root = [&](const Poly& a) -> std::optional<Poly> {
    std::vector<Poly::Term> terms;
    for (const auto& [m, c] : a.terms()) {
      if (m[0] % p != 0 || m[1] % p != 0) return std::nullopt;
      terms.push_back({{m[0] / p, m[1] / p}, F->frobenius_inverse(c)});
    }
    return Poly::from_terms(F, std::move(terms));
  };
  auto n = root(num_);
  if (!n) return std::nullopt;
  auto d = root(den_);
  if (!d) return std::nullopt;
  return ResidueElement(field_, *n, *d);
}

ResidueElement ResidueElement::derivative(int var) const {
  // (N/D)' = (N' D - N D') / D^2
  return ResidueElement(field_, num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
}

std::map<Monomial, ResidueElement, MonomialLess> ResidueElement::p_basis_components() const {
  const FiniteField* F = field_->constants_ptr();
  const int p = F->p();
  const Poly P = num_ * den_.pow(p - 1);
  std::map<Monomial, std::vector<Poly::Term>, MonomialLess> groups;
  for (const auto& [m, c] : P.terms()) {
    const Monomial alpha{m[0] % p, m[1] % p};
    groups[alpha].push_back({{(m[0] - alpha[0]) / p, (m[1] - alpha[1]) / p}, F->frobenius_inverse(c)});
  }
  std::map<Monomial, ResidueElement, MonomialLess> out;
  for (auto& [alpha, terms] : groups) out.emplace(alpha, ResidueElement(field_, Poly::from_terms(F, std::move(terms)), den_));
  return out;
}

std::optional<std::vector<std::pair<Monomial, Fq>>> ResidueElement::laurent_terms() const {
  if (den_.terms().size() != 1) return std::nullopt;
  const Monomial d = den_.leading().first;
  std::vector<std::pair<Monomial, Fq>> out;
  for (const auto& [m, c] : num_.terms()) out.push_back({{m[0] - d[0], m[1] - d[1]}, c});
  return out;
}

std::string ResidueElement::to_string() const {
  const auto& names = field_->variable_names();
  if (den_.is_constant()) return num_.to_string(names);
  return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
}

ResidueElement arith(const ResidueElement& x, const ResidueElement& y, ArithOp op) {
  switch (op) {
    case ArithOp::add: return x + y;
    case ArithOp::mul: return x * y;
    case ArithOp::inv: return x.inverse();
    case ArithOp::neg: return -x;
  }
  throw math_error("unknown arithmetic operation");
}

}  // namespace bklab
