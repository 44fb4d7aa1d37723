#include "bklab/padic.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace bklab {

namespace {

using i128 = __int128;

std::int64_t mod(i128 x, std::int64_t m) {
  auto r = static_cast<std::int64_t>(x % m);
  return r < 0 ? r + m : r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, b = mod(a, m);
  while (b != 0) {
    const std::int64_t q = g / b;
    std::tie(g, b) = std::make_pair(b, g - q * b);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw math_error("integer not invertible modulo p^M");
  return mod(x, m);
}

int default_precision(int p, int e) {
  const Rational ep = Ramification{p, e, 1}.eprime();
  return 3 * e + static_cast<int>(ep.ceil()) + 2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptors

std::string LocalFieldDescriptor::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["p"] = p;
  j["f"] = f;
  j["unramified_poly"] = unramified_poly;
  j["eisenstein_poly"] = eisenstein_poly;
  j["precision"] = precision;
  return j.dump(2) + "\n";
}

LocalFieldDescriptor LocalFieldDescriptor::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw math_error(std::string("malformed field descriptor: ") + ex.what());
  }
  LocalFieldDescriptor d;
  try {
    d.name = j.value("name", std::string());
    d.p = j.at("p").get<int>();
    d.f = j.value("f", 1);
    if (j.contains("unramified_poly")) d.unramified_poly = j.at("unramified_poly").get<std::vector<int>>();
    d.eisenstein_poly = j.at("eisenstein_poly").get<std::vector<long long>>();
    d.precision = j.value("precision", 0);
  } catch (const nlohmann::json::exception& ex) {
    throw math_error(std::string("field descriptor: ") + ex.what());
  }
  return d;
}

LocalFieldDescriptor LocalFieldDescriptor::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw math_error("cannot open field descriptor " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto d = from_json(ss.str());
  if (d.name.empty()) d.name = std::filesystem::path(path).stem().string();
  return d;
}

const std::vector<LocalFieldDescriptor>& shipped_descriptors() {
  static const std::vector<LocalFieldDescriptor> menu = [] {
    auto make = [](std::string name, int p, int f, std::vector<long long> eis) {
      LocalFieldDescriptor d;
      d.name = std::move(name);
      d.p = p;
      d.f = f;
      d.unramified_poly = FiniteField::shipped_modulus(p, f);
      d.eisenstein_poly = std::move(eis);
      d.precision = default_precision(p, d.e());
      return d;
    };
    return std::vector<LocalFieldDescriptor>{
        make("Q2", 2, 1, {-2, 1}),          make("Q4", 2, 2, {-2, 1}),
        make("Q8", 2, 3, {-2, 1}),          make("Q2_sqrt2", 2, 1, {-2, 0, 1}),
        make("Q2_sqrt-2", 2, 1, {2, 0, 1}), make("Q4_sqrt2", 2, 2, {-2, 0, 1}),
        make("Q3", 3, 1, {-3, 1}),          make("Q9", 3, 2, {-3, 1}),
        make("Q3_zeta3", 3, 1, {3, 3, 1}),  make("Q5", 5, 1, {-5, 1}),
        make("Q25", 5, 2, {-5, 1}),
    };
  }();
  return menu;
}

LocalFieldDescriptor resolve_descriptor(const std::string& name_or_path) {
  for (const auto& d : shipped_descriptors())
    if (d.name == name_or_path) return d;
  if (std::filesystem::exists(name_or_path)) return LocalFieldDescriptor::load(name_or_path);
  std::string names;
  for (const auto& d : shipped_descriptors()) names += " " + d.name;
  throw math_error("unknown field '" + name_or_path + "'; shipped fields:" + names);
}

// ---------------------------------------------------------------------------
// LocalField

LocalField::LocalField(const LocalFieldDescriptor& d) : desc_(d), p_(d.p), f_(d.f), e_(d.e()) {
  if (p_ != 2 && p_ != 3 && p_ != 5) throw math_error("residue characteristic must be 2, 3 or 5");
  if (f_ < 1 || f_ > 3) throw math_error("residue degree must be 1, 2 or 3");
  const auto conway = FiniteField::shipped_modulus(p_, f_);
  if (desc_.unramified_poly.empty()) desc_.unramified_poly = conway;
  if (desc_.unramified_poly != conway)
    throw math_error("unramified polynomial must be the shipped residue polynomial for (p, f)");
  const auto& E = desc_.eisenstein_poly;
  if (e_ < 1 || E.back() != 1) throw math_error("Eisenstein polynomial must be monic of degree >= 1");
  for (int i = 0; i < e_; ++i)
    if (E[i] % p_ != 0) throw math_error("Eisenstein polynomial: coefficient not divisible by p");
  if ((E[0] / p_) % p_ == 0) throw math_error("Eisenstein polynomial: constant term divisible by p^2");
  if (e_ * f_ > Raw::kCapacity) throw math_error("e * f exceeds the supported degree");

  const Rational ep = Ramification{p_, e_, 1}.eprime();
  N_ = desc_.precision > 0 ? desc_.precision : default_precision(p_, e_);
  desc_.precision = N_;
  const long long needed = Rational{2 * ep.num, ep.den}.floor() + e_ + 1;
  if (N_ < needed)
    throw precision_error("precision " + std::to_string(N_) + " is below floor(2e') + e + 1 = " + std::to_string(needed));
  M_ = (N_ + e_ - 1) / e_ + 2;
  P_ = 1;
  for (int i = 0; i <= M_; ++i) {
    p_power_.push_back(P_);
    if (i < M_) P_ *= p_;
    if (P_ >= (std::int64_t{1} << 31)) throw precision_error("precision too large for 31-bit coefficient storage");
  }

  for (int j = 0; j < f_; ++j) h_.push_back(mod(desc_.unramified_poly[j], P_));
  for (int i = 0; i < e_; ++i) E_.push_back(mod(E[i], P_));
  const std::int64_t u0 = E[0] / p_;
  const std::int64_t u0inv = inverse_mod(u0, P_);
  // p / pi = -(pi^{e-1} + sum_{i>=1} a_i pi^{i-1}) / u0
  Raw t = pi_power(e_ - 1);
  for (int i = 1; i < e_; ++i) t = add(t, scale(pi_power(i - 1), E_[i]));
  p_over_pi_ = scale(t, mod(-static_cast<i128>(u0inv), P_));

  residue_ = FiniteField::shipped(p_, f_);
  residue_ring_ = ResidueField::make(p_, f_, 0);
  a_ = residue_->from_int(mod(-static_cast<i128>(inverse_mod(u0, p_)), p_));

  const int q = residue_->q();
  teich_.resize(q);
  for (int x = 0; x < q; ++x) {
    Raw y = naive_lift(static_cast<Fq>(x));
    for (int it = 0; it < 4 * M_ + 8; ++it) {
      Raw next = pow(y, q);
      if (next == y) break;
      y = next;
    }
    teich_[x] = y;
  }
}

LocalFieldPtr LocalField::make(const LocalFieldDescriptor& d) { return LocalFieldPtr(new LocalField(d)); }

LocalFieldPtr LocalField::with_precision(int precision) const {
  auto d = desc_;
  d.precision = precision;
  return make(d);
}

int LocalField::eprime_int() const {
  const Rational ep = eprime();
  if (!ep.is_integer()) throw math_error("e' = " + ep.to_string() + " is not an integer");
  return static_cast<int>(ep.num / ep.den);
}

Raw LocalField::from_int(long long n) const {
  Raw r;
  r.c[0] = mod(n, P_);
  return r;
}

Raw LocalField::pi_power(int k) const {
  if (k < 0) throw math_error("negative power of pi in O_K");
  return mul_pi(one(), k);
}

Raw LocalField::naive_lift(Fq x) const {
  Raw r;
  for (int j = 0; j < f_; ++j) r.c[j] = residue_->digit(x, j);
  return r;
}

Raw LocalField::add(const Raw& x, const Raw& y) const {
  Raw r;
  for (int k = 0; k < dim(); ++k) {
    r.c[k] = x.c[k] + y.c[k];
    if (r.c[k] >= P_) r.c[k] -= P_;
  }
  return r;
}

Raw LocalField::sub(const Raw& x, const Raw& y) const {
  Raw r;
  for (int k = 0; k < dim(); ++k) {
    r.c[k] = x.c[k] - y.c[k];
    if (r.c[k] < 0) r.c[k] += P_;
  }
  return r;
}

Raw LocalField::neg(const Raw& x) const { return sub(zero(), x); }

Raw LocalField::scale(const Raw& x, std::int64_t n) const {
  Raw r;
  const std::int64_t m = mod(n, P_);
  for (int k = 0; k < dim(); ++k) r.c[k] = mod(static_cast<i128>(x.c[k]) * m, P_);
  return r;
}

Raw LocalField::mul(const Raw& x, const Raw& y) const {
  // Product in Z[g, pi], then reduce by h(g) and E(pi).
  constexpr int kMax = Raw::kCapacity;
  i128 t[2 * kMax][2 * kMax] = {};
  for (int i1 = 0; i1 < e_; ++i1)
    for (int j1 = 0; j1 < f_; ++j1) {
      const std::int64_t a = x.c[i1 * f_ + j1];
      if (a == 0) continue;
      for (int i2 = 0; i2 < e_; ++i2)
        for (int j2 = 0; j2 < f_; ++j2) t[i1 + i2][j1 + j2] += static_cast<i128>(a) * y.c[i2 * f_ + j2];
    }
  std::int64_t u[2 * kMax][kMax] = {};
  for (int i = 0; i < 2 * e_ - 1; ++i) {
    for (int k = 2 * f_ - 2; k >= f_; --k) {
      const std::int64_t top = mod(t[i][k], P_);
      if (top == 0) continue;
      for (int j = 0; j < f_; ++j) t[i][k - f_ + j] -= static_cast<i128>(top) * h_[j];
    }
    for (int j = 0; j < f_; ++j) u[i][j] = mod(t[i][j], P_);
  }
  for (int i = 2 * e_ - 2; i >= e_; --i)
    for (int j = 0; j < f_; ++j) {
      const std::int64_t top = u[i][j];
      if (top == 0) continue;
      for (int k = 0; k < e_; ++k) u[i - e_ + k][j] = mod(u[i - e_ + k][j] - static_cast<i128>(top) * E_[k], P_);
    }
  Raw r;
  for (int i = 0; i < e_; ++i)
    for (int j = 0; j < f_; ++j) r.c[i * f_ + j] = u[i][j];
  return r;
}

Raw LocalField::pow(const Raw& x, long long n) const {
  if (n < 0) return pow(inverse(x), -n);
  Raw result = one(), base = x;
  while (n > 0) {
    if (n & 1) result = mul(result, base);
    n >>= 1;
    if (n) base = mul(base, base);
  }
  return result;
}

Raw LocalField::mul_pi(const Raw& x, int k) const {
  Raw r = x;
  for (int step = 0; step < k; ++step) {
    Raw s;
    for (int i = 1; i < e_; ++i)
      for (int j = 0; j < f_; ++j) s.c[i * f_ + j] = r.c[(i - 1) * f_ + j];
    for (int j = 0; j < f_; ++j) {
      const std::int64_t top = r.c[(e_ - 1) * f_ + j];
      if (top == 0) continue;
      for (int i = 0; i < e_; ++i)
        s.c[i * f_ + j] = mod(s.c[i * f_ + j] - static_cast<i128>(top) * E_[i], P_);
    }
    r = s;
  }
  return r;
}

Raw LocalField::div_pi(const Raw& x) const {
  Raw c0, rest;
  for (int j = 0; j < f_; ++j) {
    if (x.c[j] % p_ != 0) throw math_error("division by pi of an element of valuation 0");
    c0.c[j] = x.c[j] / p_;
  }
  for (int i = 0; i + 1 < e_; ++i)
    for (int j = 0; j < f_; ++j) rest.c[i * f_ + j] = x.c[(i + 1) * f_ + j];
  return add(rest, mul(c0, p_over_pi_));
}

Raw LocalField::div_pi_power(const Raw& x, int k, int known) const {
  Raw r = reduce(x, known);
  if (valuation(r, k) < k) throw math_error("element not divisible by the requested power of pi");
  for (int i = 0; i < k; ++i) r = div_pi(r);
  return r;
}

Raw LocalField::inverse(const Raw& x) const {
  const Fq r = residue(x);
  if (r == 0) throw math_error("inverse of a non-unit");
  Raw y = naive_lift(residue_->inv(r));
  const Raw two = from_int(2);
  for (int it = 0; it < 64; ++it) {
    const Raw xy = mul(x, y);
    if (xy == one()) return y;
    y = mul(y, sub(two, xy));
  }
  throw precision_error("unit inverse did not converge");
}

Raw LocalField::reduce(const Raw& x, int r) const {
  Raw out;
  for (int i = 0; i < e_; ++i) {
    int k = r <= i ? 0 : (r - i + e_ - 1) / e_;
    if (k >= M_) {
      for (int j = 0; j < f_; ++j) out.c[i * f_ + j] = x.c[i * f_ + j];
      continue;
    }
    for (int j = 0; j < f_; ++j) out.c[i * f_ + j] = x.c[i * f_ + j] % p_power_[k];
  }
  return out;
}

bool LocalField::equal_mod(const Raw& x, const Raw& y, int r) const { return reduce(sub(x, y), r) == Raw{}; }

int LocalField::valuation(const Raw& x, int cap) const {
  int best = cap;
  for (int i = 0; i < e_; ++i)
    for (int j = 0; j < f_; ++j) {
      std::int64_t c = x.c[i * f_ + j];
      int v = 0;
      if (c == 0)
        v = M_;
      else
        while (c % p_ == 0) c /= p_, ++v;
      best = std::min(best, e_ * v + i);
    }
  return best;
}

Fq LocalField::residue(const Raw& x) const {
  std::vector<int> digits(f_);
  for (int j = 0; j < f_; ++j) digits[j] = static_cast<int>(x.c[j] % p_);
  return residue_->from_digits(digits);
}

Fq LocalField::leading_residue(const Raw& x, int t) const {
  const int i = t % e_, s = t / e_;
  std::vector<int> digits(f_);
  for (int j = 0; j < f_; ++j) digits[j] = static_cast<int>((x.c[i * f_ + j] / p_power_[s]) % p_);
  return residue_->mul(residue_->from_digits(digits), residue_->pow(a_, s));
}

int LocalField::unit_level(const Raw& x, int cap) const {
  if (residue(x) != 1) return 0;
  return valuation(sub(x, one()), cap);
}

std::string LocalField::raw_to_string(const Raw& x, int precision) const {
  return PadicElement::from_raw(with_precision(N_), x, precision).to_string();
}

// ---------------------------------------------------------------------------
// PadicElement

PadicElement PadicElement::zero(LocalFieldPtr field, int absolute_precision) {
  PadicElement z;
  z.field_ = std::move(field);
  z.zero_ = true;
  z.v_ = absolute_precision;
  return z;
}

PadicElement PadicElement::from_unit(LocalFieldPtr field, int v, const Raw& u, int relative_precision) {
  const int rel = std::min(relative_precision, field->precision());
  if (rel <= 0) return zero(std::move(field), v);
  if (field->residue(u) == 0) throw math_error("from_unit: not a unit");
  PadicElement x;
  x.u_ = field->reduce(u, rel);
  x.field_ = std::move(field);
  x.zero_ = false;
  x.v_ = v;
  x.rel_ = rel;
  return x;
}

PadicElement PadicElement::from_int(LocalFieldPtr field, long long n) {
  const auto& F = *field;
  if (n == 0) return zero(field, F.precision());
  int s = 0;
  while (n % F.p() == 0) n /= F.p(), ++s;
  const int full = F.e() * F.storage_digits();
  const Raw p_unit = F.div_pi_power(F.from_int(F.p()), F.e(), full);  // p / pi^e
  const Raw u = F.mul(F.from_int(n), F.pow(p_unit, s));
  return from_unit(field, F.e() * s, u, F.precision());
}

PadicElement PadicElement::pi(LocalFieldPtr field) {
  const Raw one = field->one();
  const int N = field->precision();
  return from_unit(std::move(field), 1, one, N);
}

PadicElement PadicElement::lift(LocalFieldPtr field, Fq x) {
  const int N = field->precision();
  if (x == 0) return zero(std::move(field), N);
  const Raw t = field->teichmuller(x);
  return from_unit(std::move(field), 0, t, N);
}

PadicElement PadicElement::lift(LocalFieldPtr field, const ResidueElement& x) {
  if (!x.is_constant()) throw math_error("Teichmueller lift needs a finite residue field element");
  return lift(std::move(field), x.constant_value());
}

PadicElement PadicElement::from_raw(LocalFieldPtr field, const Raw& x, int absolute_precision) {
  const auto& F = *field;
  const int abs = std::min(absolute_precision, F.e() * (F.storage_digits() - 1));
  const int v = F.valuation(x, abs);
  if (v >= abs) return zero(field, abs);
  const Raw u = F.div_pi_power(x, v, abs);
  return from_unit(field, v, u, abs - v);
}

int PadicElement::valuation() const {
  if (zero_) throw precision_error("valuation of an element that is zero at precision " + std::to_string(v_));
  return v_;
}

Fq PadicElement::residue() const {
  if (zero_) {
    if (v_ < 1) throw precision_error("residue of an element known to no digits");
    return 0;
  }
  if (v_ < 0) throw math_error("residue of a non-integral element");
  return v_ > 0 ? Fq{0} : field_->residue(u_);
}

Raw PadicElement::to_raw() const {
  if (zero_) return field_->zero();
  if (v_ < 0) throw math_error("non-integral element has no image in O_K");
  return field_->reduce(field_->mul_pi(u_, v_), v_ + rel_);
}

PadicElement PadicElement::operator-() const {
  if (zero_) return *this;
  PadicElement r = *this;
  r.u_ = field_->reduce(field_->neg(u_), rel_);
  return r;
}

PadicElement PadicElement::operator+(const PadicElement& o) const {
  const auto& F = *field_;
  if (zero_ && o.zero_) return zero(field_, std::min(v_, o.v_));
  if (zero_ || o.zero_) {
    const PadicElement& z = zero_ ? *this : o;
    const PadicElement& x = zero_ ? o : *this;
    if (x.v_ >= z.v_) return zero(field_, z.v_);
    return from_unit(field_, x.v_, x.u_, std::min(x.rel_, z.v_ - x.v_));
  }
  const PadicElement& x = v_ <= o.v_ ? *this : o;
  const PadicElement& y = v_ <= o.v_ ? o : *this;
  const int abs = std::min(absolute_precision(), o.absolute_precision());
  const int rel = abs - x.v_;
  Raw s = x.u_;
  if (y.v_ - x.v_ < rel) s = F.add(s, F.mul_pi(y.u_, y.v_ - x.v_));
  s = F.reduce(s, rel);
  const int w = F.valuation(s, rel);
  if (w >= rel) return zero(field_, abs);
  return from_unit(field_, x.v_ + w, F.div_pi_power(s, w, rel), rel - w);
}

PadicElement PadicElement::operator-(const PadicElement& o) const { return *this + (-o); }

PadicElement PadicElement::operator*(const PadicElement& o) const {
  if (zero_ && o.zero_) return zero(field_, v_ + o.v_);
  if (zero_) return zero(field_, v_ + o.v_);
  if (o.zero_) return zero(field_, v_ + o.v_);
  return from_unit(field_, v_ + o.v_, field_->mul(u_, o.u_), std::min(rel_, o.rel_));
}

PadicElement PadicElement::inverse() const {
  if (zero_) throw math_error("division by zero");
  return from_unit(field_, -v_, field_->inverse(u_), rel_);
}

PadicElement PadicElement::operator/(const PadicElement& o) const { return *this * o.inverse(); }

PadicElement PadicElement::pow(long long n) const {
  if (n == 0) return one(field_);
  if (n < 0) return inverse().pow(-n);
  if (zero_) return zero(field_, v_ >= 0 ? static_cast<int>(v_ * n) : v_);
  return from_unit(field_, static_cast<int>(v_ * n), field_->pow(u_, n), rel_);
}

std::vector<Fq> PadicElement::digits() const {
  std::vector<Fq> out;
  if (zero_) return out;
  const auto& F = *field_;
  Raw r = u_;
  for (int k = 0; k < rel_; ++k) {
    if (F.valuation(r, rel_) > k) {
      out.push_back(0);
      continue;
    }
    const Fq d = F.leading_residue(r, k);
    out.push_back(d);
    r = F.reduce(F.sub(r, F.mul_pi(F.teichmuller(d), k)), rel_);
  }
  return out;
}

std::string PadicElement::to_string() const {
  const int prec = absolute_precision();
  std::ostringstream os;
  bool first = true;
  if (!zero_) {
    const auto ds = digits();
    for (std::size_t k = 0; k < ds.size(); ++k) {
      if (ds[k] == 0) continue;
      const int exp = v_ + static_cast<int>(k);
      const std::string d = field_->residue_field().to_string(ds[k]);
      if (!first) os << " + ";
      first = false;
      if (exp == 0) {
        os << d;
        continue;
      }
      if (d != "1") os << d << '*';
      os << "pi";
      if (exp != 1) os << '^' << (exp < 0 ? "(" + std::to_string(exp) + ")" : std::to_string(exp));
    }
  }
  if (!first) os << " + ";
  os << "O(pi^" << prec << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class ElementParser {
 public:
  ElementParser(LocalFieldPtr field, std::string text) : F_(std::move(field)), s_(std::move(text)) {}

  PadicElement parse() {
    auto x = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    return x;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw math_error("cannot parse '" + s_ + "' at " + std::to_string(pos_) + ": " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) return ++pos_, true;
    return false;
  }
  long long integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return std::stoll(s_.substr(start, pos_ - start));
  }
  PadicElement expr() {
    auto x = term();
    for (;;) {
      if (eat('+'))
        x = x + term();
      else if (eat('-'))
        x = x - term();
      else
        return x;
    }
  }
  PadicElement term() {
    auto x = factor();
    for (;;) {
      if (eat('*'))
        x = x * factor();
      else if (eat('/'))
        x = x / factor();
      else
        return x;
    }
  }
  PadicElement factor() {
    if (eat('-')) return -factor();
    auto x = base();
    if (eat('^')) {
      const bool negative = eat('-');
      const long long n = integer();
      x = x.pow(negative ? -n : n);
    }
    return x;
  }
  PadicElement base() {
    skip();
    if (eat('(')) {
      auto x = expr();
      if (!eat(')')) fail("expected ')'");
      return x;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return PadicElement::pi(F_);
    }
    if (s_.compare(pos_, 2, "u(") == 0) {
      pos_ += 2;
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string digits = s_.substr(start, pos_ - start);
      if (!eat(')') || digits.empty()) fail("expected u(<digits>)");
      std::vector<int> ds;
      for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        const int d = *it - '0';
        if (d >= F_->p()) fail("digit out of range");
        ds.push_back(d);
      }
      if (static_cast<int>(ds.size()) > F_->f()) fail("too many residue digits");
      return PadicElement::lift(F_, F_->residue_field().from_digits(ds));
    }
    return PadicElement::from_int(F_, integer());
  }

  LocalFieldPtr F_;
  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace

PadicElement parse_element(const LocalFieldPtr& field, const std::string& text) {
  return ElementParser(field, text).parse();
}

// ---------------------------------------------------------------------------
// Unit filtration

int unit_filtration_level(const PadicElement& u) {
  if (u.is_zero() || u.valuation() != 0) throw math_error("unit_filtration_level of a non-unit");
  return u.field()->unit_level(u.unit(), u.relative_precision());
}

Raw unit_factor(const LocalField& F, int m, Fq x) { return F.add(F.one(), F.mul_pi(F.teichmuller(x), m)); }

namespace {

std::vector<UnitFactor> decompose(const LocalField& F, const Raw& u, int cap) {
  const Fq x0 = F.residue(u);
  if (x0 == 0) throw math_error("principal_unit_decomposition of a non-unit");
  Raw r = F.reduce(F.mul(u, F.teichmuller(F.residue_field().inv(x0))), cap);
  std::vector<UnitFactor> out;
  for (;;) {
    const int t = F.unit_level(r, cap);
    if (t >= cap) break;
    const Fq x = F.leading_residue(F.reduce(F.sub(r, F.one()), cap), t);
    out.push_back({t, x});
    r = F.reduce(F.mul(r, F.inverse(unit_factor(F, t, x))), cap);
  }
  return out;
}

std::optional<Raw> pth_root_raw(const LocalField& F, const Raw& u, int cap) {
  const FiniteField& k = F.residue_field();
  const int p = F.p(), e = F.e();
  const Rational ep = F.eprime();
  const Fq x0 = F.residue(u);
  if (x0 == 0) throw math_error("pth_root_unit of a non-unit");
  const int full = e * F.storage_digits();
  const Raw p_unit_inv = F.inverse(F.div_pi_power(F.from_int(p), e, full));
  Raw y = F.teichmuller(k.frobenius_inverse(x0));
  for (int it = 0; it <= 4 * cap + 4; ++it) {
    const Raw r = F.reduce(F.mul(u, F.inverse(F.pow(y, p))), cap);
    const int t = F.unit_level(r, cap);
    if (t >= cap) return y;
    const Raw r1 = F.reduce(F.sub(r, F.one()), cap);
    if (t > ep) {
      const Raw z = F.mul(F.div_pi_power(r1, e, cap), p_unit_inv);
      y = F.mul(y, F.add(F.one(), z));
    } else if (t == ep) {
      const Fq x = F.leading_residue(r1, t);
      std::optional<Fq> c;
      for (int cand = 0; cand < k.q() && !c; ++cand) {
        const Fq cc = static_cast<Fq>(cand);
        if (k.add(k.pow(cc, p), k.mul(F.a(), cc)) == x) c = cc;
      }
      if (!c) return std::nullopt;
      y = F.mul(y, unit_factor(F, e / (p - 1), *c));
    } else if (t % p != 0) {
      return std::nullopt;
    } else {
      const Fq x = F.leading_residue(r1, t);
      y = F.mul(y, unit_factor(F, t / p, k.frobenius_inverse(x)));
    }
  }
  throw precision_error("p-th root iteration did not terminate");
}

}  // namespace

std::vector<UnitFactor> principal_unit_decomposition(const LocalField& field, const Raw& u) {
  return decompose(field, u, field.precision());
}

std::vector<UnitFactor> principal_unit_decomposition(const PadicElement& u) {
  if (u.is_zero() || u.valuation() != 0) throw math_error("principal_unit_decomposition of a non-unit");
  return decompose(*u.field(), u.unit(), u.relative_precision());
}

Fq eprime_constant_a(const LocalField& field) { return field.a(); }

std::optional<PadicElement> zeta_p(const LocalFieldPtr& field) {
  const auto& F = *field;
  const int p = F.p(), e = F.e(), N = F.precision();
  if (p == 2) return PadicElement::from_int(field, -1);
  if (e % (p - 1) != 0) return std::nullopt;
  const int s = e / (p - 1);
  const FiniteField& k = F.residue_field();
  const Fq target = k.neg(F.a());
  std::optional<Fq> w0;
  for (int c = 1; c < k.q() && !w0; ++c)
    if (k.pow(static_cast<Fq>(c), p - 1) == target) w0 = static_cast<Fq>(c);
  if (!w0) return std::nullopt;

  // Root of g(w) = Phi_p(1 + pi^s w) / pi^e lifting w0; g'(w0) = (p-1) w0^{p-2}.
  const int full = e * F.storage_digits();
  const Raw step = F.teichmuller(k.inv(k.mul(k.from_int(p - 1), k.pow(*w0, p - 2))));
  Raw w = F.teichmuller(*w0);
  auto zeta_of = [&](const Raw& ww) { return F.add(F.one(), F.mul_pi(ww, s)); };
  for (int it = 0;; ++it) {
    if (it > 4 * full) throw precision_error("zeta_p lifting did not converge");
    const Raw z = zeta_of(w);
    Raw phi = F.zero(), zk = F.one();
    for (int j = 0; j < p; ++j) {
      phi = F.add(phi, zk);
      zk = F.mul(zk, z);
    }
    const Raw g = F.div_pi_power(phi, e, full);
    if (F.valuation(g, N) >= N) break;
    w = F.sub(w, F.mul(g, step));
  }
  const auto zeta = PadicElement::from_unit(field, 0, zeta_of(w), N);
  if (zeta.pow(p) != PadicElement::one(field) || zeta == PadicElement::one(field))
    throw precision_error("zeta_p failed verification at precision " + std::to_string(N));
  return zeta;
}

Fq step4_multiplier(const LocalFieldPtr& field) {
  const auto zeta = zeta_p(field);
  if (!zeta) throw math_error("K does not contain a primitive p-th root of unity");
  const int ep = field->eprime_int();
  const auto w = (PadicElement::one(field) - *zeta).pow(field->p());
  if (w.valuation() != ep) throw precision_error("v((1 - zeta)^p) differs from e'");
  return field->residue(w.unit());
}

std::optional<Raw> pth_root_unit(const LocalField& field, const Raw& u) {
  return pth_root_raw(field, u, field.precision());
}

std::optional<PadicElement> pth_root(const PadicElement& x) {
  const auto& field = x.field();
  const int p = field->p();
  if (x.is_zero()) return PadicElement::zero(field, x.absolute_precision() / p);
  const int v = x.valuation();
  if (v % p != 0) return std::nullopt;
  const int rel = x.relative_precision();
  if (rel <= field->e()) throw precision_error("too few digits to take a p-th root");
  const auto y = pth_root_raw(*field, x.unit(), rel);
  if (!y) return std::nullopt;
  return PadicElement::from_unit(field, v / p, *y, rel - field->e());
}

std::optional<PadicElement> pth_power_test(const PadicElement& u, int m) {
  const auto& F = *u.field();
  if (unit_filtration_level(u) != m) throw math_error("pth_power_test: unit is not at level " + std::to_string(m));
  const Rational ep = F.eprime();
  const long long needed = Rational{2 * ep.num, ep.den}.floor() + F.e() + 1;
  if (u.relative_precision() < needed)
    throw precision_error("pth_power_test needs " + std::to_string(needed) + " digits; raise the precision");
  auto root = pth_root(u);
  if (!root && m > ep) throw math_error("unit of level above e' is not a p-th power");
  return root;
}

Raw random_raw(const LocalField& field, std::mt19937_64& rng) {
  Raw r;
  std::uniform_int_distribution<std::int64_t> dist(0, field.modulus() - 1);
  for (int k = 0; k < field.dim(); ++k) r.c[k] = dist(rng);
  return field.reduce(r, field.precision());
}

PadicElement random_principal_unit(const LocalFieldPtr& field, int m, std::mt19937_64& rng) {
  const auto& F = *field;
  const Raw u = F.add(F.one(), F.mul_pi(random_raw(F, rng), m));
  return PadicElement::from_raw(field, u, F.precision());
}

}  // namespace bklab
