#include "bklab/milnor.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

namespace bklab {

namespace {

int mod_p(long long n, int p) { return static_cast<int>(((n % p) + p) % p); }

int inverse_mod_p(int a, int p) {
  for (int x = 1; x < p; ++x)
    if (a * x % p == 1) return x;
  throw math_error("no inverse mod p");
}

// Levels m with m <= e'; factors above are p-th powers.
bool at_or_below_eprime(const LocalField& F, int m) { return !(m > F.eprime()); }

std::vector<UnitFactor> low_factors(const LocalField& F, const Raw& u) {
  std::vector<UnitFactor> out;
  for (const auto& f : principal_unit_decomposition(F, u))
    if (at_or_below_eprime(F, f.level)) out.push_back(f);
  return out;
}

// x = pi^v [r] u with u principal, known to `rel` digits.
struct Split {
  int v = 0;
  Fq residue = 0;
  Raw principal;
  int rel = 0;
};

Split split(const PadicElement& x) {
  const auto& F = *x.field();
  if (x.is_zero()) throw math_error("symbol entry is zero at precision " + std::to_string(x.absolute_precision()));
  const int need = static_cast<int>(F.eprime().floor()) + 1;
  if (x.relative_precision() < need)
    throw precision_error("undecided at precision " + std::to_string(F.precision()) + ": entry " + x.to_string() +
                          " has " + std::to_string(x.relative_precision()) + " digits, need " + std::to_string(need));
  Split s;
  s.v = x.valuation();
  s.residue = F.residue(x.unit());
  s.principal = F.reduce(F.mul(x.unit(), F.teichmuller(F.residue_field().inv(s.residue))), x.relative_precision());
  s.rel = x.relative_precision();
  return s;
}

PadicElement unit_element(const LocalFieldPtr& F, const Raw& u, int rel) { return PadicElement::from_unit(F, 0, u, rel); }

std::string factor_string(const LocalField& F, int m, Fq c) {
  return "1+pi^" + std::to_string(m) + "[" + F.residue_field().to_string(c) + "]";
}

}  // namespace

// ---------------------------------------------------------------------------
// SymbolSum

SymbolSum::SymbolSum(LocalFieldPtr field, int q) : field_(std::move(field)), q_(q) {
  if (q < 1) throw math_error("symbol sums need q >= 1");
}

SymbolSum& SymbolSum::add(std::vector<PadicElement> entries, long long coefficient) {
  if (static_cast<int>(entries.size()) != q_) throw math_error("symbol needs exactly q entries");
  for (const auto& e : entries) {
    if (e.is_zero()) throw math_error("symbol entry has no determined valuation");
    if (e.field()->name() != field_->name()) throw math_error("symbol entry from a different field");
  }
  terms_.push_back({coefficient, std::move(entries)});
  return *this;
}

SymbolSum SymbolSum::operator+(const SymbolSum& o) const {
  if (o.q_ != q_) throw math_error("adding symbol sums of different degree");
  SymbolSum r = *this;
  if (!r.field_) r.field_ = o.field_;
  for (const auto& t : o.terms_) r.terms_.push_back(t);
  return r;
}

SymbolSum SymbolSum::operator-(const SymbolSum& o) const { return *this + o.scaled(-1); }

SymbolSum SymbolSum::scaled(long long c) const {
  SymbolSum r = *this;
  for (auto& t : r.terms_) t.coefficient *= c;
  return r;
}

std::string SymbolSum::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    long long c = t.coefficient;
    if (i > 0) out += c < 0 ? " - " : " + ";
    else if (c < 0) out += "-";
    c = c < 0 ? -c : c;
    if (c != 1) out += std::to_string(c);
    out += "{";
    for (std::size_t j = 0; j < t.entries.size(); ++j) {
      if (j > 0) out += ", ";
      const auto& e = t.entries[j];
      out += e.to_string();
    }
    out += "}";
  }
  return out;
}

SymbolSum parse_symbol_sum(const LocalFieldPtr& field, int q, const std::string& text) {
  SymbolSum s(field, q);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  bool first = true;
  for (;;) {
    skip();
    if (i >= text.size()) break;
    long long sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      throw math_error("expected + or - between symbols at offset " + std::to_string(i));
    }
    long long coef = 1;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t used = 0;
      coef = std::stoll(text.substr(i), &used);
      i += used;
      skip();
      if (i < text.size() && text[i] == '*') ++i;
      skip();
    }
    if (i >= text.size() || text[i] != '{') throw math_error("expected '{' at offset " + std::to_string(i));
    const std::size_t close = text.find('}', i);
    if (close == std::string::npos) throw math_error("unterminated symbol");
    const std::string body = text.substr(i + 1, close - i - 1);
    std::vector<PadicElement> entries;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= body.size(); ++k) {
      if (k < body.size() && body[k] == '(') ++depth;
      if (k < body.size() && body[k] == ')') --depth;
      if (k == body.size() || (body[k] == ',' && depth == 0)) {
        entries.push_back(parse_element(field, body.substr(start, k - start)));
        start = k + 1;
      }
    }
    s.add(std::move(entries), sign * coef);
    i = close + 1;
    first = false;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Lifting maps

ResidueLift teichmuller_lift(const LocalFieldPtr& field) {
  return [field](Fq x) { return field->teichmuller(x); };
}

ResidueLift naive_lift(const LocalFieldPtr& field) {
  return [field](Fq x) { return field->naive_lift(x); };
}

SymbolSum rho_0(const LocalFieldPtr& field, int q, const std::vector<std::vector<Fq>>& xi,
                const std::vector<std::vector<Fq>>& eta, const std::optional<PadicElement>& prime,
                const ResidueLift& lift) {
  const auto& F = *field;
  const ResidueLift L = lift ? lift : teichmuller_lift(field);
  const PadicElement pi = prime ? *prime : PadicElement::pi(field);
  if (pi.valuation() != 1) throw math_error("replacement prime element has valuation " + std::to_string(pi.valuation()));
  auto lifted = [&](Fq x) {
    if (x == 0) throw math_error("rho_0 needs nonzero residue entries");
    return unit_element(field, L(x), F.precision());
  };
  SymbolSum s(field, q);
  for (const auto& t : xi) {
    if (static_cast<int>(t.size()) != q) throw math_error("rho_0: xi term needs q residues");
    std::vector<PadicElement> entries;
    for (Fq x : t) entries.push_back(lifted(x));
    s.add(std::move(entries));
  }
  for (const auto& t : eta) {
    if (static_cast<int>(t.size()) != q - 1) throw math_error("rho_0: eta term needs q - 1 residues");
    std::vector<PadicElement> entries;
    for (Fq y : t) entries.push_back(lifted(y));
    entries.push_back(pi);
    s.add(std::move(entries));
  }
  return s;
}

SymbolSum rho_m(const LocalFieldPtr& field, int q, int m, const std::vector<DecomposableTerm>& w1,
                const std::vector<DecomposableTerm>& w2, const ResidueLift& lift) {
  const auto& F = *field;
  if (m < 1 || m > F.precision() - 1)
    throw math_error("rho_m needs 1 <= m <= " + std::to_string(F.precision() - 1) + ", got " + std::to_string(m));
  const ResidueLift L = lift ? lift : teichmuller_lift(field);
  SymbolSum s(field, q);
  auto one_plus = [&](Fq x) { return unit_element(field, F.add(F.one(), F.mul_pi(L(x), m)), F.precision()); };
  auto ys_of = [&](const DecomposableTerm& t, std::size_t n) {
    if (t.ys.size() != n) throw math_error("rho_m: wrong number of logarithmic factors");
    std::vector<PadicElement> out;
    for (Fq y : t.ys) {
      if (y == 0) throw math_error("rho_m needs nonzero y entries");
      out.push_back(unit_element(field, L(y), F.precision()));
    }
    return out;
  };
  for (const auto& t : w1) {
    auto entries = ys_of(t, static_cast<std::size_t>(q - 1));
    if (t.x == 0) continue;
    entries.insert(entries.begin(), one_plus(t.x));
    s.add(std::move(entries));
  }
  for (const auto& t : w2) {
    if (q < 2) throw math_error("rho_m: the second summand is zero for q = 1");
    auto entries = ys_of(t, static_cast<std::size_t>(q - 2));
    if (t.x == 0) continue;
    entries.insert(entries.begin(), one_plus(t.x));
    entries.push_back(PadicElement::pi(field));
    s.add(std::move(entries));
  }
  return s;
}

namespace {

std::vector<DecomposableTerm> decomposable_terms(const DifferentialForm& w, int degree) {
  if (w.is_zero() || degree < 0) return {};
  if (!w.field()->is_finite()) throw math_error("rho_m from forms needs a finite residue field");
  if (w.degree() != degree) throw math_error("rho_m: form of degree " + std::to_string(w.degree()) + ", expected " +
                                             std::to_string(degree));
  // Over a finite field only degree 0 survives.
  if (degree > 0) return {};
  return {DecomposableTerm{w.coefficient(0).constant_value(), {}}};
}

}  // namespace

SymbolSum rho_m(const LocalFieldPtr& field, int q, int m, const DifferentialForm& w1, const DifferentialForm& w2,
                const ResidueLift& lift) {
  return rho_m(field, q, m, decomposable_terms(w1, q - 1), decomposable_terms(w2, q - 2), lift);
}

// ---------------------------------------------------------------------------
// normalize

SymbolSum normalize(const SymbolSum& s) {
  const auto& field = s.field();
  SymbolSum out(field, s.q());
  if (!field) return out;
  const auto& F = *field;
  const int p = F.p();
  const int N = F.precision();
  const auto minus_one = split(PadicElement::from_int(field, -1));

  if (s.q() == 1) {
    long long v = 0;
    Raw u = F.one();
    int rel = N;
    for (const auto& t : s.terms()) {
      const auto x = split(t.entries[0]);
      const int c = mod_p(t.coefficient, p);
      v += static_cast<long long>(c) * x.v;
      u = F.mul(u, F.pow(x.principal, c));
      rel = std::min(rel, x.rel);
    }
    if (mod_p(v, p) != 0) out.add({PadicElement::pi(field)}, mod_p(v, p));
    const auto ue = unit_element(field, u, rel);
    if (ue != PadicElement::one(field)) out.add({ue});
    return out;
  }
  if (s.q() != 2) throw math_error("normalize covers q <= 2");

  // {U, pi} collected multiplicatively; unit pairs with coefficients.
  Raw U = F.one();
  int rel = N;
  std::vector<std::tuple<PadicElement, PadicElement, int>> pairs;
  for (const auto& t : s.terms()) {
    const auto& a = t.entries[0];
    const auto& b = t.entries[1];
    if ((a + b).is_zero() || (a + b) == PadicElement::one(field)) continue;  // {x, -x} and {x, 1 - x}
    const int c = mod_p(t.coefficient, p);
    if (c == 0) continue;
    const auto sa = split(a), sb = split(b);
    rel = std::min({rel, sa.rel, sb.rel});
    // vb {u_a, pi} - va {u_b, pi} + va vb {-1, pi}
    U = F.mul(U, F.pow(sa.principal, mod_p(c * static_cast<long long>(sb.v), p)));
    U = F.mul(U, F.pow(sb.principal, mod_p(-c * static_cast<long long>(sa.v), p)));
    U = F.mul(U, F.pow(minus_one.principal, mod_p(c * static_cast<long long>(sa.v) * sb.v, p)));
    const auto ua = unit_element(field, sa.principal, sa.rel), ub = unit_element(field, sb.principal, sb.rel);
    if (ua == PadicElement::one(field) || ub == PadicElement::one(field)) continue;
    bool merged = false;
    for (auto& [x, y, k] : pairs)
      if (x == ua && y == ub) {
        k = (k + c) % p;
        merged = true;
        break;
      }
    if (!merged) pairs.emplace_back(ua, ub, c);
  }
  const auto Ue = unit_element(field, U, rel);
  if (Ue != PadicElement::one(field)) out.add({Ue, PadicElement::pi(field)});
  std::sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) {
    return std::make_pair(std::get<0>(l).to_string(), std::get<1>(l).to_string()) <
           std::make_pair(std::get<0>(r).to_string(), std::get<1>(r).to_string());
  });
  for (const auto& [x, y, k] : pairs)
    if (k != 0) out.add({x, y}, k);
  return out;
}

// ---------------------------------------------------------------------------
// Filtration engine

namespace {

constexpr std::size_t kAuditCap = 200;

struct Audit {
  std::vector<std::string> lines;
  std::size_t dropped = 0;
  void add(std::string s) {
    if (lines.size() < kAuditCap)
      lines.push_back(std::move(s));
    else
      ++dropped;
  }
  std::vector<std::string> finish() {
    if (dropped > 0) lines.push_back("... " + std::to_string(dropped) + " further rewrite steps");
    return std::move(lines);
  }
};

TruncationWindow default_window() { return TruncationWindow{}; }

// Degree 2 engine over principal-unit factors.
struct Q2Engine {
  const LocalField& F;
  int p;
  Audit& audit;
  std::map<std::pair<int, Fq>, int> pi_terms;                      // {1+pi^m[c], pi}
  std::map<std::tuple<int, Fq, int, Fq>, int> unit_terms;          // {1+pi^i[a], 1+pi^j[b]}
  std::vector<UnitFactor> minus_one;

  Q2Engine(const LocalField& field, Audit& a) : F(field), p(field.p()), audit(a) {
    Raw m1 = F.from_int(-1);
    m1 = F.mul(m1, F.teichmuller(F.residue_field().inv(F.residue(m1))));
    minus_one = low_factors(F, m1);
  }

  void add_pi(int m, Fq c, int n) {
    n = mod_p(n, p);
    if (n == 0 || c == 0 || !at_or_below_eprime(F, m)) return;
    auto& slot = pi_terms[{m, c}];
    slot = (slot + n) % p;
    if (slot == 0) pi_terms.erase({m, c});
  }
  void add_pi_unit(const Raw& u, int n) {
    for (const auto& f : low_factors(F, u)) add_pi(f.level, f.residue, n);
  }
  void add_unit(int i, Fq a, int j, Fq b, int n) {
    n = mod_p(n, p);
    if (n == 0 || a == 0 || b == 0 || !at_or_below_eprime(F, i) || !at_or_below_eprime(F, j)) return;
    auto key = std::make_tuple(i, a, j, b);
    if (std::make_pair(i, a) > std::make_pair(j, b)) {
      key = std::make_tuple(j, b, i, a);
      n = mod_p(-n, p);
    }
    auto& slot = unit_terms[key];
    slot = (slot + n) % p;
    if (slot == 0) unit_terms.erase(key);
  }

  void load(const SymbolSum& normal) {
    for (const auto& t : normal.terms()) {
      const auto a = split(t.entries[0]), b = split(t.entries[1]);
      const int c = mod_p(t.coefficient, p);
      // normalize leaves {u, pi} and {u, u'} with u, u' principal.
      if (b.v == 1 && a.v == 0) {
        add_pi_unit(a.principal, c);
        continue;
      }
      if (a.v != 0 || b.v != 0) throw math_error("internal: unexpected entry shape after normalize");
      for (const auto& fa : low_factors(F, a.principal))
        for (const auto& fb : low_factors(F, b.principal)) add_unit(fa.level, fa.residue, fb.level, fb.residue, c);
    }
  }

  // Push one principal x principal term to strictly larger levels.
  void push_unit(int i, Fq a, int j, Fq b, int n) {
    // 1 - x = 1 + pi^i [a], 1 - y = 1 + pi^j [b], -x = pi^i [a].
    const Raw x = F.neg(F.mul_pi(F.teichmuller(a), i));
    const Raw y = F.neg(F.mul_pi(F.teichmuller(b), j));
    const Raw s = F.sub(F.one(), F.mul(x, y));
    const auto fs = low_factors(F, s);
    audit.add("push {" + factor_string(F, i, a) + ", " + factor_string(F, j, b) + "} -> {1-x, 1-xy} + {1-xy, 1-y} + {1-xy, -x}, 1-xy has " +
              std::to_string(fs.size()) + " factor(s) at levels >= " + std::to_string(i + j));
    for (const auto& f : fs) {
      add_unit(i, a, f.level, f.residue, n);
      add_unit(f.level, f.residue, j, b, n);
      add_pi(f.level, f.residue, n * i);
    }
  }

  void push_pi(int m, Fq c, int n) {
    const auto& k = F.residue_field();
    if (m % p != 0) {
      // {u, -x} = 0 with -x = pi^m [-c]... : {u, pi} = -m^{-1} {u, -1} since {u, [c]} = 0.
      audit.add("{" + factor_string(F, m, c) + ", pi} = -(1/" + std::to_string(m % p) + "){" + factor_string(F, m, c) +
                ", -1}  (from {1-x, x} = 0)");
      const int coef = mod_p(-static_cast<long long>(n) * inverse_mod_p(m % p, p), p);
      for (const auto& f : minus_one) add_unit(m, c, f.level, f.residue, coef);
      return;
    }
    // p | m < e': divide by (1 + pi^{m/p} [c^{1/p}])^p.
    const Raw u = unit_factor(F, m, c);
    const Raw r = unit_factor(F, m / p, k.frobenius_inverse(c));
    const Raw rest = F.mul(u, F.inverse(F.pow(r, p)));
    audit.add("{" + factor_string(F, m, c) + ", pi} = {" + factor_string(F, m, c) + " / (" +
              factor_string(F, m / p, k.frobenius_inverse(c)) + ")^p, pi} mod p");
    add_pi_unit(rest, n);
  }

  // Runs to completion; returns the residue s with S = {1 + pi^{e'} [s], pi}
  // modulo the higher filtration, or 0 if nothing remains at e'.
  Fq run() {
    const bool integral = F.eprime_integral();
    const int ep = integral ? F.eprime_int() : -1;
    for (;;) {
      int wu = -1, wp = -1;
      if (!unit_terms.empty()) {
        wu = 1 << 30;
        for (const auto& [key, n] : unit_terms) wu = std::min(wu, std::get<0>(key) + std::get<2>(key));
      }
      auto next_pi = pi_terms.end();
      for (auto it = pi_terms.begin(); it != pi_terms.end(); ++it)
        if (it->first.first != ep) {
          next_pi = it;
          wp = it->first.first;
          break;
        }
      if (wu < 0 && wp < 0) break;
      if (wu >= 0 && (wp < 0 || wu <= wp)) {
        for (auto it = unit_terms.begin(); it != unit_terms.end(); ++it) {
          const auto [i, a, j, b] = it->first;
          if (i + j != wu) continue;
          const int n = it->second;
          unit_terms.erase(it);
          push_unit(i, a, j, b, n);
          break;
        }
      } else {
        const auto [m, c] = next_pi->first;
        const int n = next_pi->second;
        pi_terms.erase(next_pi);
        push_pi(m, c, n);
      }
    }
    const auto& k = F.residue_field();
    Fq s = 0;
    for (const auto& [key, n] : pi_terms) s = k.add(s, k.mul(key.second, k.from_int(n)));
    return s;
  }
};

FiltrationReport report_q1(const SymbolSum& normal, int depth);
FiltrationReport report_q2(const SymbolSum& normal, int depth);

FiltrationReport report_q1(const SymbolSum& normal, int depth) {
  const auto& field = normal.field();
  const auto& F = *field;
  const int p = F.p();
  const auto res = F.residue_ring();
  FiltrationReport r;
  r.q = 1;
  r.precision = F.precision();
  Audit audit;
  long long v = 0;
  Raw u = F.one();
  int rel = F.precision();
  for (const auto& t : normal.terms()) {
    const auto x = split(t.entries[0]);
    v += t.coefficient * x.v;
    u = F.mul(u, F.pow(x.principal, mod_p(t.coefficient, p)));
    rel = std::min(rel, x.rel);
  }
  if (mod_p(v, p) != 0) {
    const GradedModel model(1, 0, res, F.ramification());
    r.level = 0;
    r.model = model;
    // Teichmueller residue contributes dlog of a constant, zero over a finite field.
    r.graded = GradedClass::of(model, dlog(ResidueElement::one(res)),
                               DifferentialForm::function(ResidueElement::constant(res, F.residue_field().from_int(v))));
    audit.add("valuation " + std::to_string(mod_p(v, p)) + " mod p: level 0, pi-component");
    r.audit = audit.finish();
    return r;
  }
  for (;;) {
    const auto fs = low_factors(F, F.reduce(u, rel));
    if (fs.empty()) {
      audit.add("unit part is 1 modulo levels > e' (p-th powers): trivial");
      r.trivial = true;
      break;
    }
    const auto [m, x] = fs.front();
    const GradedModel model(1, m, res, F.ramification());
    const auto form = DifferentialForm::function(ResidueElement::constant(res, x));
    if (model.regime() == Regime::prime_to_p) {
      audit.add("leading factor " + factor_string(F, m, x) + ", p does not divide m");
      r.level = m;
      r.model = model;
      r.graded = GradedClass::of(model, form);
      break;
    }
    if (model.regime() == Regime::at_eprime) {
      if (model.in_quotient_subspace(form, 0, default_window())) {
        audit.add("leading factor " + factor_string(F, m, x) + " at e' lies in (1+aC)Z_1: p-th power times U_{e'+1}: trivial");
        r.trivial = true;
      } else {
        audit.add("leading factor " + factor_string(F, m, x) + " at e' outside (1+aC)Z_1");
        r.level = m;
        r.model = model;
        r.graded = GradedClass::of(model, form);
      }
      break;
    }
    // p | m < e'
    const auto& k = F.residue_field();
    const Raw root = unit_factor(F, m / p, k.frobenius_inverse(x));
    audit.add("leading factor " + factor_string(F, m, x) + " with p | m: divide by (" +
              factor_string(F, m / p, k.frobenius_inverse(x)) + ")^p");
    u = F.mul(u, F.inverse(F.pow(root, p)));
  }
  r.audit = audit.finish();
  (void)depth;
  return r;
}

FiltrationReport report_q2(const SymbolSum& normal, int depth) {
  const auto& field = normal.field();
  const auto& F = *field;
  const auto res = F.residue_ring();
  FiltrationReport r;
  r.q = 2;
  r.precision = F.precision();
  Audit audit;
  Q2Engine engine(F, audit);
  engine.load(normal);
  const Fq s = engine.run();
  if (!F.eprime_integral() || s == 0) {
    audit.add("every term pushed above e' (p-th power entries): trivial");
    r.trivial = true;
  } else {
    const auto model = GradedModel::at_eprime(2, res, F.ramification());
    const auto form = DifferentialForm::function(ResidueElement::constant(res, s));
    if (model.in_quotient_subspace(form, 1, default_window())) {
      audit.add("residue " + F.residue_field().to_string(s) + " at e' lies in (1+aC)Z_1: trivial");
      r.trivial = true;
    } else {
      audit.add("surviving term {" + factor_string(F, F.eprime_int(), s) + ", pi} at e'");
      r.level = F.eprime_int();
      r.model = model;
      r.graded = GradedClass::of(model, DifferentialForm::zero(res, 1), form);
    }
  }
  r.audit = audit.finish();
  (void)depth;
  return r;
}

FiltrationReport report_any(const SymbolSum& s) {
  const SymbolSum normal = normalize(s);
  if (s.q() == 1) return report_q1(normal, 0);
  return report_q2(normal, 0);
}

// The cached validation of the pushing identity for a field with zeta_p.
const PushingValidation& pushing_status(const LocalFieldPtr& field) {
  static std::mutex mu;
  static std::map<std::string, PushingValidation> cache;
  const std::string key = field->descriptor().to_json();
  {
    std::lock_guard<std::mutex> lock(mu);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto oracle = shared_hilbert_oracle(field);
  auto v = validate_pushing_identity(*oracle, 1000, 20240917);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(v)).first->second;
}

}  // namespace

std::string FiltrationReport::summary() const {
  if (trivial) return "trivial at precision " + std::to_string(precision);
  std::string out = "level " + std::to_string(level);
  if (model) {
    out += " in " + model->describe() + ": (" + graded.first.to_string() + ", " + graded.second.to_string() + ")";
  }
  return out;
}

FiltrationReport filtration_report(const SymbolSum& s) {
  if (!s.field()) throw math_error("filtration_report of an unbound symbol sum");
  if (s.q() != 1 && s.q() != 2)
    throw math_error("filtration_report covers q <= 2; no zero test exists for q = " + std::to_string(s.q()));
  const auto& field = s.field();
  std::string pushing_note;
  if (s.q() == 2) {
    if (zeta_p(field) && (field->p() == 2 || field->p() == 3)) {
      const auto& v = pushing_status(field);
      if (!v.ok())
        throw math_error("pushing identity failed validation against the Hilbert oracle: " + v.counterexample);
      pushing_note = "pushing identity validated on " + std::to_string(v.pairs) + " pairs against the Hilbert oracle";
    } else {
      pushing_note = "pushing identity not oracle-validated here (no p-th roots of unity in K)";
    }
  }
  FiltrationReport r = report_any(s);
  if (!pushing_note.empty()) r.audit.insert(r.audit.begin(), pushing_note);
  if (r.trivial) {
    r.audit.push_back("triviality above e' uses: units of level > e' are p-th powers");
    return r;
  }
  // Subtract the lift of the reported class; the rest must sit strictly higher.
  SymbolSum back(field, s.q());
  const auto& k = field->residue_field();
  if (r.level == 0) {
    back = rho_0(field, 1, {}, std::vector<std::vector<Fq>>(static_cast<std::size_t>(
                                  mod_p(r.graded.second.coefficient(0).constant_value(), field->p())),
                              std::vector<Fq>{}));
  } else if (s.q() == 1) {
    back = rho_m(field, 1, r.level, r.graded.first, DifferentialForm{});
  } else {
    back = rho_m(field, 2, r.level, DifferentialForm::zero(field->residue_ring(), 1), r.graded.second);
  }
  (void)k;
  const auto rest = report_any(s - back);
  if (!rest.trivial && rest.level <= r.level)
    throw math_error("internal: residue after subtracting the graded lift stays at level " + std::to_string(rest.level));
  r.audit.push_back("verified: S - rho(class) has level > " + std::to_string(r.level));
  return r;
}

PushingValidation validate_pushing_identity(const HilbertOracle& oracle, std::size_t pairs, std::uint64_t seed) {
  const auto& field = oracle.field();
  const auto& F = *field;
  const int p = F.p(), L = oracle.classes().depth();
  std::mt19937_64 rng(seed);
  PushingValidation v;
  const auto one = PadicElement::one(field);
  auto random_in_ideal = [&] {
    auto x = PadicElement::from_raw(field, random_raw(F, rng), F.precision());
    return x * PadicElement::pi(field).pow(1 + static_cast<int>(rng() % 3));
  };
  for (std::size_t attempts = 0; v.pairs < pairs && attempts < 20 * pairs; ++attempts) {
    const auto x = random_in_ideal(), y = random_in_ideal();
    if (x.is_zero() || y.is_zero()) continue;
    const auto a = one - x, b = one - y, s = one - x * y, mx = -x;
    bool thin = false;
    for (const auto& e : {a, b, s, mx}) thin = thin || e.is_zero() || e.relative_precision() < L;
    if (thin) continue;
    ++v.pairs;
    const int lhs = oracle.symbol(a, b).exponent;
    const int rhs = (oracle.symbol(a, s).exponent + oracle.symbol(s, b).exponent + oracle.symbol(s, mx).exponent) % p;
    if (lhs != rhs) {
      if (v.mismatches == 0) v.counterexample = "x = " + x.to_string() + ", y = " + y.to_string();
      ++v.mismatches;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sampled properties

namespace {

PadicElement random_nonzero(const LocalFieldPtr& F, std::mt19937_64& rng) {
  for (;;) {
    const auto x = PadicElement::from_raw(F, random_raw(*F, rng), F->precision());
    if (!x.is_zero() && x.relative_precision() > F->eprime().floor())
      return x * PadicElement::pi(F).pow(static_cast<int>(rng() % 3));
  }
}

int oracle_value(const HilbertOracle& H, const SymbolSum& s) {
  int v = 0;
  const int p = H.field()->p();
  for (const auto& t : s.terms()) v = (v + mod_p(t.coefficient, p) * H.symbol(t.entries[0], t.entries[1]).exponent) % p;
  return v;
}

}  // namespace

SampleCheck oracle_agreement(const HilbertOracle& oracle, std::size_t samples, std::uint64_t seed) {
  const auto& F = oracle.field();
  std::mt19937_64 rng(seed);
  SampleCheck c;
  for (std::size_t i = 0; i < samples; ++i) {
    SymbolSum s(F, 2);
    s.add({random_nonzero(F, rng), random_nonzero(F, rng)});
    if (i % 3 == 0) s.add({random_nonzero(F, rng), random_nonzero(F, rng)}, 1 + static_cast<long long>(rng() % 2));
    const auto r = filtration_report(s);
    const int v = oracle_value(oracle, s);
    ++c.samples;
    if (v != 0) ++c.nontrivial;
    if (r.trivial != (v == 0) || oracle_value(oracle, normalize(s)) != v) {
      if (c.failures == 0)
        c.witness = s.to_string() + ": engine " + r.summary() + ", oracle zeta^" + std::to_string(v);
      ++c.failures;
    }
  }
  return c;
}

SampleCheck degree_one_agreement(const PowerClassTable& table, std::size_t samples, std::uint64_t seed) {
  const auto& F = table.field();
  std::mt19937_64 rng(seed);
  SampleCheck c;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = random_nonzero(F, rng);
    SymbolSum s(F, 1);
    s.add({x});
    const auto r = filtration_report(s);
    const auto cls = table.class_of(x);
    ++c.samples;
    if (cls != std::vector<int>(cls.size(), 0)) ++c.nontrivial;
    // Level 0 exactly when the valuation slot is nonzero (finite residue field is perfect).
    const bool ok = r.trivial == (table.pack(cls) == 0) && (r.trivial || (r.level == 0) == (cls[0] != 0));
    if (!ok) {
      if (c.failures == 0) c.witness = "{" + x.to_string() + "}: engine " + r.summary();
      ++c.failures;
    }
  }
  return c;
}

SampleCheck degree_two_vanishing(const LocalFieldPtr& field, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SampleCheck c;
  for (std::size_t i = 0; i < samples; ++i) {
    SymbolSum s(field, 2);
    s.add({random_nonzero(field, rng), random_nonzero(field, rng)});
    const auto r = filtration_report(s);
    ++c.samples;
    if (!r.trivial) {
      if (c.failures == 0) c.witness = s.to_string() + ": engine " + r.summary();
      ++c.failures;
    }
  }
  return c;
}

SampleCheck lift_independence(const LocalFieldPtr& field, std::size_t samples, std::uint64_t seed) {
  const auto& F = *field;
  const int top = static_cast<int>(F.eprime().floor());
  std::mt19937_64 rng(seed);
  SampleCheck c;
  for (std::size_t i = 0; i < samples; ++i) {
    const int m = 1 + static_cast<int>(rng() % top);
    const auto x = static_cast<Fq>(1 + rng() % (F.q() - 1));
    ++c.samples;
    for (int q : {1, 2}) {
      const std::vector<DecomposableTerm> w{{x, {}}};
      const auto teich = q == 1 ? rho_m(field, 1, m, w, {}) : rho_m(field, 2, m, {}, w);
      const auto naive = q == 1 ? rho_m(field, 1, m, w, {}, naive_lift(field)) : rho_m(field, 2, m, {}, w, naive_lift(field));
      const auto r = filtration_report(teich - naive);
      if (!(r.trivial || r.level > m)) {
        if (c.failures == 0)
          c.witness = "q=" + std::to_string(q) + " m=" + std::to_string(m) + " x=" + std::to_string(x) + ": " + r.summary();
        ++c.failures;
        break;
      }
    }
  }
  return c;
}

SampleCheck prime_dependence(const LocalFieldPtr& field, std::size_t samples, std::uint64_t seed) {
  const auto& F = *field;
  std::mt19937_64 rng(seed);
  SampleCheck c;
  for (std::size_t i = 0; i < samples; ++i) {
    auto u = random_nonzero(field, rng);
    u = u * PadicElement::pi(field).pow(-u.valuation());
    const auto prime = u * PadicElement::pi(field);
    const auto x = static_cast<Fq>(1 + rng() % (F.q() - 1));
    ++c.samples;
    std::string bad;
    // xi-part unchanged.
    if (!filtration_report(rho_0(field, 1, {{x}}, {}, prime) - rho_0(field, 1, {{x}}, {})).trivial) bad = "xi-part moved";
    // eta-part moves by {u}.
    SymbolSum us(field, 1);
    us.add({u});
    const auto expect = filtration_report(us);
    const auto diff = filtration_report(rho_0(field, 1, {}, {{}}, prime) - rho_0(field, 1, {}, {{}}));
    if (diff.trivial != expect.trivial || (!diff.trivial && diff.level != expect.level)) bad = "eta-part moved by " + diff.summary();
    const auto sum = filtration_report(rho_0(field, 1, {}, {{}}, prime) - rho_0(field, 1, {}, {{}}) - us);
    if (!sum.trivial) bad = "difference minus {u} is " + sum.summary();
    // Degree 2: {y, u pi} - {y, pi} = {y, u} with y a Teichmueller unit, a p-th power.
    if (!filtration_report(rho_0(field, 2, {}, {{x}}, prime) - rho_0(field, 2, {}, {{x}})).trivial) bad = "q=2 eta-part moved";
    if (!bad.empty()) {
      if (c.failures == 0) c.witness = "u = " + u.to_string() + ": " + bad;
      ++c.failures;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// proposition_check

bool PropositionReport::pass() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseOutcome& c) { return c.pass; });
}

namespace {
constexpr int kWellDefinedSamples = 50;
}

PropositionReport proposition_check(const LocalFieldPtr& field, int q, std::uint64_t seed) {
  if (q != 1 && q != 2) throw math_error("proposition_check covers q in {1, 2}");
  const auto& F = *field;
  const auto res = F.residue_ring();
  const auto& k = F.residue_field();
  const int p = F.p();
  const int top = static_cast<int>(F.eprime().ceil()) + 1;
  const auto window = default_window();
  std::mt19937_64 rng(seed);
  PropositionReport rep;
  rep.field = F.name();
  rep.q = q;

  auto constant = [&](Fq c) { return DifferentialForm::function(ResidueElement::constant(res, c)); };
  auto rho = [&](int m, const DifferentialForm& w) {
    if (m == 0) return rho_0(field, q, {}, {std::vector<Fq>(q - 1, 1)});
    return q == 1 ? rho_m(field, 1, m, w, DifferentialForm{}) : rho_m(field, 2, m, DifferentialForm::zero(res, 1), w);
  };
  auto level_above = [](const FiltrationReport& r, int m) { return r.trivial || r.level > m; };

  // Observed graded dimensions.
  std::vector<int> observed(top + 1, 0);
  std::shared_ptr<const HilbertOracle> oracle;
  if (q == 2 && zeta_p(field) && (p == 2 || p == 3)) oracle = shared_hilbert_oracle(field);
  if (q == 1) {
    const auto k1 = k1_brute_oracle(field);
    for (int m = 0; m <= top && m < static_cast<int>(k1.graded_dims.size()); ++m) observed[m] = k1.graded_dims[m];
  } else {
    // V_m = values of rho_{m'} generators for m' >= m; the value group is mu_p(K).
    std::vector<int> span_dim(top + 2, 0);
    bool seen = false;
    for (int m = top; m >= 0; --m) {
      std::vector<SymbolSum> gens;
      if (m == 0) {
        gens.push_back(rho_0(field, 2, {}, {{k.primitive_element()}}));
      } else {
        for (int j = 0; j < k.f(); ++j) gens.push_back(rho(m, constant(k.basis(j))));
      }
      for (const auto& g : gens) {
        if (!oracle) continue;
        MuPValue total{0, p};
        for (const auto& t : g.terms())
          total.exponent = (total.exponent + mod_p(t.coefficient, p) * oracle->symbol(t.entries[0], t.entries[1]).exponent) % p;
        seen = seen || !total.is_trivial();
      }
      span_dim[m] = seen ? 1 : 0;
    }
    for (int m = 0; m <= top; ++m) observed[m] = span_dim[m] - span_dim[m + 1];
  }

  for (int m = 0; m <= top; ++m) {
    const GradedModel model(q, m, res, F.ramification());
    const int dim = static_cast<int>(model.window_dimension(window));
    rep.model_dims.push_back(dim);
    rep.observed_dims.push_back(observed[m]);
    const std::string regime = to_string(model.regime());
    rep.clauses.push_back({"dimension[" + regime + "]", m, dim == observed[m],
                           "model " + model.describe() + " has dim " + std::to_string(dim) + ", observed " +
                               std::to_string(observed[m])});

    // Engine against model on generators.
    bool ok = true;
    std::string detail;
    std::vector<DifferentialForm> gens;
    if (m == 0)
      gens.push_back(DifferentialForm{});
    else
      for (int j = 0; j < k.f(); ++j) gens.push_back(constant(k.basis(j)));
    for (const auto& w : gens) {
      const auto r = filtration_report(rho(m, w));
      if (!r.trivial && r.level < m) {
        ok = false;
        detail = "generator lands at level " + std::to_string(r.level);
        break;
      }
      if (m == 0) {
        const bool nonzero = dim > 0 && q == 1;
        if (nonzero != (!r.trivial && r.level == 0)) {
          ok = false;
          detail = "rho_0 generator: engine " + r.summary();
        }
        continue;
      }
      const GradedClass as_class = q == 1 ? GradedClass::of(model, w) : GradedClass::of(model, DifferentialForm::zero(res, 1), w);
      const bool zero_in_model = !model.summand_present(q == 1 ? 0 : 1) || graded_class_is_zero(model, as_class, window);
      const bool engine_zero = r.trivial || r.level > m;
      if (zero_in_model != engine_zero) {
        ok = false;
        detail = "generator " + w.to_string() + ": model says " + (zero_in_model ? "zero" : "nonzero") + ", engine " +
                 r.summary();
        break;
      }
      if (!engine_zero && !graded_class_eq(model, r.graded, as_class, window)) {
        ok = false;
        detail = "graded class mismatch for " + w.to_string();
        break;
      }
    }
    rep.clauses.push_back({"engine_matches_model[" + regime + "]", m, ok, ok ? "generators agree" : detail});

    if (model.regime() == Regime::divisible_by_p) {
      // Closed forms: all of k in degree 0 over a perfect field.
      int bad = 0;
      for (int i = 0; i < kWellDefinedSamples; ++i) {
        const auto x = static_cast<Fq>(rng() % k.q());
        if (!level_above(filtration_report(rho(m, constant(x))), m)) ++bad;
      }
      rep.clauses.push_back({"well_defined_closed", m, bad == 0,
                             "rho_m on Z_1 lands strictly higher: " + std::to_string(kWellDefinedSamples - bad) + "/" +
                                 std::to_string(kWellDefinedSamples) + " samples"});
    }
    if (model.regime() == Regime::at_eprime) {
      int bad = 0;
      const auto a = ResidueElement::constant(res, F.a());
      for (int i = 0; i < kWellDefinedSamples; ++i) {
        const auto z = constant(static_cast<Fq>(rng() % k.q()));
        const auto twisted = z + cartier(z) * a;
        if (!filtration_report(rho(m, twisted)).trivial) ++bad;
      }
      rep.clauses.push_back({"well_defined_twisted", m, bad == 0,
                             "rho_{e'}((1+aC) Z_1) is trivial: " + std::to_string(kWellDefinedSamples - bad) + "/" +
                                 std::to_string(kWellDefinedSamples) + " samples"});
    }
    if (model.regime() == Regime::above_eprime) {
      int bad = 0;
      for (int i = 0; i < kWellDefinedSamples; ++i)
        if (!filtration_report(rho(m, constant(static_cast<Fq>(rng() % k.q())))).trivial) ++bad;
      rep.clauses.push_back({"vanishing_above_eprime", m, bad == 0,
                             "rho_m for m > e' is trivial: " + std::to_string(kWellDefinedSamples - bad) + "/" +
                                 std::to_string(kWellDefinedSamples) + " samples"});
    }
  }
  int sum = 0;
  for (int d : rep.observed_dims) sum += d;
  if (q == 1) {
    const auto k1 = k1_brute_oracle(field);
    rep.clauses.push_back({"total_dimension", -1, sum == k1.total_dim,
                           "sum of graded dims " + std::to_string(sum) + " vs dim K^x/p = " + std::to_string(k1.total_dim)});
  } else {
    const int expected = oracle ? 1 : 0;
    rep.clauses.push_back({"total_dimension", -1, sum == expected,
                           "sum of graded dims " + std::to_string(sum) + " vs dim mu_p(K) = " + std::to_string(expected)});
  }
  return rep;
}

}  // namespace bklab
