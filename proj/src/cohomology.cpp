#include "bklab/cohomology.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>

namespace bklab {

namespace {

// Sign of a permutation given as an index vector.
int perm_sign(const std::vector<int>& s) {
  int sign = 1;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (s[i] > s[j]) sign = -sign;
  return sign;
}

// Leibniz determinant; entries indexed [row][col].
template <class T, class Mul, class Add, class Neg>
T leibniz(const std::vector<std::vector<T>>& m, T zero, Mul mul, Add add, Neg neg) {
  const int n = static_cast<int>(m.size());
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  T det = zero;
  do {
    T term = m[0][s[0]];
    for (int i = 1; i < n; ++i) term = mul(term, m[i][s[i]]);
    det = add(det, perm_sign(s) > 0 ? term : neg(term));
  } while (std::next_permutation(s.begin(), s.end()));
  return det;
}

std::uint32_t add_classes(const PowerClassTable& t, std::uint32_t x, std::uint32_t y) {
  auto a = t.unpack(x);
  const auto b = t.unpack(y);
  const int p = t.field()->p();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % p;
  return t.pack(a);
}

int dot(const std::vector<int>& f, const std::vector<int>& x, int p) {
  int s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * x[i];
  return s % p;
}

// The nonzero functional vanishing exactly on the hyperplane h, with first
// nonzero coordinate 1.
std::vector<int> annihilator(const PowerClassTable& t, const std::vector<char>& h) {
  const int p = t.field()->p();
  for (std::uint32_t fi = 1; fi < t.class_count(); ++fi) {
    const auto f = t.unpack(fi);
    const auto lead = std::find_if(f.begin(), f.end(), [](int c) { return c != 0; });
    if (*lead != 1) continue;
    bool ok = true;
    for (std::uint32_t x = 0; x < t.class_count() && ok; ++x) ok = (dot(f, t.unpack(x), p) == 0) == (h[x] != 0);
    if (ok) return f;
  }
  throw math_error("norm group is not a hyperplane");
}

std::uint64_t ipow(std::uint64_t b, int k) {
  std::uint64_t r = 1;
  while (k-- > 0) r *= b;
  return r;
}

}  // namespace

Raw kummer_norm(const LocalField& F, const Raw& radicand, const std::vector<Raw>& coeffs) {
  const int p = static_cast<int>(coeffs.size());
  // Column j holds x * alpha^j.
  std::vector<std::vector<Raw>> m(p, std::vector<Raw>(p, F.zero()));
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) m[(i + j) % p][j] = i + j >= p ? F.mul(coeffs[i], radicand) : coeffs[i];
  return leibniz<Raw>(
      m, F.zero(), [&](const Raw& x, const Raw& y) { return F.mul(x, y); },
      [&](const Raw& x, const Raw& y) { return F.add(x, y); }, [&](const Raw& x) { return F.neg(x); });
}

std::vector<char> enumerate_norm_group(const PowerClassTable& table, std::uint32_t a, int* depth) {
  const auto& F = *table.field();
  const int p = F.p(), d = table.dim();
  const std::uint32_t count = table.class_count();
  std::vector<char> span(count, 0);
  span[0] = 1;
  if (a == 0) {
    std::fill(span.begin(), span.end(), 1);
    if (depth) *depth = 0;
    return span;
  }
  const std::uint64_t target = ipow(p, d - 1);
  std::uint64_t size = 1;
  const Raw radicand = table.representative(table.unpack(a)).to_raw();
  const int abs = F.e() * (F.storage_digits() - 1);
  const auto q = static_cast<std::uint64_t>(F.q());

  for (int T = 1; T <= F.precision(); ++T) {
    // Family k: coefficient k is 1, earlier ones lie in the maximal ideal.
    for (int k = 0; k < p; ++k) {
      int digits = 0;
      for (int i = 0; i < p; ++i)
        if (i != k) digits += i < k ? T - 1 : T;
      const std::uint64_t n = ipow(q, digits);
      for (std::uint64_t idx = 0; idx < n; ++idx) {
        std::uint64_t rest = idx;
        std::vector<Raw> c(p, F.zero());
        c[k] = F.one();
        for (int i = 0; i < p; ++i) {
          if (i == k) continue;
          for (int j = i < k ? 1 : 0; j < T; ++j) {
            const auto digit = static_cast<Fq>(rest % q);
            rest /= q;
            if (digit != 0) c[i] = F.add(c[i], F.mul_pi(F.naive_lift(digit), j));
          }
        }
        const auto norm = PadicElement::from_raw(table.field(), kummer_norm(F, radicand, c), abs);
        if (norm.is_zero() || norm.relative_precision() < table.depth()) continue;
        const std::uint32_t cls = table.class_index(norm);
        if (span[cls]) continue;
        // span <- span + F_p * cls
        std::vector<std::uint32_t> old;
        for (std::uint32_t x = 0; x < count; ++x)
          if (span[x]) old.push_back(x);
        std::uint32_t shift = cls;
        for (int t = 1; t < p; ++t) {
          for (auto x : old) span[add_classes(table, x, shift)] = 1;
          shift = add_classes(table, shift, cls);
        }
        size *= p;
        if (size > target) throw math_error("norm group of a nontrivial Kummer extension is everything");
        if (size == target) {
          if (depth) *depth = T;
          return span;
        }
      }
    }
  }
  throw precision_error("norm enumeration did not reach index p at precision " + std::to_string(F.precision()));
}

HilbertOracle::HilbertOracle(LocalFieldPtr field, Exec exec) : table_(field, exec) {
  const auto& F = *table_.field();
  const int p = F.p(), d = table_.dim();
  if (!zeta_p(table_.field())) throw math_error(F.name() + " does not contain the p-th roots of unity");
  if (p != 2 && p != 3) throw math_error("Hilbert oracle supports p in {2, 3}");
  const auto count = static_cast<std::int64_t>(table_.class_count());
  norm_groups_.assign(count, {});
  std::vector<int> depths(count, 0);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t a = 0; a < count; ++a)
      norm_groups_[a] = enumerate_norm_group(table_, static_cast<std::uint32_t>(a), &depths[a]);
  } else {
    for (std::int64_t a = 0; a < count; ++a)
      norm_groups_[a] = enumerate_norm_group(table_, static_cast<std::uint32_t>(a), &depths[a]);
  }
  depth_ = *std::max_element(depths.begin(), depths.end());

  // B(e_i, .) = lambda_i f_{e_i}; find the lambda making every kernel right.
  std::vector<std::vector<int>> f(d);
  for (int i = 0; i < d; ++i) {
    std::vector<int> e(d, 0);
    e[i] = 1;
    f[i] = annihilator(table_, norm_groups_[table_.pack(e)]);
  }
  const std::uint64_t choices = ipow(p - 1, d - 1);
  std::vector<std::vector<int>> found;
  for (std::uint64_t li = 0; li < choices; ++li) {
    std::vector<int> lambda{1};
    std::uint64_t rest = li;
    for (int i = 1; i < d; ++i) {
      lambda.push_back(1 + static_cast<int>(rest % (p - 1)));
      rest /= p - 1;
    }
    std::vector<std::vector<int>> g(d, std::vector<int>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g[i][j] = lambda[i] * f[i][j] % p;
    bool ok = true;
    for (std::uint32_t x = 1; x < count && ok; ++x) {
      const auto xv = table_.unpack(x);
      for (std::uint32_t y = 0; y < count && ok; ++y) {
        const auto yv = table_.unpack(y);
        int s = 0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) s += xv[i] * g[i][j] * yv[j];
        ok = (s % p == 0) == (norm_groups_[x][y] != 0);
      }
    }
    if (ok) found = g;
    if (ok) break;
  }
  if (found.empty()) throw math_error("norm groups are not the kernels of one bilinear form");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if ((found[i][j] + found[j][i]) % p != 0) throw math_error("fitted pairing is not skew-symmetric");
  gram_ = std::move(found);
}

int HilbertOracle::pairing(std::uint32_t a, std::uint32_t b) const {
  const auto x = table_.unpack(a), y = table_.unpack(b);
  const int d = table_.dim(), p = table_.field()->p();
  int s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += x[i] * gram_[i][j] * y[j];
  return s % p;
}

MuPValue HilbertOracle::symbol(const PadicElement& a, const PadicElement& b) const {
  if (a.field()->name() != field()->name() || b.field()->name() != field()->name())
    throw math_error("Hilbert symbol arguments from a different field");
  return {pairing(table_.class_index(a), table_.class_index(b)), field()->p()};
}

bool HilbertOracle::is_norm(const PadicElement& b, const PadicElement& a) const {
  return norm_groups_.at(table_.class_index(a))[table_.class_index(b)] != 0;
}

MuPValue hilbert_symbol(const HilbertOracle& oracle, const PadicElement& a, const PadicElement& b) {
  return oracle.symbol(a, b);
}

std::shared_ptr<const HilbertOracle> shared_hilbert_oracle(const LocalFieldPtr& field) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const HilbertOracle>> cache;
  const std::string key = field->descriptor().to_json();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<HilbertOracle>(field)).first;
  return it->second;
}

MuPValue hilbert_symbol(const PadicElement& a, const PadicElement& b) {
  return shared_hilbert_oracle(a.field())->symbol(a, b);
}

// ---------------------------------------------------------------------------
// Norms

int ExtensionDatum::degree() const { return kind == Kind::kummer ? base->p() : top->f() / base->f(); }

std::string ExtensionDatum::describe() const {
  if (kind == Kind::kummer) return base->name() + "((" + radicand.to_string() + ")^(1/" + std::to_string(base->p()) + "))";
  return top->name() + "/" + base->name();
}

ExtensionDatum ExtensionDatum::kummer(LocalFieldPtr base, PadicElement radicand) {
  if (!zeta_p(base)) throw math_error("Kummer extension needs the p-th roots of unity in the base");
  if (radicand.is_zero()) throw math_error("Kummer radicand is zero");
  if (pth_root(radicand)) throw math_error("Kummer radicand is a p-th power");
  ExtensionDatum e;
  e.kind = Kind::kummer;
  e.base = std::move(base);
  e.radicand = std::move(radicand);
  return e;
}

ExtensionDatum ExtensionDatum::unramified(LocalFieldPtr base, int d) {
  if (base->f() != 1) throw math_error("unramified extensions are built over a base with f = 1");
  if (d < 1 || base->e() * d > Raw::kCapacity) throw math_error("unramified degree out of range");
  auto desc = base->descriptor();
  desc.f = d;
  desc.unramified_poly.clear();
  desc.name = base->name() + "_unr" + std::to_string(d);
  for (const auto& s : shipped_descriptors())
    if (s.p == desc.p && s.f == d && s.eisenstein_poly == desc.eisenstein_poly) desc.name = s.name;
  ExtensionDatum e;
  e.kind = Kind::unramified;
  e.base = std::move(base);
  e.top = LocalField::make(desc);
  return e;
}

namespace {

// K raw (f = 1) into L raw with the same Eisenstein data.
Raw embed(const LocalField& K, const LocalField& L, const Raw& x) {
  Raw y = L.zero();
  for (int i = 0; i < K.e(); ++i) y.c[i * L.f()] = x.c[i];
  return y;
}

PadicElement leibniz_padic(const std::vector<std::vector<PadicElement>>& m, const LocalFieldPtr& K) {
  return leibniz<PadicElement>(
      m, PadicElement::zero(K, K->precision()), [](const PadicElement& x, const PadicElement& y) { return x * y; },
      [](const PadicElement& x, const PadicElement& y) { return x + y; }, [](const PadicElement& x) { return -x; });
}

}  // namespace

PadicElement norm_k1(const ExtensionDatum& ext, const ExtensionElement& x) {
  const auto& K = ext.base;
  if (ext.kind == ExtensionDatum::Kind::kummer) {
    const int p = K->p();
    if (static_cast<int>(x.kummer_coords.size()) != p) throw math_error("Kummer element needs p coordinates");
    std::vector<std::vector<PadicElement>> m(p, std::vector<PadicElement>(p));
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < p; ++i) m[(i + j) % p][j] = i + j >= p ? x.kummer_coords[i] * ext.radicand : x.kummer_coords[i];
    return leibniz_padic(m, K);
  }
  const auto& L = *ext.top;
  const auto& y = x.top_element;
  const int d = ext.degree();
  if (y.is_zero()) return PadicElement::zero(K, y.absolute_precision() * d);
  const int rel = y.relative_precision();
  std::vector<std::vector<PadicElement>> m(d, std::vector<PadicElement>(d));
  Raw col = y.unit();
  Raw g = L.zero();  // the generator of the unramified part, coordinate g^1
  if (d > 1) g.c[1] = 1;
  for (int j = 0; j < d; ++j) {
    if (j > 0) col = L.mul(col, g);
    for (int k = 0; k < d; ++k) {
      Raw c = K->zero();
      for (int i = 0; i < L.e(); ++i) c.c[i] = col.c[i * d + k];
      m[k][j] = PadicElement::from_raw(K, c, rel);
    }
  }
  return leibniz_padic(m, K) * PadicElement::pi(K).pow(static_cast<long long>(y.valuation()) * d);
}

ExtensionElement restrict_to(const ExtensionDatum& ext, const PadicElement& x) {
  ExtensionElement out;
  if (ext.kind == ExtensionDatum::Kind::kummer) {
    out.kummer_coords.assign(ext.base->p(), PadicElement::zero(ext.base, ext.base->precision()));
    out.kummer_coords[0] = x;
    return out;
  }
  if (x.is_zero()) {
    out.top_element = PadicElement::zero(ext.top, x.absolute_precision());
    return out;
  }
  out.top_element = PadicElement::from_unit(ext.top, x.valuation(), embed(*ext.base, *ext.top, x.unit()),
                                            x.relative_precision());
  return out;
}

namespace {

PadicElement random_nonzero(const LocalFieldPtr& F, std::mt19937_64& rng) {
  for (;;) {
    const auto x = PadicElement::from_raw(F, random_raw(*F, rng), F->precision());
    if (!x.is_zero()) return x * PadicElement::pi(F).pow(static_cast<int>(rng() % 3));
  }
}

}  // namespace

CheckOutcome cor_res_check(const ExtensionDatum& ext, int q, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CheckOutcome out;
  out.pass = true;
  if (q == 1) {
    out.clause = "N(res x) = x^[L:K] on " + ext.describe();
    for (std::size_t i = 0; i < samples; ++i) {
      const auto x = random_nonzero(ext.base, rng);
      const auto n = norm_k1(ext, restrict_to(ext, x));
      ++out.samples;
      if (n != x.pow(ext.degree())) {
        out.pass = false;
        out.evidence = "x = " + x.to_string() + ", N(res x) = " + n.to_string();
        break;
      }
    }
    return out;
  }
  if (q != 2) throw math_error("cor/res check covers degrees 1 and 2");
  if (ext.kind != ExtensionDatum::Kind::unramified)
    throw math_error("degree-2 cor/res check needs the top field as a local field (unramified case)");
  out.clause = "(N x, y)_K = (x, res y)_L on " + ext.describe();
  const HilbertOracle lower(ext.base), upper(ext.top);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto x = random_nonzero(ext.top, rng);
    const auto y = random_nonzero(ext.base, rng);
    const auto n = norm_k1(ext, {{}, x});
    const auto ry = restrict_to(ext, y).top_element;
    if (n.is_zero() || n.relative_precision() < lower.classes().depth() ||
        ry.relative_precision() < upper.classes().depth() || x.relative_precision() < upper.classes().depth())
      continue;  // too few digits to classify mod p-th powers
    const auto lhs = lower.symbol(n, y);
    const auto rhs = upper.symbol(x, ry);
    ++out.samples;
    if (!(lhs == rhs)) {
      out.pass = false;
      out.evidence = "x = " + x.to_string() + ", y = " + y.to_string() + ": " + lhs.to_string() + " vs " + rhs.to_string();
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bockstein row

namespace {

// Coset labels of U_1 / U_N modulo the image of y -> y^n.
struct CosetLabels {
  std::vector<std::int32_t> label;  // by residue key mod pi^N
  std::int32_t count = 0;
};

CosetLabels cosets(const LocalField& F, int N, long long n) {
  const auto keys = power_keys_serial(F, N, n);
  std::set<std::uint64_t> image_keys(keys.begin(), keys.end());
  std::vector<Raw> image;
  for (std::uint64_t i = 0; i < keys.size(); ++i)
    if (image_keys.erase(keys[i])) image.push_back(F.reduce(F.pow(principal_unit_at(F, N, i), n), N));
  CosetLabels c;
  c.label.assign(key_space(F, N), -1);
  for (std::uint64_t i = 0; i < keys.size(); ++i) {
    const Raw g = principal_unit_at(F, N, i);
    if (c.label[residue_key(F, g, N)] >= 0) continue;
    for (const auto& h : image) c.label[residue_key(F, F.mul(g, h), N)] = c.count;
    ++c.count;
  }
  return c;
}

}  // namespace

BocksteinReport bockstein_exactness_check(const LocalFieldPtr& field) {
  const auto& F = *field;
  if (F.p() != 2) throw math_error("the mod 2 / mod 4 row is for p = 2");
  // U_{3e+1} lies in the fourth powers, so any depth from 3e + 1 on gives the
  // same groups; use the working precision unless that exhaustion is too big.
  const int sufficient = 3 * F.e() + 1;
  if (F.precision() < sufficient) throw precision_error("need precision >= 3e + 1 so that U_N lies in the fourth powers");
  constexpr std::uint64_t kBudget = 1u << 16;
  const int N = key_space(F, F.precision() - 1) <= kBudget ? F.precision() : sufficient;
  const auto c4 = cosets(F, N, 4), c2 = cosets(F, N, 2);
  BocksteinReport r;
  r.depth = N;
  r.order_mod4 = 4ull * c4.count;
  r.order_mod2 = 2ull * c2.count;
  // Classes encoded as valuation part * count + coset label.
  std::map<std::int64_t, std::int64_t> squaring, reduction;
  const std::uint64_t n = key_space(F, N - 1);
  auto check_map = [&](std::map<std::int64_t, std::int64_t>& m, std::int64_t from, std::int64_t to) {
    const auto [it, fresh] = m.emplace(from, to);
    if (!fresh && it->second != to) ++r.counterexamples;
  };
  for (std::uint64_t i = 0; i < n; ++i) {
    const Raw u = principal_unit_at(F, N, i);
    const auto l2 = c2.label[residue_key(F, u, N)];
    const auto l4 = c4.label[residue_key(F, u, N)];
    const auto l4sq = c4.label[residue_key(F, F.mul(u, u), N)];
    for (int k = 0; k < 2; ++k) check_map(squaring, k * c2.count + l2, (2 * k) * c4.count + l4sq);
    for (int k = 0; k < 4; ++k) check_map(reduction, k * c4.count + l4, (k % 2) * c2.count + l2);
  }
  const std::int64_t id4 = c4.label[residue_key(F, F.one(), N)];
  const std::int64_t id2 = c2.label[residue_key(F, F.one(), N)];
  std::set<std::int64_t> image_sq, kernel_red, image_red, kernel_sq;
  for (const auto& [from, to] : squaring) {
    image_sq.insert(to);
    if (to == id4) kernel_sq.insert(from);
  }
  for (const auto& [from, to] : reduction) {
    image_red.insert(to);
    if (to == id2) kernel_red.insert(from);
  }
  r.kernel_of_reduction = kernel_red.size();
  r.image_of_squaring = image_sq.size();
  r.kernel_of_squaring = kernel_sq.size();
  r.reduction_surjective = image_red.size() == r.order_mod2;
  r.middle_exact = image_sq == kernel_red;
  const std::set<std::int64_t> minus_one{id2, c2.label[residue_key(F, F.from_int(-1), N)]};
  r.first_kernel_is_minus_one = kernel_sq == minus_one;
  return r;
}

AnchorReport p_brauer_anchor(const HilbertOracle& oracle) {
  const auto& field = oracle.field();
  const auto& F = *field;
  const int ep = F.eprime_int();
  AnchorReport r;
  for (int x = 1; x < F.q(); ++x) {
    const auto a = PadicElement::from_raw(field, unit_factor(F, ep, static_cast<Fq>(x)), F.precision());
    const auto b = PadicElement::pi(field);
    const auto v = oracle.symbol(a, b);
    if (v.is_trivial()) continue;
    r.found = true;
    r.a = a;
    r.b = b;
    r.level = unit_filtration_level(a);
    r.value = v;
    return r;
  }
  return r;
}

}  // namespace bklab
