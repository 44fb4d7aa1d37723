#include "bklab/power_classes.hpp"

namespace bklab {

namespace {

std::int64_t ipow(std::int64_t b, int k) {
  std::int64_t r = 1;
  while (k-- > 0) r *= b;
  return r;
}

int ilog(std::uint64_t x, int p) {
  int k = 0;
  while (x > 1) {
    if (x % p != 0) throw math_error("group order is not a power of p");
    x /= p;
    ++k;
  }
  return k;
}

}  // namespace

std::uint64_t residue_key(const LocalField& F, const Raw& x, int L) {
  const Raw r = F.reduce(x, L);
  std::uint64_t key = 0, mult = 1;
  for (int i = 0; i < F.e(); ++i) {
    const int k = L <= i ? 0 : (L - i + F.e() - 1) / F.e();
    const auto m = static_cast<std::uint64_t>(ipow(F.p(), k));
    for (int j = 0; j < F.f(); ++j) {
      key += static_cast<std::uint64_t>(r.c[i * F.f() + j]) % m * mult;
      mult *= m;
    }
  }
  return key;
}

std::uint64_t key_space(const LocalField& F, int L) { return static_cast<std::uint64_t>(ipow(F.q(), L)); }

Raw principal_unit_at(const LocalField& F, int L, std::uint64_t index) {
  Raw x = F.one();
  const auto q = static_cast<std::uint64_t>(F.q());
  for (int j = 1; j < L; ++j) {
    const auto d = static_cast<Fq>(index % q);
    index /= q;
    if (d != 0) x = F.add(x, F.mul_pi(F.naive_lift(d), j));
  }
  return x;
}

std::vector<std::uint64_t> power_keys_serial(const LocalField& F, int L, long long n) {
  const std::uint64_t count = key_space(F, L - 1);
  std::vector<std::uint64_t> out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = residue_key(F, F.pow(principal_unit_at(F, L, i), n), L);
  return out;
}

std::vector<std::uint64_t> power_keys_parallel(const LocalField& F, int L, long long n) {
  const auto count = static_cast<std::int64_t>(key_space(F, L - 1));
  std::vector<std::uint64_t> out(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i)
    out[i] = residue_key(F, F.pow(principal_unit_at(F, L, static_cast<std::uint64_t>(i)), n), L);
  return out;
}

std::vector<std::uint64_t> power_keys(const LocalField& F, int L, long long n, Exec exec) {
  return exec == Exec::parallel ? power_keys_parallel(F, L, n) : power_keys_serial(F, L, n);
}

PowerClassTable::PowerClassTable(LocalFieldPtr field, Exec exec) : field_(std::move(field)) {
  const auto& F = *field_;
  const int p = F.p();
  L_ = static_cast<int>(F.eprime().floor()) + 1;
  if (L_ > F.precision()) throw precision_error("precision below floor(e') + 1");

  const auto keys = power_keys(F, L_, p, exec);
  group_order_ = keys.size();
  table_.assign(key_space(F, L_), -1);
  std::vector<Raw> subgroup;
  for (std::uint64_t i = 0; i < keys.size(); ++i) {
    if (table_[keys[i]] >= 0) continue;
    table_[keys[i]] = 0;
    subgroup.push_back(F.reduce(F.pow(principal_unit_at(F, L_, i), p), L_));
  }
  image_order_ = subgroup.size();
  image_by_level_.assign(L_ + 1, 0);
  for (const auto& h : subgroup) {
    const int level = F.unit_level(h, L_);
    for (int m = 1; m <= level; ++m) ++image_by_level_[m];
  }

  std::int32_t weight = 1;
  for (int m = 1; m < L_; ++m)
    for (int j = 0; j < F.f(); ++j) {
      const Fq x = F.residue_field().basis(j);
      const Raw c = unit_factor(F, m, x);
      if (table_[residue_key(F, c, L_)] >= 0) continue;
      std::vector<Raw> grown = subgroup;
      Raw cp = F.one();
      for (int k = 1; k < p; ++k) {
        cp = F.reduce(F.mul(cp, c), L_);
        for (const auto& h : subgroup) {
          const Raw z = F.reduce(F.mul(cp, h), L_);
          table_[residue_key(F, z, L_)] = table_[residue_key(F, h, L_)] + k * weight;
          grown.push_back(z);
        }
      }
      subgroup = std::move(grown);
      generators_.push_back({m, x});
      weight *= p;
    }
  if (subgroup.size() != group_order_) throw math_error("unit generators do not span U_1 / U_L");
}

std::vector<int> PowerClassTable::unit_class(const Raw& u) const {
  const auto& F = *field_;
  const Fq x0 = F.residue(u);
  if (x0 == 0) throw math_error("unit_class of a non-unit");
  const Raw u1 = F.mul(u, F.teichmuller(F.residue_field().inv(x0)));
  std::int32_t packed = table_[residue_key(F, u1, L_)];
  std::vector<int> out(unit_dim());
  for (auto& c : out) {
    c = packed % F.p();
    packed /= F.p();
  }
  return out;
}

std::uint32_t PowerClassTable::unit_class_index(const Raw& u) const {
  std::vector<int> coords{0};
  for (int c : unit_class(u)) coords.push_back(c);
  return pack(coords);
}

std::vector<int> PowerClassTable::class_of(const PadicElement& x) const {
  if (x.is_zero()) throw math_error("class of zero in K^x/p");
  if (x.relative_precision() < L_) throw precision_error("too few digits to determine a class mod p-th powers");
  const int p = field_->p();
  std::vector<int> out{((x.valuation() % p) + p) % p};
  for (int c : unit_class(x.unit())) out.push_back(c);
  return out;
}

std::uint32_t PowerClassTable::pack(const std::vector<int>& coords) const {
  std::uint32_t idx = 0, w = 1;
  for (int c : coords) {
    idx += static_cast<std::uint32_t>(c) * w;
    w *= static_cast<std::uint32_t>(field_->p());
  }
  return idx;
}

std::vector<int> PowerClassTable::unpack(std::uint32_t index) const {
  std::vector<int> out(dim());
  for (auto& c : out) {
    c = static_cast<int>(index % field_->p());
    index /= field_->p();
  }
  return out;
}

std::uint32_t PowerClassTable::class_count() const { return static_cast<std::uint32_t>(ipow(field_->p(), dim())); }

PadicElement PowerClassTable::representative(const std::vector<int>& coords) const {
  const auto& F = *field_;
  auto x = PadicElement::pi(field_).pow(coords.at(0));
  for (int i = 0; i < unit_dim(); ++i) {
    const auto g = PadicElement::from_raw(field_, unit_factor(F, generators_[i].level, generators_[i].residue),
                                          F.precision());
    x = x * g.pow(coords.at(i + 1));
  }
  return x;
}

K1OracleResult k1_brute_oracle(const LocalFieldPtr& field, Exec exec) {
  const PowerClassTable table(field, exec);
  const int L = table.depth(), p = field->p();
  const auto& c = table.image_by_level();
  K1OracleResult r;
  r.group_order = table.group_order();
  r.image_order = table.image_order();
  r.total_dim = table.dim();
  r.graded_dims.assign(L + 1, 0);
  r.graded_dims[0] = 1;  // the class of pi; k^x has no p-torsion quotient
  for (int m = 1; m < L; ++m) {
    const std::uint64_t num = static_cast<std::uint64_t>(field->q()) * c[m + 1];
    if (num % c[m] != 0) throw math_error("graded quotient order is not an integer");
    r.graded_dims[m] = ilog(num / c[m], p);
  }
  int sum = 0;
  for (int d : r.graded_dims) sum += d;
  if (sum != r.total_dim) throw math_error("graded dimensions do not add up to the total");
  return r;
}

}  // namespace bklab
