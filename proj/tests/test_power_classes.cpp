#include <random>

#include "bklab/power_classes.hpp"
#include "doctest.h"

using namespace bklab;

namespace {

std::vector<int> add_mod(std::vector<int> a, const std::vector<int>& b, int p) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = (a[i] + b[i]) % p;
  return a;
}

}  // namespace

TEST_CASE("k1 oracle dimensions") {
  struct Expected {
    const char* name;
    int total;
    std::vector<int> graded;
  };
  const std::vector<Expected> cases = {
      {"Q2", 3, {1, 1, 1, 0}},
      {"Q3", 2, {1, 1, 0}},
      {"Q5", 2, {1, 1, 0}},
      {"Q2_sqrt2", 4, {1, 1, 0, 1, 1, 0}},
      {"Q3_zeta3", 4, {1, 1, 1, 1, 0}},
  };
  for (const auto& c : cases) {
    const auto r = k1_brute_oracle(LocalField::make(c.name));
    CHECK_MESSAGE(r.total_dim == c.total, c.name);
    CHECK_MESSAGE(r.graded_dims == c.graded, c.name);
  }
  // [K : Q_p] + 1, plus 1 when K contains the p-th roots of unity.
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    const int expected = F->e() * F->f() + 1 + (zeta_p(F) ? 1 : 0);
    CHECK_MESSAGE(k1_brute_oracle(F).total_dim == expected, d.name);
  }
}

TEST_CASE("serial and parallel power kernels agree") {
  for (auto name : {"Q2_sqrt2", "Q4_sqrt2", "Q3_zeta3", "Q25"}) {
    auto F = LocalField::make(name);
    const int L = static_cast<int>(F->eprime().floor()) + 1;
    CHECK(power_keys_serial(*F, L, F->p()) == power_keys_parallel(*F, L, F->p()));
    const auto a = k1_brute_oracle(F, Exec::serial), b = k1_brute_oracle(F, Exec::parallel);
    CHECK(a.graded_dims == b.graded_dims);
  }
}

TEST_CASE("power class table is a homomorphism") {
  std::mt19937_64 rng(8);
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    const PowerClassTable table(F);
    const int p = F->p();
    for (int i = 0; i < 40; ++i) {
      const auto x = PadicElement::from_raw(F, F->add(random_raw(*F, rng), F->one()), F->precision()) *
                     PadicElement::pi(F).pow(static_cast<int>(rng() % 4));
      const auto y = PadicElement::from_raw(F, F->add(random_raw(*F, rng), F->from_int(2 + rng() % 3)),
                                            F->precision());
      if (x.is_zero() || y.is_zero()) continue;
      if (std::min(x.relative_precision(), y.relative_precision()) < table.depth()) continue;
      CHECK(table.class_of(x * y) == add_mod(table.class_of(x), table.class_of(y), p));
      CHECK(table.class_index(x.pow(p)) == 0);
    }
    for (std::uint32_t idx = 0; idx < table.class_count(); ++idx)
      CHECK(table.class_index(table.representative(table.unpack(idx))) == idx);
  }
  auto Q2 = LocalField::make("Q2");
  const PowerClassTable t(Q2);
  CHECK(t.class_index(PadicElement::from_int(Q2, -1)) != 0);
  CHECK(t.class_index(PadicElement::from_int(Q2, 5)) != 0);
  CHECK(t.class_index(PadicElement::from_int(Q2, 17)) == 0);
  CHECK(t.class_index(PadicElement::from_int(Q2, -7)) == 0);
}
