#include <filesystem>
#include <random>
#include <set>

#include "bklab/padic.hpp"
#include "doctest.h"

using namespace bklab;

namespace {

LocalFieldPtr field(const std::string& name) { return LocalField::make(name); }

PadicElement random_element(const LocalFieldPtr& F, std::mt19937_64& rng) {
  for (;;) {
    auto x = PadicElement::from_raw(F, random_raw(*F, rng), F->precision());
    if (x.is_zero()) continue;
    const int shift = static_cast<int>(rng() % 5) - 2;
    return x * PadicElement::pi(F).pow(shift);
  }
}

}  // namespace

TEST_CASE("descriptor menu and validation") {
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    CHECK(PadicElement::from_int(F, F->p()).valuation() == F->e());
    CHECK(LocalFieldDescriptor::from_json(d.to_json()).to_json() == d.to_json());
  }
  auto d = resolve_descriptor("Q2");
  d.eisenstein_poly = {4, 1};
  CHECK_THROWS_AS(LocalField::make(d), math_error);
  d.eisenstein_poly = {-2, 1};
  d.precision = 3;
  CHECK_THROWS_AS(LocalField::make(d), precision_error);
  CHECK_THROWS_AS(resolve_descriptor("no-such-field"), math_error);
  CHECK_THROWS_AS(LocalFieldDescriptor::from_json("{\"p\": 2"), math_error);

  const auto fields_dir = std::filesystem::path(BKLAB_SOURCE_DIR) / "fields";
  for (const auto& d2 : shipped_descriptors()) {
    const auto path = fields_dir / (d2.name + ".json");
    REQUIRE_MESSAGE(std::filesystem::exists(path), path.string());
    CHECK(LocalFieldDescriptor::load(path.string()).to_json() == d2.to_json());
  }
}

TEST_CASE("Teichmueller lifts") {
  auto Q2 = field("Q2");
  CHECK(PadicElement::lift(Q2, 1) == PadicElement::one(Q2));
  auto Q4 = field("Q4");
  const auto g = PadicElement::lift(Q4, 2);
  CHECK(g.pow(4) == g);
  CHECK(g.residue() == 2);
  CHECK(g != PadicElement::one(Q4));
  for (auto name : {"Q4", "Q9", "Q3_zeta3", "Q4_sqrt2", "Q25"}) {
    auto F = field(name);
    const auto& k = F->residue_field();
    for (int x = 1; x < k.q(); ++x)
      for (int y = 1; y < k.q(); ++y) {
        const auto lx = PadicElement::lift(F, static_cast<Fq>(x));
        const auto ly = PadicElement::lift(F, static_cast<Fq>(y));
        CHECK(lx.residue() == x);
        CHECK(lx * ly == PadicElement::lift(F, k.mul(static_cast<Fq>(x), static_cast<Fq>(y))));
      }
  }
}

TEST_CASE("valuation laws on random samples") {
  std::mt19937_64 rng(1);
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_element(F, rng), y = random_element(F, rng);
      CHECK((x * y).valuation() == x.valuation() + y.valuation());
      const auto s = x + y;
      if (!s.is_zero()) {
        CHECK(s.valuation() >= std::min(x.valuation(), y.valuation()));
        if (x.valuation() != y.valuation()) CHECK(s.valuation() == std::min(x.valuation(), y.valuation()));
      }
      CHECK((x / y) * y == x);
      CHECK((x - x).is_zero());
    }
  }
}

TEST_CASE("unit filtration level") {
  auto Q2 = field("Q2");
  CHECK(unit_filtration_level(PadicElement::from_int(Q2, 5)) == 2);
  CHECK(unit_filtration_level(PadicElement::from_int(Q2, 3)) == 1);
  CHECK(unit_filtration_level(PadicElement::one(Q2)) == Q2->precision());
  CHECK(unit_filtration_level(PadicElement::lift(field("Q4"), 2)) == 0);
  CHECK_THROWS_AS(unit_filtration_level(PadicElement::from_int(Q2, 2)), math_error);
}

TEST_CASE("principal unit decomposition") {
  auto Q2 = field("Q2");
  CHECK(principal_unit_decomposition(PadicElement::from_int(Q2, 5)) == std::vector<UnitFactor>{{2, 1}});
  CHECK(principal_unit_decomposition(PadicElement::one(Q2)).empty());
  const auto three = principal_unit_decomposition(PadicElement::from_int(Q2, 3));
  REQUIRE_FALSE(three.empty());
  CHECK(three.front() == UnitFactor{1, 1});

  std::mt19937_64 rng(2);
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    for (int i = 0; i < 200; ++i) {
      Raw u = random_raw(*F, rng);
      if (F->residue(u) == 0) u = F->add(u, F->one());
      if (F->residue(u) == 0) continue;
      const auto parts = principal_unit_decomposition(*F, u);
      Raw prod = F->teichmuller(F->residue(u));
      int last = 0;
      for (const auto& [m, x] : parts) {
        CHECK(m > last);
        last = m;
        prod = F->mul(prod, unit_factor(*F, m, x));
      }
      CHECK(F->equal_mod(prod, u, F->precision()));
    }
  }
}

TEST_CASE("constant a and roots of unity") {
  CHECK(field("Q2")->a() == 1);
  CHECK(field("Q2_sqrt2")->a() == 1);
  CHECK(field("Q2_sqrt-2")->a() == 1);
  CHECK(field("Q3_zeta3")->a() == 2);
  CHECK(eprime_constant_a(*field("Q5")) != 0);

  auto Q2 = field("Q2");
  REQUIRE(zeta_p(Q2).has_value());
  CHECK(*zeta_p(Q2) == PadicElement::from_int(Q2, -1));
  CHECK(step4_multiplier(Q2) == 1);

  CHECK_FALSE(zeta_p(field("Q3")).has_value());
  CHECK_FALSE(zeta_p(field("Q5")).has_value());
  CHECK_FALSE(zeta_p(field("Q9")).has_value());
  CHECK_THROWS_AS(step4_multiplier(field("Q3")), math_error);

  auto K = field("Q3_zeta3");
  const auto zeta = zeta_p(K);
  REQUIRE(zeta.has_value());
  CHECK(*zeta == PadicElement::one(K) + PadicElement::pi(K));
  CHECK((PadicElement::one(K) - *zeta).pow(3).valuation() == 3);
  // (1 - zeta)^3 / pi^3 = -1 exactly since 1 - zeta = -pi.
  CHECK(step4_multiplier(K) == 2);
  for (auto name : {"Q2_sqrt2", "Q4_sqrt2"}) CHECK(step4_multiplier(field(name)) != 0);
}

TEST_CASE("p-th power test examples") {
  auto Q2 = field("Q2");
  const auto nine = PadicElement::from_int(Q2, 9);
  const auto y = pth_power_test(nine, 3);
  REQUIRE(y.has_value());
  CHECK((*y == PadicElement::from_int(Q2, 3) || *y == PadicElement::from_int(Q2, -3)));
  CHECK_FALSE(pth_power_test(PadicElement::from_int(Q2, 5), 2).has_value());
  CHECK_THROWS_AS(pth_power_test(PadicElement::from_int(Q2, 5), 3), math_error);

  auto Q3 = field("Q3");
  const auto ten = PadicElement::from_int(Q3, 10);
  const auto r = pth_power_test(ten, 2);
  REQUIRE(r.has_value());
  CHECK(r->pow(3) == ten);
}

TEST_CASE("squares in Q_2 against exhaustion") {
  // Odd u is a square in Q_2 iff u = 1 mod 8; checked against the squares mod 2^7.
  auto Q2 = field("Q2");
  std::set<int> squares;
  for (int x = 1; x < 128; x += 2) squares.insert(x * x % 128);
  for (int u = 1; u < 128; u += 2) {
    const bool is_square = pth_root(PadicElement::from_int(Q2, u)).has_value();
    CHECK(is_square == (squares.count(u) > 0));
    CHECK(is_square == (u % 8 == 1));
  }
  CHECK(pth_root(PadicElement::from_int(Q2, 4)).has_value());
  CHECK_FALSE(pth_root(PadicElement::from_int(Q2, 2)).has_value());
}

TEST_CASE("deep principal units are p-th powers") {
  std::mt19937_64 rng(4);
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    const int first = static_cast<int>(F->eprime().floor()) + 1;
    for (int m = first; m < F->precision(); ++m)
      for (int i = 0; i < 20; ++i) {
        const auto u = random_principal_unit(F, m, rng);
        const auto y = pth_root(u);
        REQUIRE(y.has_value());
        CHECK(y->pow(F->p()) == u);
      }
  }
}

TEST_CASE("p-th roots of p-th powers") {
  std::mt19937_64 rng(5);
  for (const auto& d : shipped_descriptors()) {
    auto F = LocalField::make(d);
    for (int i = 0; i < 30; ++i) {
      const auto x = random_element(F, rng);
      const auto xp = x.pow(F->p());
      const auto y = pth_root(xp);
      REQUIRE(y.has_value());
      CHECK(y->pow(F->p()) == xp);
    }
  }
}

TEST_CASE("parsing and printing") {
  auto Q2 = field("Q2");
  CHECK(parse_element(Q2, "5") == PadicElement::from_int(Q2, 5));
  CHECK(parse_element(Q2, "1 + pi^2") == PadicElement::from_int(Q2, 5));
  CHECK(parse_element(Q2, "-(2*3)/3") == PadicElement::from_int(Q2, -2));
  CHECK(parse_element(Q2, "pi^-1").valuation() == -1);
  CHECK(PadicElement::from_int(Q2, 5).to_string() == "1 + pi^2 + O(pi^7)");
  CHECK(PadicElement::zero(Q2, 7).to_string() == "O(pi^7)");
  auto Q4 = field("Q4");
  CHECK(parse_element(Q4, "u(10)") == PadicElement::lift(Q4, 2));
  CHECK_THROWS_AS(parse_element(Q4, "u(2)"), math_error);
  CHECK_THROWS_AS(parse_element(Q2, "1 +"), math_error);
  CHECK_THROWS_AS(parse_element(Q2, "1/0"), math_error);
  auto K = field("Q3_zeta3");
  const auto pi = parse_element(K, "pi");
  CHECK((pi * pi + PadicElement::from_int(K, 3) * pi + PadicElement::from_int(K, 3)).is_zero());
}

TEST_CASE("precision bookkeeping") {
  auto Q2 = field("Q2");
  const auto x = PadicElement::from_int(Q2, 1) + PadicElement::zero(Q2, 3);
  CHECK(x.absolute_precision() == 3);
  const auto y = PadicElement::from_int(Q2, 9) - PadicElement::one(Q2);
  CHECK(y.valuation() == 3);
  CHECK(y.relative_precision() == Q2->precision() - 3);
  CHECK_THROWS_AS(PadicElement::zero(Q2, 5).valuation(), precision_error);
  CHECK_THROWS_AS(PadicElement::pi(Q2).inverse().residue(), math_error);
}
