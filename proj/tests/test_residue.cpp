#include <algorithm>
#include <random>
#include <set>

#include "bklab/linalg.hpp"
#include "bklab/residue.hpp"
#include "doctest.h"

using namespace bklab;

namespace {

ResidueElement random_element(const ResidueFieldPtr& k, std::mt19937& rng, int max_deg = 3) {
  const FiniteField& F = k.get()->constants();
  auto random_poly = [&](bool nonzero) {
    for (;;) {
      std::vector<Poly::Term> terms;
      for (int a = 0; a <= max_deg; ++a)
        for (int b = 0; b <= (k->r() == 2 ? max_deg - a : 0); ++b) {
          if (k->r() == 0 && a > 0) continue;
          terms.push_back({{a, b}, static_cast<Fq>(rng() % F.q())});
        }
      auto p = Poly::from_terms(&F, std::move(terms));
      if (!nonzero || !p.is_zero()) return p;
    }
  };
  return ResidueElement(k, random_poly(false), random_poly(true));
}

}  // namespace

TEST_CASE("finite field tables") {
  auto F4 = FiniteField::shipped(2, 2);
  const Fq g = 2, g_plus_1 = 3;
  CHECK(F4->mul(g, g) == g_plus_1);
  CHECK(F4->frobenius(g) == g_plus_1);
  CHECK(F4->frobenius_inverse(g) == g_plus_1);  // (g^2)^2 = g
  CHECK(F4->to_string(g_plus_1) == "11");
  for (int p : {2, 3, 5})
    for (int f = 1; f <= 3; ++f) {
      auto F = FiniteField::shipped(p, f);
      for (int a = 1; a < F->q(); ++a) CHECK(F->mul(static_cast<Fq>(a), F->inv(static_cast<Fq>(a))) == 1);
    }
  CHECK_THROWS_AS(FiniteField(2, 2, {1, 0, 1}), math_error);  // x^2 + 1 = (x+1)^2
  CHECK_THROWS_AS(FiniteField(4, 1, {1, 1}), math_error);
}

TEST_CASE("arith examples") {
  auto k = ResidueField::make(2, 1, 1);
  const auto t = ResidueElement::variable(k, 0);
  CHECK(arith(t, t, ArithOp::add).is_zero());

  auto F4 = ResidueField::make(2, 2, 0);
  const auto g = ResidueElement::constant(F4, 2);
  CHECK(arith(g, g, ArithOp::mul) == ResidueElement::constant(F4, 3));

  const auto x = t * t + t;
  const auto inv = arith(x, x, ArithOp::inv);
  CHECK(inv.num() == Poly::constant(&k->constants(), 1));
  CHECK(inv.den() == x.num());
  CHECK(inv.to_string() == "(1)/(1*t^2 + 1*t)");
  CHECK_THROWS_AS(arith(ResidueElement::zero(k), t, ArithOp::inv), math_error);
}

TEST_CASE("canonical lowest terms in two variables") {
  auto k = ResidueField::make(2, 1, 2);
  const auto t1 = ResidueElement::variable(k, 0), t2 = ResidueElement::variable(k, 1);
  const auto one = ResidueElement::one(k);
  const auto a = ((t1 + t2) * (t1 * t2 + one)) / ((t1 + t2) * (t2 + one));
  CHECK(a == (t1 * t2 + one) / (t2 + one));
  const auto b = ((t1 * t1 + t2) * (t1 + t2 * t2)) / ((t1 * t1 + t2) * t1);
  CHECK(b.den() == t1.num());
}

TEST_CASE("frobenius examples") {
  auto k = ResidueField::make(2, 1, 1);
  const auto t = ResidueElement::variable(k, 0);
  const auto one = ResidueElement::one(k);
  CHECK(t.frobenius() == t * t);
  CHECK(((t + one) / t).frobenius() == (t * t + one) / (t * t));
  auto F4 = ResidueField::make(2, 2, 0);
  CHECK(ResidueElement::constant(F4, 2).frobenius() == ResidueElement::constant(F4, 3));
}

TEST_CASE("pth_root examples") {
  auto k = ResidueField::make(2, 1, 1);
  const auto t = ResidueElement::variable(k, 0);
  REQUIRE((t * t).pth_root().has_value());
  CHECK(*(t * t).pth_root() == t);
  CHECK_FALSE(t.pth_root().has_value());

  // Oracle: no rational function with numerator and denominator of degree <= 3
  // over F_2 squares to t.
  const FiniteField& F = k->constants();
  bool found = false;
  for (int n = 0; n < 16 && !found; ++n)
    for (int dd = 1; dd < 16 && !found; ++dd) {
      std::vector<Poly::Term> nt, dt;
      for (int i = 0; i < 4; ++i) {
        if (n >> i & 1) nt.push_back({{i, 0}, 1});
        if (dd >> i & 1) dt.push_back({{i, 0}, 1});
      }
      const ResidueElement y(k, Poly::from_terms(&F, nt), Poly::from_terms(&F, dt));
      found = (y * y == t);
    }
  CHECK_FALSE(found);

  auto F4 = ResidueField::make(2, 2, 0);
  const auto g = ResidueElement::constant(F4, 2);
  REQUIRE(g.pth_root().has_value());
  CHECK(*g.pth_root() == g * g);
  for (int a = 1; a < 4; ++a) CHECK(ResidueElement::constant(F4, static_cast<Fq>(a)).pth_root().has_value());
}

TEST_CASE("residue field invariants on random samples") {
  std::mt19937 rng(7);
  for (auto k : {ResidueField::make(2, 1, 1), ResidueField::make(3, 1, 1), ResidueField::make(2, 2, 1),
                 ResidueField::make(2, 1, 2), ResidueField::make(5, 1, 0)}) {
    for (int i = 0; i < 25; ++i) {
      const auto x = random_element(k, rng, 2), y = random_element(k, rng, 2);
      CHECK((x * y).frobenius() == x.frobenius() * y.frobenius());
      const auto root = x.frobenius().pth_root();
      REQUIRE(root.has_value());
      CHECK(*root == x);
      CHECK((x.to_string() == y.to_string()) == (x - y).is_zero());
      CHECK(((x + y) - y) == x);
      if (!y.is_zero()) CHECK((x / y) * y == x);
    }
  }
}

TEST_CASE("p-basis components reassemble") {
  std::mt19937 rng(11);
  for (auto k : {ResidueField::make(2, 1, 1), ResidueField::make(3, 1, 2), ResidueField::make(2, 2, 1)}) {
    for (int i = 0; i < 15; ++i) {
      const auto x = random_element(k, rng, 3);
      auto sum = ResidueElement::zero(k);
      for (const auto& [alpha, c] : x.p_basis_components())
        sum = sum + ResidueElement::monomial(k, alpha) * c.frobenius();
      CHECK(sum == x);
    }
  }
}

TEST_CASE("solve_fp_linear examples") {
  auto k = ResidueField::make(2, 1, 1);
  // Identity on a 3-dimensional window.
  std::vector<SparseVec> id = {{{1, 1}}, {{2, 1}}, {{3, 1}}};
  const SparseVec v = {{1, 1}, {3, 1}};
  auto sol = solve_fp_linear(2, id, v, 3);
  REQUIRE(sol.solvable);
  CHECK(sol.particular == FpVector{1, 0, 1});
  CHECK(sol.kernel.empty());

  // x -> x - x^2 on the constants of F_4(t) viewed over F_2: kernel is F_2,
  // checked by exhausting the four constants.
  auto k4 = ResidueField::make(2, 2, 1);
  TruncationWindow constants{0, 0};
  auto basis = constants.basis(k4);
  REQUIRE(basis.size() == 2);
  std::vector<SparseVec> images;
  for (const auto& b : basis) images.push_back(laurent_coordinates(b - b * b));
  auto ker = kernel_basis(2, images);
  int brute = 0;
  for (int a = 0; a < 4; ++a) {
    const auto x = ResidueElement::constant(k4, static_cast<Fq>(a));
    if ((x - x * x).is_zero()) ++brute;
  }
  CHECK(brute == 2);
  CHECK(ker.size() == 1);
  CHECK(ker[0] == FpVector{1, 0});

  std::vector<SparseVec> zero_map(3);
  CHECK_FALSE(solve_fp_linear(2, zero_map, v, 3).solvable);
  CHECK_THROWS_AS(solve_fp_linear(2, zero_map, v, 4), math_error);
  (void)k;
}

TEST_CASE("truncation window") {
  auto k = ResidueField::make(3, 1, 2);
  TruncationWindow w{2, 1};
  CHECK(w.basis(k).size() == w.dimension(k));
  CHECK(w.dimension(k) == 16);
  const auto b = w.basis(k);
  CHECK(std::count_if(b.begin(), b.end(), [](const ResidueElement& x) { return x.is_one(); }) == 1);
  auto F8 = ResidueField::make(2, 3, 0);
  CHECK(w.basis(F8).size() == 3);
}
