#pragma once

// Cohomological side in degrees <= 2 for local fields with finite residue
// field: the Hilbert symbol computed from enumerated norm groups, field norms
// from Kummer and unramified extensions, and the mod-2 / mod-4 Bockstein row
// for K^x.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bklab/power_classes.hpp"

namespace bklab {

/// zeta_p^exponent.
struct MuPValue {
  int exponent = 0;
  int p = 2;
  bool is_trivial() const { return exponent == 0; }
  std::string to_string() const { return "zeta^" + std::to_string(exponent); }
  bool operator==(const MuPValue& o) const { return exponent == o.exponent && p == o.p; }
};

/// Norm from L = K(alpha), alpha^p = radicand, of sum coeffs[i] alpha^i, as
/// the determinant of the multiplication matrix. All data in O_K.
Raw kummer_norm(const LocalField& field, const Raw& radicand, const std::vector<Raw>& coeffs);

/// Norm groups N(K(a^{1/p})^x) for every class a of K^x/p, and the pairing
/// they determine. Requires zeta_p in K and p in {2, 3}.
class HilbertOracle {
 public:
  explicit HilbertOracle(LocalFieldPtr field, Exec exec = Exec::parallel);

  const LocalFieldPtr& field() const { return table_.field(); }
  const PowerClassTable& classes() const { return table_; }

  MuPValue symbol(const PadicElement& a, const PadicElement& b) const;
  int pairing(std::uint32_t a, std::uint32_t b) const;
  /// b in N(K(a^{1/p})^x), read directly off the enumerated norm group.
  bool is_norm(const PadicElement& b, const PadicElement& a) const;
  /// Membership bitmap over class indices of the norm group for class a.
  const std::vector<char>& norm_group(std::uint32_t a) const { return norm_groups_.at(a); }
  /// Gram matrix of the pairing in the class basis.
  const std::vector<std::vector<int>>& gram() const { return gram_; }
  /// Deepest coefficient precision the enumeration needed.
  int enumeration_depth() const { return depth_; }

 private:
  PowerClassTable table_;
  std::vector<std::vector<char>> norm_groups_;
  std::vector<std::vector<int>> gram_;
  int depth_ = 0;
};

/// Norm classes of K(a^{1/p}) for one class index, by enumeration of
/// normalised elements with coefficients mod pi^T for increasing T.
std::vector<char> enumerate_norm_group(const PowerClassTable& table, std::uint32_t a, int* depth = nullptr);

MuPValue hilbert_symbol(const HilbertOracle& oracle, const PadicElement& a, const PadicElement& b);
/// Uses the shared oracle for the field of a.
MuPValue hilbert_symbol(const PadicElement& a, const PadicElement& b);
/// One oracle per descriptor, built on first use.
std::shared_ptr<const HilbertOracle> shared_hilbert_oracle(const LocalFieldPtr& field);

/// Extension data accepted by norm_k1.
struct ExtensionDatum {
  enum class Kind { kummer, unramified };
  Kind kind = Kind::kummer;
  LocalFieldPtr base;
  /// Kummer: the radicand b of L = K(b^{1/p}).
  PadicElement radicand;
  /// Unramified: the field L itself (same Eisenstein data, larger f).
  LocalFieldPtr top;
  int degree() const;
  std::string describe() const;

  static ExtensionDatum kummer(LocalFieldPtr base, PadicElement radicand);
  /// Unramified extension of degree d of a base with f = 1.
  static ExtensionDatum unramified(LocalFieldPtr base, int d);
};

/// Element of L: Kummer coordinates in the alpha-basis (elements of K), or an
/// element of the unramified top field.
struct ExtensionElement {
  std::vector<PadicElement> kummer_coords;
  PadicElement top_element;
};

PadicElement norm_k1(const ExtensionDatum& ext, const ExtensionElement& x);
/// x in K viewed in L.
ExtensionElement restrict_to(const ExtensionDatum& ext, const PadicElement& x);

struct CheckOutcome {
  std::string clause;
  bool pass = false;
  std::size_t samples = 0;
  std::string evidence;
};

/// q = 1: N(res x) = x^[L:K] on samples; q = 2: (N x, y)_K = (x, res y)_L on
/// samples for unramified L when both oracles exist.
CheckOutcome cor_res_check(const ExtensionDatum& ext, int q, std::size_t samples, std::uint64_t seed);

struct BocksteinReport {
  /// Depth N of the exhausted quotient U_1 / U_N.
  int depth = 0;
  std::uint64_t order_mod4 = 0;
  std::uint64_t order_mod2 = 0;
  std::uint64_t kernel_of_reduction = 0;
  std::uint64_t image_of_squaring = 0;
  std::uint64_t kernel_of_squaring = 0;
  bool reduction_surjective = false;
  bool middle_exact = false;
  bool first_kernel_is_minus_one = false;
  std::size_t counterexamples = 0;
  bool pass() const { return reduction_surjective && middle_exact && first_kernel_is_minus_one && counterexamples == 0; }
};

/// K^x/2 --(x -> x^2)--> K^x/4 --(mod 2)--> K^x/2 by exhaustion; p = 2 only.
BocksteinReport bockstein_exactness_check(const LocalFieldPtr& field);

struct AnchorReport {
  bool found = false;
  PadicElement a, b;
  int level = 0;
  MuPValue value;
};

/// A pair {1 + pi^{e'} [x], pi} with nontrivial Hilbert symbol.
AnchorReport p_brauer_anchor(const HilbertOracle& oracle);

}  // namespace bklab
