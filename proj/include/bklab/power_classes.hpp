#pragma once

// Finite enumeration of K^x / (K^x)^p. Every unit of level > e' is a p-th
// power, so U_1 / U_1^p is the quotient of the finite group U_1 / U_L,
// L = floor(e') + 1, by the image of y -> y^p. Everything here is computed by
// exhausting that group.

#include <cstdint>
#include <vector>

#include "bklab/padic.hpp"

namespace bklab {

enum class Exec { serial, parallel };

/// Key of x mod pi^L, in [0, q^L).
std::uint64_t residue_key(const LocalField& field, const Raw& x, int L);
/// Number of keys mod pi^L.
std::uint64_t key_space(const LocalField& field, int L);
/// Principal unit 1 + sum_{1<=j<L} pi^j [d_j] where d_j are the base-q digits
/// of index; index ranges over [0, q^{L-1}).
Raw principal_unit_at(const LocalField& field, int L, std::uint64_t index);

/// Keys mod pi^L of y^n for every principal unit y in enumeration order.
std::vector<std::uint64_t> power_keys_serial(const LocalField& field, int L, long long n);
std::vector<std::uint64_t> power_keys_parallel(const LocalField& field, int L, long long n);
std::vector<std::uint64_t> power_keys(const LocalField& field, int L, long long n, Exec exec);

/// F_p-coordinates of K^x / (K^x)^p: slot 0 is v(x) mod p, the other slots
/// are coordinates of the unit part in a greedy basis of generators
/// 1 + pi^m [g^j].
class PowerClassTable {
 public:
  explicit PowerClassTable(LocalFieldPtr field, Exec exec = Exec::parallel);

  const LocalFieldPtr& field() const { return field_; }
  int depth() const { return L_; }
  int dim() const { return 1 + static_cast<int>(generators_.size()); }
  int unit_dim() const { return static_cast<int>(generators_.size()); }
  /// Generators (m, residue) of the unit part, in coordinate order.
  const std::vector<UnitFactor>& generators() const { return generators_; }

  std::vector<int> class_of(const PadicElement& x) const;
  /// Coordinates of a unit (any residue) in the unit slots.
  std::vector<int> unit_class(const Raw& u) const;
  /// Packed class index sum c_i p^i, in [0, p^dim).
  std::uint32_t class_index(const PadicElement& x) const { return pack(class_of(x)); }
  std::uint32_t unit_class_index(const Raw& u) const;
  std::uint32_t pack(const std::vector<int>& coords) const;
  std::vector<int> unpack(std::uint32_t index) const;
  std::uint32_t class_count() const;
  /// pi^c0 * prod generator_i^{c_i}.
  PadicElement representative(const std::vector<int>& coords) const;

  std::uint64_t group_order() const { return group_order_; }
  std::uint64_t image_order() const { return image_order_; }
  /// #{x in image : level(x) >= m} for m = 0..L (index 0 unused).
  const std::vector<std::uint64_t>& image_by_level() const { return image_by_level_; }

 private:
  LocalFieldPtr field_;
  int L_;
  std::vector<UnitFactor> generators_;
  std::vector<std::int32_t> table_;  // key mod pi^L -> packed unit coordinates
  std::uint64_t group_order_ = 0, image_order_ = 0;
  std::vector<std::uint64_t> image_by_level_;
};

struct K1OracleResult {
  int total_dim = 0;
  /// dim gr_m for m = 0..L; zero for all larger m.
  std::vector<int> graded_dims;
  std::uint64_t group_order = 0;  // |U_1 / U_L|
  std::uint64_t image_order = 0;  // |image of p-th powers in U_1 / U_L|
};

/// dim K^x/(K^x)^p and its graded pieces by exhausting U_1 / U_L.
K1OracleResult k1_brute_oracle(const LocalFieldPtr& field, Exec exec = Exec::parallel);

}  // namespace bklab
