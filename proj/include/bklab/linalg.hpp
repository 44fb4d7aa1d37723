#pragma once

// F_p-linear algebra on finite-dimensional subspaces of residue fields and
// differential forms. Vectors are sparse maps from opaque 64-bit coordinate
// keys to residues mod p, so codomains grow on demand.

#include <cstdint>
#include <map>
#include <vector>

#include "bklab/residue.hpp"

namespace bklab {

using SparseVec = std::map<std::int64_t, int>;
using FpVector = std::vector<int>;

/// Packs (form-degree mask, Laurent exponent, F_p digit index) into a key.
std::int64_t coordinate_key(unsigned mask, Monomial exponent, int digit);

/// v += c * w (mod p), dropping zero entries.
void axpy(SparseVec& v, int c, const SparseVec& w, int p);
bool is_zero(const SparseVec& v);

/// F_p coordinates of a Laurent-polynomial residue element, tagged with `mask`.
/// Throws precision_error if the element has a non-monomial denominator.
SparseVec laurent_coordinates(const ResidueElement& x, unsigned mask = 0);

/// Incremental row echelon form over F_p that remembers, for every pivot row,
/// which combination of the inserted vectors produced it.
class EchelonBasis {
 public:
  EchelonBasis(int p, std::size_t expected_inputs = 0) : p_(p), inputs_(expected_inputs) {}

  /// Inserts the next input vector; returns its combination if it was
  /// dependent on earlier inputs (a kernel vector), otherwise nothing.
  std::optional<FpVector> insert(const SparseVec& v);
  /// Reduces v against the pivots; `combination` receives the multipliers so
  /// that v = residual + sum combination_i * input_i.
  SparseVec reduce(SparseVec v, FpVector* combination = nullptr) const;
  bool contains(const SparseVec& v) const { return is_zero(reduce(v)); }
  std::size_t rank() const { return rows_.size(); }
  std::size_t inputs() const { return inserted_; }

 private:
  struct Row {
    std::int64_t pivot;
    SparseVec vec;
    FpVector combination;
  };
  int p_;
  std::size_t inputs_;
  std::size_t inserted_ = 0;
  std::vector<Row> rows_;
};

/// Affine solution set {particular + span(kernel)} of sum x_i * image_i = target.
struct AffineSolution {
  bool solvable = false;
  FpVector particular;
  std::vector<FpVector> kernel;
};

/// Solves the linear system whose i-th column is images[i]. `domain_dim`
/// must equal images.size(); a mismatch throws math_error.
AffineSolution solve_fp_linear(int p, const std::vector<SparseVec>& images, const SparseVec& target,
                               std::size_t domain_dim);

/// Kernel basis of the map whose i-th column is images[i].
std::vector<FpVector> kernel_basis(int p, const std::vector<SparseVec>& images);

/// Rank of a family of vectors.
std::size_t rank_of(int p, const std::vector<SparseVec>& vectors);

/// Finite F_p-subspace of a residue field: numerators of degree <= max_degree
/// in each variable over denominators t1^a t2^b with a, b <= max_pole. For a
/// finite residue field the window is the whole field.
struct TruncationWindow {
  int max_degree = 6;
  int max_pole = 2;

  /// Deterministic F_p-basis: constants g^j times monomials t^beta,
  /// beta in [-max_pole, max_degree]^r, enumerated in increasing grlex order.
  std::vector<ResidueElement> basis(const ResidueFieldPtr& field) const;
  std::size_t dimension(const ResidueFieldPtr& field) const;
  /// Window with both bounds widened by `extra`.
  TruncationWindow enlarged(int extra) const { return {max_degree + extra, max_pole + extra}; }
};

}  // namespace bklab
