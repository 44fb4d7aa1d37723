#include "bklab/linalg.hpp"

#include <algorithm>

namespace bklab {

namespace {
constexpr std::int64_t kOffset = 1 << 14;

int inv_mod(int a, int p) {
  for (int b = 1; b < p; ++b)
    if ((a * b) % p == 1) return b;
  throw math_error("non-invertible scalar mod p");
}
}  // namespace

std::int64_t coordinate_key(unsigned mask, Monomial exponent, int digit) {
  return (static_cast<std::int64_t>(mask) << 40) | ((exponent[1] + kOffset) << 24) | ((exponent[0] + kOffset) << 8) |
         static_cast<std::int64_t>(digit);
}

void axpy(SparseVec& v, int c, const SparseVec& w, int p) {
  c = ((c % p) + p) % p;
  if (c == 0) return;
  for (const auto& [k, x] : w) {
    auto [it, inserted] = v.emplace(k, 0);
    it->second = (it->second + c * x) % p;
    if (it->second == 0) v.erase(it);
  }
}

bool is_zero(const SparseVec& v) { return v.empty(); }

SparseVec laurent_coordinates(const ResidueElement& x, unsigned mask) {
  auto terms = x.laurent_terms();
  if (!terms) throw precision_error("element " + x.to_string() + " lies outside every Laurent window");
  const FiniteField& F = x.field()->constants();
  SparseVec out;
  for (const auto& [m, c] : *terms)
    for (int j = 0; j < F.f(); ++j)
      if (int d = F.digit(c, j); d != 0) out[coordinate_key(mask, m, j)] = d;
  return out;
}

SparseVec EchelonBasis::reduce(SparseVec v, FpVector* combination) const {
  if (combination) combination->assign(inputs_, 0);
  for (const auto& row : rows_) {
    auto it = v.find(row.pivot);
    if (it == v.end()) continue;
    const int c = it->second;
    axpy(v, p_ - c, row.vec, p_);
    if (combination)
      for (std::size_t i = 0; i < inputs_; ++i) (*combination)[i] = ((*combination)[i] + c * row.combination[i]) % p_;
  }
  return v;
}

std::optional<FpVector> EchelonBasis::insert(const SparseVec& v) {
  const std::size_t index = inserted_++;
  if (index >= inputs_) {
    inputs_ = index + 1;
    for (auto& row : rows_) row.combination.resize(inputs_, 0);
  }
  FpVector combination;
  SparseVec residual = reduce(v, &combination);
  // residual = v - sum combination_i * input_i
  FpVector self(inputs_, 0);
  for (std::size_t i = 0; i < inputs_; ++i) self[i] = (p_ - combination[i]) % p_;
  self[index] = (self[index] + 1) % p_;
  if (residual.empty()) return self;
  const auto [pivot, lead] = *residual.begin();
  const int scale = inv_mod(lead, p_);
  SparseVec normalized;
  axpy(normalized, scale, residual, p_);
  for (auto& c : self) c = (c * scale) % p_;
  rows_.push_back({pivot, std::move(normalized), std::move(self)});
  return std::nullopt;
}

AffineSolution solve_fp_linear(int p, const std::vector<SparseVec>& images, const SparseVec& target,
                               std::size_t domain_dim) {
  if (images.size() != domain_dim) throw math_error("dimension mismatch in solve_fp_linear");
  EchelonBasis basis(p, images.size());
  AffineSolution out;
  for (const auto& v : images)
    if (auto k = basis.insert(v)) out.kernel.push_back(std::move(*k));
  FpVector combination;
  const SparseVec residual = basis.reduce(target, &combination);
  out.solvable = residual.empty();
  if (out.solvable) out.particular = combination;
  return out;
}

std::vector<FpVector> kernel_basis(int p, const std::vector<SparseVec>& images) {
  return solve_fp_linear(p, images, {}, images.size()).kernel;
}

std::size_t rank_of(int p, const std::vector<SparseVec>& vectors) {
  EchelonBasis basis(p, vectors.size());
  for (const auto& v : vectors) basis.insert(v);
  return basis.rank();
}

std::vector<ResidueElement> TruncationWindow::basis(const ResidueFieldPtr& field) const {
  const FiniteField& F = field->constants();
  std::vector<Monomial> monomials;
  const int r = field->r();
  if (r == 0) {
    monomials.push_back({0, 0});
  } else {
    for (int a = -max_pole; a <= max_degree; ++a) {
      if (r == 1) {
        monomials.push_back({a, 0});
        continue;
      }
      for (int b = -max_pole; b <= max_degree; ++b) monomials.push_back({a, b});
    }
    // Deterministic order: increasing total degree, then by (t2, t1).
    std::sort(monomials.begin(), monomials.end(), [](const Monomial& x, const Monomial& y) {
      if (x[0] + x[1] != y[0] + y[1]) return x[0] + x[1] < y[0] + y[1];
      if (x[1] != y[1]) return x[1] < y[1];
      return x[0] < y[0];
    });
  }
  std::vector<ResidueElement> out;
  for (const auto& m : monomials)
    for (int j = 0; j < F.f(); ++j) out.push_back(ResidueElement::monomial(field, m, F.basis(j)));
  return out;
}

std::size_t TruncationWindow::dimension(const ResidueFieldPtr& field) const {
  std::size_t side = field->r() == 0 ? 1 : static_cast<std::size_t>(max_degree + max_pole + 1);
  std::size_t n = 1;
  for (int i = 0; i < field->r(); ++i) n *= side;
  return n * static_cast<std::size_t>(field->constants().f());
}

}  // namespace bklab
