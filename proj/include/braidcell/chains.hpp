#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "braidcell/surface.hpp"

namespace braidcell {

class CurveSystem;

/// Which cells a chain lives on: vertices of the polyhedron (dual 2-cells),
/// edges, or faces (dual vertices).
enum class Grade { V, E, X };

char grade_letter(Grade g);

/// Sparse integer chain. Zero coefficients are never stored.
class Chain {
 public:
  Chain() = default;
  explicit Chain(Grade grade) : grade_(grade) {}

  static Chain unit(Grade grade, int id, std::int64_t coefficient = 1);

  Grade grade() const { return grade_; }
  const std::map<int, std::int64_t>& coefficients() const { return coeffs_; }
  std::int64_t operator[](int id) const;
  bool is_zero() const { return coeffs_.empty(); }

  void add(int id, std::int64_t value);
  Chain& operator+=(const Chain& other);
  Chain& operator-=(const Chain& other);
  friend Chain operator+(Chain a, const Chain& b) { return a += b; }
  friend Chain operator-(Chain a, const Chain& b) { return a -= b; }
  Chain scaled(std::int64_t factor) const;

  friend bool operator==(const Chain&, const Chain&) = default;

 private:
  Grade grade_ = Grade::E;
  std::map<int, std::int64_t> coeffs_;
};

/// "chain <grade> <id>:<coef> ..." as used in trace files.
std::string serialize_chain(const Chain& c);
Chain parse_chain(std::string_view line);

/// Boundary map of the dual complex ZV -> ZE -> ZX. A vertex maps to the
/// signed sum of its cycle; an edge maps to head - tail. Throws
/// PreconditionError for grade X input.
Chain boundary(const Surface& s, const Chain& c);

/// Signed crossing count per edge summed over all strands.
Chain edge_chain_of(const CurveSystem& curve);

/// Exact integer solver for boundary(c) = target with c a vertex chain.
///
/// The boundary matrix (edges x vertices) is brought to column echelon form
/// H = B U by unimodular column operations, so solving is forward
/// substitution with divisibility checks and the trailing columns of U span
/// the kernel over Z.
class BoundarySolver {
 public:
  explicit BoundarySolver(const Surface& s);

  int rank() const { return rank_; }
  /// Integer basis of ker(boundary: ZV -> ZE).
  std::vector<Chain> kernel_basis() const;

  /// A preimage, or nullopt when target is not a boundary. When the kernel
  /// is spanned by the all-ones chain the result is shifted so that its
  /// minimum coefficient is 0.
  std::optional<Chain> solve(const Chain& target) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int rank_ = 0;
  std::vector<std::vector<std::int64_t>> echelon_;  // rows_ x cols_
  std::vector<std::vector<std::int64_t>> unimodular_;  // cols_ x cols_
  std::vector<int> pivot_row_;
  bool ones_kernel_ = false;
};

std::optional<Chain> solve_preimage(const Surface& s, const Chain& target);

}  // namespace braidcell
