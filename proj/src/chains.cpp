#include "braidcell/chains.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "braidcell/curve.hpp"
#include "braidcell/error.hpp"
#include "text.hpp"

namespace braidcell {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("integer overflow in chain arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Error("integer overflow in chain arithmetic");
  return r;
}

}  // namespace

char grade_letter(Grade g) {
  switch (g) {
    case Grade::V: return 'V';
    case Grade::E: return 'E';
    case Grade::X: return 'X';
  }
  return '?';
}

Chain Chain::unit(Grade grade, int id, std::int64_t coefficient) {
  Chain c(grade);
  c.add(id, coefficient);
  return c;
}

std::int64_t Chain::operator[](int id) const {
  auto it = coeffs_.find(id);
  return it == coeffs_.end() ? 0 : it->second;
}

void Chain::add(int id, std::int64_t value) {
  if (value == 0) return;
  auto [it, inserted] = coeffs_.emplace(id, value);
  if (!inserted) {
    it->second = checked_add(it->second, value);
    if (it->second == 0) coeffs_.erase(it);
  }
}

Chain& Chain::operator+=(const Chain& other) {
  if (other.grade_ != grade_) throw PreconditionError("chain grade mismatch");
  for (auto [id, v] : other.coeffs_) add(id, v);
  return *this;
}

Chain& Chain::operator-=(const Chain& other) {
  if (other.grade_ != grade_) throw PreconditionError("chain grade mismatch");
  for (auto [id, v] : other.coeffs_) add(id, -v);
  return *this;
}

Chain Chain::scaled(std::int64_t factor) const {
  Chain out(grade_);
  if (factor == 0) return out;
  for (auto [id, v] : coeffs_) out.coeffs_.emplace(id, checked_mul(v, factor));
  return out;
}

std::string serialize_chain(const Chain& c) {
  std::ostringstream out;
  out << "chain " << grade_letter(c.grade());
  for (auto [id, v] : c.coefficients()) out << " " << id << ":" << v;
  return out.str();
}

Chain parse_chain(std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.size() != 1) throw ParseError(1, 1, "expected a single chain line");
  const auto& line = lines[0];
  detail::expect_keyword(line, 0, "chain");
  std::string_view g = line.at(1).text;
  Grade grade = g == "V" ? Grade::V : g == "E" ? Grade::E : g == "X" ? Grade::X
                                                                    : (line.fail(1, "expected V, E or X"), Grade::V);
  Chain c(grade);
  for (std::size_t i = 2; i < line.tokens.size(); ++i) {
    std::string_view t = line.tokens[i].text;
    auto colon = t.find(':');
    std::int64_t id = 0, v = 0;
    if (colon == std::string_view::npos || !detail::parse_int(t.substr(0, colon), id) ||
        id < 0 || !detail::parse_int(t.substr(colon + 1), v)) {
      line.fail(i, "expected <id>:<coefficient>");
    }
    c.add(static_cast<int>(id), v);
  }
  return c;
}

Chain boundary(const Surface& s, const Chain& c) {
  switch (c.grade()) {
    case Grade::V: {
      Chain out(Grade::E);
      for (auto [v, coef] : c.coefficients()) {
        if (v < 0 || v >= s.vertex_count()) {
          throw PreconditionError("unknown vertex " + std::to_string(v));
        }
        for (const SignedEdge& se : s.vertex_cycles()[v]) {
          out.add(se.edge, checked_mul(coef, se.sign));
        }
      }
      return out;
    }
    case Grade::E: {
      Chain out(Grade::X);
      for (auto [e, coef] : c.coefficients()) {
        const DualEdge& d = s.edge(e);
        out.add(d.head, coef);
        out.add(d.tail, -coef);
      }
      return out;
    }
    case Grade::X:
      break;
  }
  throw PreconditionError("face chains have no boundary");
}

Chain edge_chain_of(const CurveSystem& curve) {
  Chain out(Grade::E);
  for (const StrandWord& strand : curve.strands()) {
    for (const CurveToken& t : strand.tokens) {
      if (const auto* x = std::get_if<Cross>(&t)) out.add(x->edge.edge, x->edge.sign);
    }
  }
  return out;
}

BoundarySolver::BoundarySolver(const Surface& s)
    : rows_(s.edge_count()), cols_(s.vertex_count()) {
  echelon_.assign(rows_, std::vector<std::int64_t>(cols_, 0));
  for (VertexId v = 0; v < cols_; ++v) {
    for (const SignedEdge& se : s.vertex_cycles()[v]) echelon_[se.edge][v] += se.sign;
  }
  unimodular_.assign(cols_, std::vector<std::int64_t>(cols_, 0));
  for (int i = 0; i < cols_; ++i) unimodular_[i][i] = 1;

  auto swap_cols = [&](int a, int b) {
    if (a == b) return;
    for (auto& row : echelon_) std::swap(row[a], row[b]);
    for (auto& row : unimodular_) std::swap(row[a], row[b]);
  };
  // col[dst] -= q * col[src]
  auto sub_col = [&](int dst, int src, std::int64_t q) {
    for (auto& row : echelon_) row[dst] = checked_add(row[dst], -checked_mul(q, row[src]));
    for (auto& row : unimodular_) row[dst] = checked_add(row[dst], -checked_mul(q, row[src]));
  };
  auto negate_col = [&](int c) {
    for (auto& row : echelon_) row[c] = -row[c];
    for (auto& row : unimodular_) row[c] = -row[c];
  };

  int k = 0;
  for (int r = 0; r < rows_ && k < cols_; ++r) {
    auto& row = echelon_[r];
    while (true) {
      int best = -1;
      for (int j = k; j < cols_; ++j) {
        if (row[j] != 0 && (best < 0 || std::llabs(row[j]) < std::llabs(row[best]))) best = j;
      }
      if (best < 0) break;
      swap_cols(k, best);
      bool reduced = true;
      for (int j = k + 1; j < cols_; ++j) {
        if (row[j] != 0) {
          sub_col(j, k, row[j] / row[k]);
          if (row[j] != 0) reduced = false;
        }
      }
      if (reduced) break;
    }
    if (row[k] == 0) continue;
    if (row[k] < 0) negate_col(k);
    pivot_row_.push_back(r);
    ++k;
  }
  rank_ = k;

  if (cols_ - rank_ == 1) {
    std::int64_t first = unimodular_[0][rank_];
    ones_kernel_ = (first == 1 || first == -1);
    for (int i = 0; i < cols_ && ones_kernel_; ++i) {
      ones_kernel_ = unimodular_[i][rank_] == first;
    }
  }
}

std::vector<Chain> BoundarySolver::kernel_basis() const {
  std::vector<Chain> basis;
  for (int j = rank_; j < cols_; ++j) {
    Chain c(Grade::V);
    for (int i = 0; i < cols_; ++i) c.add(i, unimodular_[i][j]);
    basis.push_back(std::move(c));
  }
  return basis;
}

std::optional<Chain> BoundarySolver::solve(const Chain& target) const {
  if (target.grade() != Grade::E) throw PreconditionError("target must be an edge chain");
  std::vector<std::int64_t> b(rows_, 0);
  for (auto [e, v] : target.coefficients()) {
    if (e < 0 || e >= rows_) throw PreconditionError("unknown edge " + std::to_string(e));
    b[e] = v;
  }
  std::vector<std::int64_t> y(cols_, 0);
  for (int k = 0; k < rank_; ++k) {
    int r = pivot_row_[k];
    std::int64_t rest = b[r];
    for (int j = 0; j < k; ++j) rest = checked_add(rest, -checked_mul(echelon_[r][j], y[j]));
    if (rest % echelon_[r][k] != 0) return std::nullopt;
    y[k] = rest / echelon_[r][k];
  }
  for (int r = 0; r < rows_; ++r) {
    std::int64_t lhs = 0;
    for (int j = 0; j < rank_; ++j) lhs = checked_add(lhs, checked_mul(echelon_[r][j], y[j]));
    if (lhs != b[r]) return std::nullopt;
  }
  std::vector<std::int64_t> x(cols_, 0);
  for (int i = 0; i < cols_; ++i) {
    for (int j = 0; j < rank_; ++j) x[i] = checked_add(x[i], checked_mul(unimodular_[i][j], y[j]));
  }
  if (ones_kernel_ && cols_ > 0) {
    std::int64_t lo = *std::min_element(x.begin(), x.end());
    for (auto& v : x) v -= lo;
  }
  Chain out(Grade::V);
  for (int i = 0; i < cols_; ++i) out.add(i, x[i]);
  return out;
}

std::optional<Chain> solve_preimage(const Surface& s, const Chain& target) {
  return BoundarySolver(s).solve(target);
}

}  // namespace braidcell
