#include "braidcell/rewrite.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>

#include "braidcell/error.hpp"

namespace braidcell {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

std::vector<FaceId> shortest_path(const Surface& s, FaceId from, FaceId to) {
  std::vector<FaceId> parent(s.face_count(), -1);
  std::deque<FaceId> queue{from};
  parent[from] = from;
  while (!queue.empty()) {
    FaceId f = queue.front();
    queue.pop_front();
    if (f == to) break;
    for (auto [g, e] : s.neighbors(f)) {
      if (parent[g] < 0) {
        parent[g] = f;
        queue.push_back(g);
      }
    }
  }
  std::vector<FaceId> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

const std::vector<Walk>& config_words(const TraceRecorder& rec, int factor) {
  const auto* c = std::get_if<Configuration>(&rec.state().factors.at(factor));
  require(c != nullptr, "factor is not a configuration");
  return c->words;
}

int word_starting_at(const std::vector<Walk>& words, FaceId f) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].front() == f) return static_cast<int>(i);
  }
  throw PreconditionError("no word starts at face " + std::to_string(f));
}

Chain balance_into(TraceRecorder& rec, const CurveSystem& curve) {
  const Surface& s = curve.surface();
  Chain target = edge_chain_of(curve);
  std::optional<Chain> vertices = solve_preimage(s, target);
  if (!vertices) {
    throw NotNullHomologous("edge chain is not a boundary: " + serialize_chain(target));
  }
  constexpr FaceId base = 0;
  int word = -1;
  const auto& words = config_words(rec, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].back() == base) word = static_cast<int>(i);
  }
  for (auto [v, c] : vertices->coefficients()) {
    rec.record(Move{MoveKind::BalancePrepend, 0, word, {v, c, base}, {}});
  }
  return *vertices;
}

bool contains_pair(const Walk& w, FaceId first, FaceId second) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (w.faces[i] == first && w.faces[i + 1] == second) return true;
  }
  return false;
}

// One phase of the main loop: leaves the total crossing count 2 lower.
void run_phase(TraceRecorder& rec, int k) {
  while (config_words(rec, 0)[k].size() > 2) move_first_letter(rec, 0, k);
  const FaceId a = config_words(rec, 0)[k].faces[0];
  const FaceId b = config_words(rec, 0)[k].faces[1];

  int m = -1;
  const auto& words = config_words(rec, 0);
  for (std::size_t i = 0; i < words.size() && m < 0; ++i) {
    if (static_cast<int>(i) != k && contains_pair(words[i], b, a)) m = static_cast<int>(i);
  }
  require(m >= 0, "no word crosses back from " + std::to_string(b) + " to " + std::to_string(a));

  while (true) {
    Walk x1 = config_words(rec, 0)[k];
    Walk x2 = config_words(rec, 0)[m];
    if (x1.size() == 2) {
      bool returns = x2.faces[0] == b && x2.faces[1] == a;
      move_first_letter(rec, 0, m);
      if (returns) {
        cancel_prefix(rec, 0, k);  // (b a b) -> (b)
        return;
      }
      continue;
    }
    // x1 = (j a b), x2 = (a kk ...)
    require(x1.size() == 3 && x2.front() == a, "main loop lost its pattern");
    FaceId j = x1.faces[0];
    FaceId kk = x2.faces[1];
    move_first_letter(rec, 0, m);
    if (kk == j) {
      cancel_prefix(rec, 0, k);  // (a j a b) -> (a b)
      return;
    }
    move_first_letter(rec, 0, k);
  }
}

}  // namespace

std::size_t default_move_limit() {
  if (const char* env = std::getenv("BRAIDCELL_MOVE_LIMIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMoveLimit;
}

Walk balance_segment(const Surface& s, FaceId base, VertexId v, std::int64_t copies) {
  require(v >= 0 && v < s.vertex_count(), "unknown vertex " + std::to_string(v));
  require(s.valid_face(base), "unknown face " + std::to_string(base));
  const auto& cycle = s.vertex_cycles()[v];
  std::vector<FaceId> path = shortest_path(s, base, s.from_face(cycle.front()));

  std::vector<FaceId> once = path;
  for (const SignedEdge& se : cycle) once.push_back(s.to_face(se));
  once.insert(once.end(), path.rbegin() + 1, path.rend());
  if (copies > 0) std::reverse(once.begin(), once.end());

  Walk out{{base}, {0}};
  for (std::int64_t c = 0; c < (copies < 0 ? -copies : copies); ++c) {
    out.faces.insert(out.faces.end(), once.begin() + 1, once.end());
  }
  out.winds.assign(out.faces.size(), 0);
  return out;
}

BalanceResult balance(const CurveSystem& curve) {
  TraceRecorder rec(curve.surface_ptr(), state_of(curve), default_move_limit());
  Chain vertices = balance_into(rec, curve);
  Trace trace = std::move(rec).finish();
  std::vector<StrandWord> strands;
  for (const Walk& w : std::get<Configuration>(trace.final_state.factors[0]).words) {
    strands.push_back(to_strand(curve.surface(), w));
  }
  return {CurveSystem(curve.surface_ptr(), std::move(strands)), std::move(vertices),
          std::move(trace)};
}

const Move& cancel_prefix(TraceRecorder& rec, int factor, int word) {
  const Walk& w = config_words(rec, factor).at(word);
  require(w.size() >= 3 && w.faces[0] == w.faces[2],
          "word " + std::to_string(word) + " does not start with a backtrack");
  EdgeId e = rec.surface().incident_edge(w.faces[0], w.faces[1])->edge;
  Move move{MoveKind::CancelPrefix, factor, word, {w.faces[1], w.winds[1], w.winds[0]},
            sigma_power(e, 2 * w.winds[1])};
  return rec.record(std::move(move));
}

const Move& move_first_letter(TraceRecorder& rec, int factor, int word) {
  const auto& words = config_words(rec, factor);
  const Walk& w = words.at(word);
  require(w.size() >= 2, "word " + std::to_string(word) + " has a single face");
  FaceId x = w.faces[0];
  FaceId y = w.faces[1];
  int receiver = word_starting_at(words, y);
  SignedEdge se = *rec.surface().incident_edge(x, y);
  Move move{MoveKind::MoveFirstLetter, factor, word, {receiver, x, y},
            GeneratorWord{{{se.edge, se.sign * (word < receiver ? 1 : -1)}}}};
  return rec.record(std::move(move));
}

Reduction reduce_main(const CurveSystem& curve, const ReduceOptions& options) {
  const Surface& s = curve.surface();
  TraceRecorder rec(curve.surface_ptr(), state_of(curve), options.move_limit);
  balance_into(rec, curve);

  while (true) {
    const auto& words = config_words(rec, 0);
    auto it = std::find_if(words.begin(), words.end(), [](const Walk& w) { return w.size() >= 2; });
    if (it == words.end()) break;
    run_phase(rec, static_cast<int>(it - words.begin()));
  }

  for (std::size_t i = 0; i < config_words(rec, 0).size(); ++i) {
    const Walk& w = config_words(rec, 0)[i];
    if (w.winds[0] == 0) continue;
    EdgeId e = s.neighbors(w.front()).front().second;
    rec.record(Move{MoveKind::ClearWind, 0, static_cast<int>(i), {w.front(), w.winds[0], e},
                    sigma_power(e, 2 * w.winds[0])});
  }

  Trace trace = std::move(rec).finish();
  GeneratorWord word = trace.emitted;
  return {std::move(word), std::move(trace)};
}

// ---------------------------------------------------------------------------
// One-particle loops

namespace {

void require_palindrome(const Walk& loop) {
  require(!loop.faces.empty() && loop.size() % 2 == 1 && is_palindrome(loop.faces),
          "loop is not a palindrome");
}

}  // namespace

int palindrome_height(const Walk& loop) { return static_cast<int>((loop.size() + 1) / 2); }

std::optional<int> find_split_pivot(const Walk& loop) {
  int h = palindrome_height(loop) - 1;
  for (int i = 1; i < h; ++i) {
    if (loop.faces[i - 1] == loop.faces[i + 1]) return i;
  }
  return std::nullopt;
}

SplitPieces split_palindrome(const Walk& loop, int pivot) {
  require_palindrome(loop);
  const int h = palindrome_height(loop) - 1;
  const int i = pivot;
  require(i >= 1 && i < h && loop.faces[i - 1] == loop.faces[i + 1],
          "no split at position " + std::to_string(pivot));
  const auto& y = loop.faces;
  const auto& w = loop.winds;

  Walk right;
  right.faces.assign(y.begin(), y.begin() + i + 1);
  right.faces.insert(right.faces.end(), y.rend() - i, y.rend());
  right.winds.assign(right.faces.size(), 0);
  Walk left = right;
  right.winds[i - 1] = w[i - 1];
  right.winds[i] = w[i];
  left.winds[i] = w[2 * h - i];
  left.winds[i + 1] = w[2 * h - i + 1];

  Walk middle;
  for (int k = 0; k <= 2 * h; ++k) {
    if (k == i - 1 || k == i || k == 2 * h - i || k == 2 * h - i + 1) continue;
    middle.faces.push_back(y[k]);
    middle.winds.push_back(w[k]);
  }
  return {std::move(left), std::move(middle), std::move(right)};
}

Walk merge_split(const SplitPieces& pieces, int pivot) {
  const int i = pivot;
  const Walk& middle = pieces.middle;
  require(pivot >= 1 && !middle.faces.empty() && middle.size() % 2 == 1 &&
              pieces.right.size() == static_cast<std::size_t>(2 * i + 1) &&
              pieces.left.size() == pieces.right.size(),
          "split pieces have the wrong shape");
  const int h = static_cast<int>(middle.size() + 3) / 2;
  require(i < h, "split pieces have the wrong shape");
  Walk out;
  std::size_t next = 0;
  for (int k = 0; k <= 2 * h; ++k) {
    if (k == i - 1 || k == i) {
      out.faces.push_back(pieces.right.faces[k]);
      out.winds.push_back(pieces.right.winds[k]);
    } else if (k == 2 * h - i || k == 2 * h - i + 1) {
      int r = k - (2 * h - 2 * i);  // i or i + 1
      out.faces.push_back(pieces.left.faces[r]);
      out.winds.push_back(pieces.left.winds[r]);
    } else {
      out.faces.push_back(middle.faces[next]);
      out.winds.push_back(middle.winds[next]);
      ++next;
    }
  }
  // The round trip is the only reliable shape check.
  if (!is_palindrome(out.faces) || out.faces[i - 1] != out.faces[i + 1] ||
      split_palindrome(out, i) != pieces) {
    throw PreconditionError("split pieces do not come from one loop");
  }
  return out;
}

DragResult drag_conjugate(const Surface& s, const Walk& loop) {
  require_palindrome(loop);
  require(loop.size() >= 3, "loop has no crossings to drag");
  const int n = static_cast<int>(loop.size()) - 1;
  const FaceId base = loop.faces[0];
  const FaceId second = loop.faces[1];
  DragResult out;
  out.edge = s.incident_edge(base, second)->edge;
  out.first_winding = loop.winds[0];
  out.last_winding = loop.winds[n];
  for (int k = 1; k < n; ++k) {
    out.dragged.faces.push_back(loop.faces[k]);
    out.dragged.winds.push_back(loop.winds[k]);
    if (k >= 2 && k <= n - 2 && loop.faces[k] == second) {
      out.dragged.faces.insert(out.dragged.faces.end(), {base, second});
      out.dragged.winds.insert(out.dragged.winds.end(), {0, 0});
      out.expanded.push_back(k);
    }
  }
  out.left = sigma_power(out.edge, -(2 * out.last_winding + 1));
  out.right = sigma_power(out.edge, -(2 * out.first_winding - 1));
  return out;
}

Walk undo_drag(const Surface& s, FaceId base, const Walk& dragged, std::int64_t a,
               std::int64_t b, const std::vector<int>& expanded) {
  require(!dragged.faces.empty(), "empty dragged loop");
  Walk out{{base}, {a}};
  std::size_t q = 0;
  std::size_t next = 0;
  for (int k = 1; q < dragged.size(); ++k) {
    out.faces.push_back(dragged.faces[q]);
    out.winds.push_back(dragged.winds[q]);
    if (next < expanded.size() && expanded[next] == k) {
      require(q + 2 < dragged.size(), "expanded visit runs past the loop");
      q += 3;
      ++next;
    } else {
      q += 1;
    }
  }
  require(next == expanded.size(), "expanded positions do not fit the loop");
  out.faces.push_back(base);
  out.winds.push_back(b);

  DragResult check = drag_conjugate(s, out);
  if (check.dragged != dragged || check.expanded != expanded) {
    throw PreconditionError("dragged loop does not come from a palindrome at face " +
                            std::to_string(base));
  }
  return out;
}

PalindromeStep next_palindrome_step(const Walk& loop) {
  require_palindrome(loop);
  const int h = palindrome_height(loop) - 1;
  if (h == 0) return {PalindromeRule::Drop, 0};
  if (h == 1) return {PalindromeRule::Closed, 1};
  for (int i = 1; i <= h; ++i) {
    if (loop.faces[i] == loop.faces[0] && loop.faces[i - 1] == loop.faces[i + 1]) {
      return {PalindromeRule::Slide, i};
    }
  }
  if (auto i = find_split_pivot(loop)) return {PalindromeRule::Split, *i};
  return {PalindromeRule::Drag, h};
}

PalindromeKey palindrome_key(const Walk& loop) {
  PalindromeStep step = next_palindrome_step(loop);
  int h = palindrome_height(loop);
  bool detour = step.rule == PalindromeRule::Drag && loop.faces[h - 1] == loop.faces[1];
  return {h, detour ? 1 : 0};
}

std::vector<PalindromeKey> loop_measure(const EngineState& state) {
  std::vector<PalindromeKey> keys;
  for (const Factor& f : state.factors) {
    if (const auto* c = std::get_if<Configuration>(&f)) {
      require(c->words.size() == 1, "state holds a many-particle configuration");
      keys.push_back(palindrome_key(c->words[0]));
    }
  }
  std::sort(keys.rbegin(), keys.rend());
  return keys;
}

void reduce_loops(TraceRecorder& rec) {
  const Surface& s = rec.surface();
  while (true) {
    const auto& factors = rec.state().factors;
    auto it = std::find_if(factors.begin(), factors.end(), [](const Factor& f) {
      return std::holds_alternative<Configuration>(f);
    });
    if (it == factors.end()) return;
    const int f = static_cast<int>(it - factors.begin());
    const auto& words = std::get<Configuration>(*it).words;
    require(words.size() == 1, "state holds a many-particle configuration");
    const Walk loop = words[0];
    const PalindromeStep step = next_palindrome_step(loop);
    const int h = palindrome_height(loop) - 1;

    switch (step.rule) {
      case PalindromeRule::Drop:
        rec.record(Move{MoveKind::DropLoop, f, 0, {loop.front(), loop.winds[0]}, {}});
        break;
      case PalindromeRule::Closed:
        cancel_prefix(rec, f, 0);
        break;
      case PalindromeRule::Slide: {
        const int i = step.index;
        Move move{MoveKind::SlideX2X1X2, f, 0, {i}, {}};
        move.params.insert(move.params.end(), {loop.winds[i - 1], loop.winds[i]});
        if (i < h) {
          // The mirror collapse runs first; it only touches positions past i.
          const int d = 2 * h - i;
          move.params.insert(move.params.end(), {loop.winds[d - 1], loop.winds[d]});
        }
        rec.record(std::move(move));
        break;
      }
      case PalindromeRule::Split:
        rec.record(Move{MoveKind::SplitPalindrome, f, 0, {step.index}, {}});
        break;
      case PalindromeRule::Drag: {
        DragResult d = drag_conjugate(s, loop);
        Move move{MoveKind::DragConjugate, f, 0,
                  {d.edge, d.first_winding, d.last_winding, h,
                   static_cast<std::int64_t>(d.expanded.size())},
                  d.left};
        move.params.insert(move.params.end(), d.expanded.begin(), d.expanded.end());
        move.emitted.letters.insert(move.emitted.letters.end(), d.right.letters.begin(),
                                    d.right.letters.end());
        rec.record(std::move(move));
        break;
      }
    }
  }
}

Reduction reduce_palindrome(std::shared_ptr<const Surface> surface, const Walk& loop,
                            const ReduceOptions& options) {
  to_strand(*surface, loop);  // adjacency check
  require_palindrome(loop);
  TraceRecorder rec(std::move(surface), EngineState{{Configuration{{loop}}}}, options.move_limit);
  reduce_loops(rec);
  Trace trace = std::move(rec).finish();
  GeneratorWord word = trace.emitted;
  return {std::move(word), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Disk subcomplexes

void validate_disk(const Surface& s, const std::vector<FaceId>& faces) {
  std::vector<char> in(s.face_count(), 0);
  for (FaceId f : faces) {
    if (!s.valid_face(f)) throw ValidationError("unknown face", std::to_string(f));
    if (in[f]) throw ValidationError("not a disk", "face " + std::to_string(f) + " listed twice");
    in[f] = 1;
  }
  if (faces.empty()) throw ValidationError("not a disk", "no faces");

  std::vector<char> seen(s.face_count(), 0);
  std::deque<FaceId> queue{faces.front()};
  seen[faces.front()] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    FaceId f = queue.front();
    queue.pop_front();
    for (auto [g, e] : s.neighbors(f)) {
      if (in[g] && !seen[g]) {
        seen[g] = 1;
        ++reached;
        queue.push_back(g);
      }
    }
  }
  if (reached != faces.size()) throw ValidationError("not a disk", "faces are not connected");

  long edges = 0;
  for (const DualEdge& d : s.edges()) edges += in[d.tail] && in[d.head];
  long vertices = 0;
  for (const auto& cycle : s.vertex_cycles()) {
    vertices += std::all_of(cycle.begin(), cycle.end(),
                            [&](const SignedEdge& se) { return in[s.from_face(se)] != 0; });
  }
  long chi = static_cast<long>(faces.size()) - edges + vertices;
  if (chi != 1) {
    throw ValidationError("not a disk", "Euler characteristic " + std::to_string(chi));
  }
}

std::vector<DiskGenerator> factor_disk_loop(const Surface& s, const std::vector<FaceId>& faces,
                                            const Walk& loop) {
  validate_disk(s, faces);
  to_strand(s, loop);  // adjacency check
  std::set<FaceId> in(faces.begin(), faces.end());
  const FaceId base = loop.front();
  if (loop.back() != base) throw PreconditionError("disk loop is not closed");
  for (FaceId f : loop.faces) {
    if (!in.count(f)) {
      throw ValidationError("loop leaves disk", "face " + std::to_string(f));
    }
  }

  // Breadth-first spanning tree of the restricted dual graph.
  std::vector<FaceId> parent(s.face_count(), -1);
  std::deque<FaceId> queue{base};
  parent[base] = base;
  while (!queue.empty()) {
    FaceId f = queue.front();
    queue.pop_front();
    for (auto [g, e] : s.neighbors(f)) {
      if (in.count(g) && parent[g] < 0) {
        parent[g] = f;
        queue.push_back(g);
      }
    }
  }

  std::vector<DiskGenerator> out;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    FaceId pivot = loop.faces[k];
    std::int64_t w = loop.winds[k];
    if (pivot == base || w == 0) continue;
    std::vector<FaceId> path{pivot};
    while (path.back() != base) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());

    DiskGenerator g;
    g.conjugator = path;
    g.loop.faces = path;
    g.loop.faces.insert(g.loop.faces.end(), path.rbegin() + 1, path.rend());
    g.loop.winds.assign(g.loop.faces.size(), 0);
    g.loop.winds[path.size() - 1] = w > 0 ? 1 : -1;
    for (std::int64_t c = 0; c < (w < 0 ? -w : w); ++c) out.push_back(g);
  }
  std::reverse(out.begin(), out.end());  // last in time is leftmost
  return out;
}

Reduction reduce_disk_loop(std::shared_ptr<const Surface> surface,
                           const std::vector<FaceId>& faces, const Walk& loop,
                           const ReduceOptions& options) {
  Move move{MoveKind::DiskFactor, 0, 0, {static_cast<std::int64_t>(faces.size())}, {}};
  move.params.insert(move.params.end(), faces.begin(), faces.end());
  move.params.push_back(static_cast<std::int64_t>(loop.size()));
  move.params.insert(move.params.end(), loop.faces.begin(), loop.faces.end());
  move.params.insert(move.params.end(), loop.winds.begin(), loop.winds.end());

  TraceRecorder rec(std::move(surface), EngineState{{Configuration{{loop}}}}, options.move_limit);
  rec.record(std::move(move));
  reduce_loops(rec);
  Trace trace = std::move(rec).finish();
  GeneratorWord word = trace.emitted;
  return {std::move(word), std::move(trace)};
}

}  // namespace braidcell
