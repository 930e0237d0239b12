#include "braidcell/trace.hpp"

#include <algorithm>
#include <sstream>

#include "braidcell/error.hpp"
#include "braidcell/rewrite.hpp"
#include "text.hpp"

namespace braidcell {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

Configuration& config_at(EngineState& state, int f) {
  require(f >= 0 && f < static_cast<int>(state.factors.size()), "factor index out of range");
  auto* c = std::get_if<Configuration>(&state.factors[f]);
  require(c != nullptr, "factor " + std::to_string(f) + " is not a configuration");
  return *c;
}

Walk& word_at(Configuration& c, int w) {
  require(w >= 0 && w < static_cast<int>(c.words.size()), "word index out of range");
  return c.words[w];
}

Walk& loop_at(EngineState& state, int f) {
  Configuration& c = config_at(state, f);
  require(c.words.size() == 1, "factor " + std::to_string(f) + " is not a one-particle loop");
  return c.words[0];
}

Factor loop_factor(Walk w) { return Configuration{{std::move(w)}}; }

void emit_right(EngineState& state, int f, const GeneratorWord& letters) {
  if (letters.letters.empty()) return;
  auto next = state.factors.begin() + f + 1;
  if (next != state.factors.end()) {
    if (auto* word = std::get_if<GeneratorWord>(&*next)) {
      word->letters.insert(word->letters.begin(), letters.letters.begin(), letters.letters.end());
      return;
    }
  }
  state.factors.insert(next, letters);
}

void unemit_right(EngineState& state, int f, const GeneratorWord& letters) {
  if (letters.letters.empty()) return;
  require(f + 1 < static_cast<int>(state.factors.size()), "missing emitted letters");
  auto* word = std::get_if<GeneratorWord>(&state.factors[f + 1]);
  require(word != nullptr && word->letters.size() >= letters.letters.size() &&
              std::equal(letters.letters.begin(), letters.letters.end(), word->letters.begin()),
          "emitted letters not found right of factor " + std::to_string(f));
  word->letters.erase(word->letters.begin(), word->letters.begin() + letters.letters.size());
  if (word->letters.empty()) state.factors.erase(state.factors.begin() + f + 1);
}

void check_emission(const Move& move, const GeneratorWord& computed) {
  require(computed == move.emitted, "recorded emission '" + serialize_letters(move.emitted) +
                                        "' differs from computed '" +
                                        serialize_letters(computed) + "'");
}

void check_params(const Move& move, std::size_t n) {
  require(move.params.size() == n, std::string(move_kind_name(move.kind)) + " expects " +
                                       std::to_string(n) + " parameters");
}

SignedEdge edge_between(const Surface& s, FaceId a, FaceId b) {
  auto se = s.incident_edge(a, b);
  require(se.has_value(), "faces " + std::to_string(a) + " and " + std::to_string(b) +
                              " are not adjacent");
  return *se;
}

int move_letter_sign(const Surface& s, FaceId x, FaceId y, int donor, int receiver) {
  return edge_between(s, x, y).sign * (donor < receiver ? 1 : -1);
}

// Removes positions j and j + 1 of a walk with faces[j-1] == faces[j+1].
void collapse(Walk& w, int j, std::int64_t expect_left, std::int64_t expect_mid) {
  require(j >= 1 && j + 1 < static_cast<int>(w.size()) && w.faces[j - 1] == w.faces[j + 1],
          "no backtrack around position " + std::to_string(j));
  require(w.winds[j - 1] == expect_left && w.winds[j] == expect_mid,
          "recorded windings differ at position " + std::to_string(j));
  w.winds[j - 1] += w.winds[j + 1];
  w.faces.erase(w.faces.begin() + j, w.faces.begin() + j + 2);
  w.winds.erase(w.winds.begin() + j, w.winds.begin() + j + 2);
}

void uncollapse(Walk& w, int j, FaceId face, std::int64_t left, std::int64_t mid) {
  require(j >= 1 && j <= static_cast<int>(w.size()), "bad slide position");
  FaceId p = w.faces[j - 1];
  std::int64_t merged = w.winds[j - 1];
  w.winds[j - 1] = left;
  w.faces.insert(w.faces.begin() + j, {face, p});
  w.winds.insert(w.winds.begin() + j, {mid, merged - left});
}

std::vector<int> interior_pivots(const std::vector<int>& expanded, int height) {
  std::vector<int> out;
  for (int t : expanded) {
    if (t < height - 1) out.push_back(t);
  }
  return out;
}

struct DiskParams {
  std::vector<FaceId> faces;
  Walk loop;
};

DiskParams decode_disk(const Move& move) {
  const auto& p = move.params;
  require(!p.empty(), "DiskFactor without parameters");
  std::size_t i = 0;
  DiskParams out;
  std::int64_t n = p[i++];
  require(n >= 0 && i + n < p.size(), "malformed DiskFactor parameters");
  for (std::int64_t k = 0; k < n; ++k) out.faces.push_back(static_cast<FaceId>(p[i++]));
  std::int64_t len = p[i++];
  require(len >= 1 && i + 2 * static_cast<std::size_t>(len) == p.size(),
          "malformed DiskFactor parameters");
  for (std::int64_t k = 0; k < len; ++k) out.loop.faces.push_back(static_cast<FaceId>(p[i++]));
  for (std::int64_t k = 0; k < len; ++k) out.loop.winds.push_back(p[i++]);
  return out;
}

}  // namespace

EngineState state_of(const CurveSystem& curve) {
  Configuration c;
  for (FaceId j = 0; j < curve.surface().face_count(); ++j) c.words.push_back(curve.walk(j));
  return EngineState{{std::move(c)}};
}

GeneratorWord letters_of(const EngineState& state) {
  GeneratorWord out;
  for (const Factor& f : state.factors) {
    if (const auto* w = std::get_if<GeneratorWord>(&f)) {
      out.letters.insert(out.letters.end(), w->letters.begin(), w->letters.end());
    }
  }
  return out;
}

std::size_t measure(const EngineState& state) {
  std::size_t total = 0;
  for (const Factor& f : state.factors) {
    if (const auto* c = std::get_if<Configuration>(&f)) {
      for (const Walk& w : c->words) total += w.crossings();
    }
  }
  return total;
}

bool first_faces_bijective(const Surface& s, const EngineState& state) {
  for (const Factor& f : state.factors) {
    const auto* c = std::get_if<Configuration>(&f);
    if (c == nullptr) continue;
    std::vector<char> seen(s.face_count(), 0);
    for (const Walk& w : c->words) {
      if (w.faces.empty() || !s.valid_face(w.front()) || seen[w.front()]) return false;
      seen[w.front()] = 1;
    }
  }
  return true;
}

std::string_view move_kind_name(MoveKind kind) {
  switch (kind) {
    case MoveKind::BalancePrepend: return "BalancePrepend";
    case MoveKind::CancelPrefix: return "CancelPrefix";
    case MoveKind::MoveFirstLetter: return "MoveFirstLetter";
    case MoveKind::SplitPalindrome: return "SplitPalindrome";
    case MoveKind::DragConjugate: return "DragConjugate";
    case MoveKind::SlideX2X1X2: return "SlideX2X1X2";
    case MoveKind::DiskFactor: return "DiskFactor";
    case MoveKind::ClearWind: return "ClearWind";
    case MoveKind::DropLoop: return "DropLoop";
  }
  return "?";
}

MoveKind parse_move_kind(std::string_view name) {
  for (MoveKind k : {MoveKind::BalancePrepend, MoveKind::CancelPrefix, MoveKind::MoveFirstLetter,
                     MoveKind::SplitPalindrome, MoveKind::DragConjugate, MoveKind::SlideX2X1X2,
                     MoveKind::DiskFactor, MoveKind::ClearWind, MoveKind::DropLoop}) {
    if (move_kind_name(k) == name) return k;
  }
  throw PreconditionError("unknown move kind '" + std::string(name) + "'");
}

void apply_move(const Surface& s, EngineState& state, const Move& move) {
  const auto& p = move.params;
  switch (move.kind) {
    case MoveKind::BalancePrepend: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      FaceId base = static_cast<FaceId>(p[2]);
      require(w.back() == base, "word does not end at the balancing base face");
      Walk seg = balance_segment(s, base, static_cast<VertexId>(p[0]), p[1]);
      check_emission(move, {});
      w.faces.insert(w.faces.end(), seg.faces.begin() + 1, seg.faces.end());
      w.winds.insert(w.winds.end(), seg.winds.begin() + 1, seg.winds.end());
      return;
    }
    case MoveKind::CancelPrefix: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      require(w.size() >= 3 && w.faces[0] == w.faces[2], "word does not start with a backtrack");
      require(w.faces[1] == p[0] && w.winds[1] == p[1] && w.winds[0] == p[2],
              "recorded prefix differs from the word");
      GeneratorWord letters = sigma_power(edge_between(s, w.faces[0], w.faces[1]).edge, 2 * p[1]);
      check_emission(move, letters);
      w.winds[0] += w.winds[2];
      w.faces.erase(w.faces.begin() + 1, w.faces.begin() + 3);
      w.winds.erase(w.winds.begin() + 1, w.winds.begin() + 3);
      emit_right(state, move.factor, letters);
      return;
    }
    case MoveKind::MoveFirstLetter: {
      check_params(move, 3);
      Configuration& c = config_at(state, move.factor);
      int receiver = static_cast<int>(p[0]);
      require(receiver != move.word, "donor and receiver coincide");
      Walk& donor = word_at(c, move.word);
      Walk& recv = word_at(c, receiver);
      require(donor.size() >= 2 && donor.faces[0] == p[1] && donor.faces[1] == p[2],
              "donor word does not start with the recorded faces");
      require(recv.front() == p[2], "receiver does not start at the donor's second face");
      GeneratorWord letters{{{edge_between(s, donor.faces[0], donor.faces[1]).edge,
                              move_letter_sign(s, donor.faces[0], donor.faces[1], move.word,
                                               receiver)}}};
      check_emission(move, letters);
      recv.faces.insert(recv.faces.begin(), donor.faces[0]);
      recv.winds.insert(recv.winds.begin(), donor.winds[0]);
      donor.faces.erase(donor.faces.begin());
      donor.winds.erase(donor.winds.begin());
      emit_right(state, move.factor, letters);
      return;
    }
    case MoveKind::ClearWind: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      require(w.size() == 1 && w.faces[0] == p[0] && w.winds[0] == p[1] && p[1] != 0,
              "word is not a single wound visit as recorded");
      require(!s.neighbors(w.faces[0]).empty() && s.neighbors(w.faces[0]).front().second == p[2],
              "recorded edge is not the lowest edge at the face");
      GeneratorWord letters = sigma_power(static_cast<EdgeId>(p[2]), 2 * p[1]);
      check_emission(move, letters);
      w.winds[0] = 0;
      emit_right(state, move.factor, letters);
      return;
    }
    case MoveKind::DropLoop: {
      check_params(move, 2);
      Walk& w = loop_at(state, move.factor);
      require(w.size() == 1 && w.faces[0] == p[0] && w.winds[0] == p[1],
              "loop is not the recorded single visit");
      check_emission(move, {});
      state.factors.erase(state.factors.begin() + move.factor);
      return;
    }
    case MoveKind::SplitPalindrome: {
      check_params(move, 1);
      SplitPieces pieces = split_palindrome(loop_at(state, move.factor), static_cast<int>(p[0]));
      check_emission(move, {});
      auto at = state.factors.begin() + move.factor;
      *at = loop_factor(std::move(pieces.left));
      state.factors.insert(at + 1, {loop_factor(std::move(pieces.middle)),
                                    loop_factor(std::move(pieces.right))});
      return;
    }
    case MoveKind::SlideX2X1X2: {
      Walk& w = loop_at(state, move.factor);
      int h = palindrome_height(w) - 1;
      int i = p.empty() ? -1 : static_cast<int>(p[0]);
      require(i >= 1 && i <= h && w.faces[i] == w.faces[0], "slide position is not the base face");
      check_params(move, i == h ? 3 : 5);
      check_emission(move, {});
      if (i < h) collapse(w, 2 * h - i, p[3], p[4]);
      collapse(w, i, p[1], p[2]);
      return;
    }
    case MoveKind::DragConjugate: {
      require(p.size() >= 5, "DragConjugate expects at least 5 parameters");
      Walk& loop = loop_at(state, move.factor);
      int height = palindrome_height(loop);
      DragResult d = drag_conjugate(s, loop);
      std::vector<std::int64_t> expect{d.edge, d.first_winding, d.last_winding, height - 1,
                                       static_cast<std::int64_t>(d.expanded.size())};
      for (int t : d.expanded) expect.push_back(t);
      require(expect == p, "recorded drag parameters differ from the loop");
      GeneratorWord both = d.left;
      both.letters.insert(both.letters.end(), d.right.letters.begin(), d.right.letters.end());
      check_emission(move, both);
      std::vector<Factor> left_side{d.left}, right_side{d.right};
      Walk middle = std::move(d.dragged);
      for (int t : interior_pivots(d.expanded, height)) {
        SplitPieces pieces = split_palindrome(middle, t);
        left_side.push_back(loop_factor(std::move(pieces.left)));
        right_side.push_back(loop_factor(std::move(pieces.right)));
        middle = std::move(pieces.middle);
      }
      left_side.push_back(loop_factor(std::move(middle)));
      left_side.insert(left_side.end(), right_side.rbegin(), right_side.rend());
      state.factors.erase(state.factors.begin() + move.factor);
      state.factors.insert(state.factors.begin() + move.factor, left_side.begin(), left_side.end());
      return;
    }
    case MoveKind::DiskFactor: {
      DiskParams dp = decode_disk(move);
      Walk& loop = loop_at(state, move.factor);
      require(loop == dp.loop, "recorded disk loop differs from the factor");
      check_emission(move, {});
      auto gens = factor_disk_loop(s, dp.faces, dp.loop);
      std::vector<Factor> pieces;
      for (auto& g : gens) pieces.push_back(loop_factor(std::move(g.loop)));
      state.factors.erase(state.factors.begin() + move.factor);
      state.factors.insert(state.factors.begin() + move.factor, pieces.begin(), pieces.end());
      return;
    }
  }
  throw PreconditionError("unknown move kind");
}

void unapply_move(const Surface& s, EngineState& state, const Move& move) {
  const auto& p = move.params;
  switch (move.kind) {
    case MoveKind::BalancePrepend: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      Walk seg = balance_segment(s, static_cast<FaceId>(p[2]), static_cast<VertexId>(p[0]), p[1]);
      std::size_t k = seg.size() - 1;
      require(w.size() > k && std::equal(seg.faces.begin(), seg.faces.end(), w.faces.end() - k - 1) &&
                  std::all_of(w.winds.end() - k, w.winds.end(), [](auto x) { return x == 0; }),
              "word does not end with the recorded vertex loops");
      w.faces.resize(w.size() - k);
      w.winds.resize(w.winds.size() - k);
      return;
    }
    case MoveKind::CancelPrefix: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      FaceId first = w.faces[0];
      GeneratorWord letters =
          sigma_power(edge_between(s, first, static_cast<FaceId>(p[0])).edge, 2 * p[1]);
      check_emission(move, letters);
      unemit_right(state, move.factor, letters);
      std::int64_t merged = w.winds[0];
      w.winds[0] = p[2];
      w.faces.insert(w.faces.begin() + 1, {static_cast<FaceId>(p[0]), first});
      w.winds.insert(w.winds.begin() + 1, {p[1], merged - p[2]});
      return;
    }
    case MoveKind::MoveFirstLetter: {
      check_params(move, 3);
      Configuration& c = config_at(state, move.factor);
      int receiver = static_cast<int>(p[0]);
      Walk& donor = word_at(c, move.word);
      Walk& recv = word_at(c, receiver);
      require(recv.size() >= 2 && recv.faces[0] == p[1] && recv.faces[1] == p[2] &&
                  donor.front() == p[2],
              "words do not match the recorded move");
      GeneratorWord letters{{{edge_between(s, static_cast<FaceId>(p[1]), static_cast<FaceId>(p[2])).edge,
                              move_letter_sign(s, static_cast<FaceId>(p[1]),
                                               static_cast<FaceId>(p[2]), move.word, receiver)}}};
      check_emission(move, letters);
      unemit_right(state, move.factor, letters);
      donor.faces.insert(donor.faces.begin(), recv.faces[0]);
      donor.winds.insert(donor.winds.begin(), recv.winds[0]);
      recv.faces.erase(recv.faces.begin());
      recv.winds.erase(recv.winds.begin());
      return;
    }
    case MoveKind::ClearWind: {
      check_params(move, 3);
      Walk& w = word_at(config_at(state, move.factor), move.word);
      require(w.size() == 1 && w.winds[0] == 0 && w.faces[0] == p[0], "word is not cleared");
      check_emission(move, sigma_power(static_cast<EdgeId>(p[2]), 2 * p[1]));
      unemit_right(state, move.factor, move.emitted);
      w.winds[0] = p[1];
      return;
    }
    case MoveKind::DropLoop: {
      check_params(move, 2);
      require(move.factor >= 0 && move.factor <= static_cast<int>(state.factors.size()),
              "factor index out of range");
      state.factors.insert(state.factors.begin() + move.factor,
                           loop_factor(Walk{{static_cast<FaceId>(p[0])}, {p[1]}}));
      return;
    }
    case MoveKind::SplitPalindrome: {
      check_params(move, 1);
      require(move.factor + 2 < static_cast<int>(state.factors.size()), "missing split pieces");
      SplitPieces pieces{loop_at(state, move.factor), loop_at(state, move.factor + 1),
                         loop_at(state, move.factor + 2)};
      Walk merged = merge_split(pieces, static_cast<int>(p[0]));
      state.factors.erase(state.factors.begin() + move.factor + 1,
                          state.factors.begin() + move.factor + 3);
      state.factors[move.factor] = loop_factor(std::move(merged));
      return;
    }
    case MoveKind::SlideX2X1X2: {
      Walk& w = loop_at(state, move.factor);
      require(!p.empty() && (p.size() == 3 || p.size() == 5), "malformed slide parameters");
      int i = static_cast<int>(p[0]);
      FaceId base = w.faces[0];
      uncollapse(w, i, base, p[1], p[2]);
      if (p.size() == 5) {
        int h = palindrome_height(w);
        uncollapse(w, 2 * h - i, base, p[3], p[4]);
      }
      return;
    }
    case MoveKind::DragConjugate: {
      require(p.size() >= 5 && p.size() == 5 + static_cast<std::size_t>(p[4]),
              "malformed drag parameters");
      EdgeId edge = static_cast<EdgeId>(p[0]);
      int apex = static_cast<int>(p[3]);
      std::vector<int> expanded(p.begin() + 5, p.end());
      std::vector<int> pivots = interior_pivots(expanded, apex + 1);
      GeneratorWord left = sigma_power(edge, -(2 * p[2] + 1));
      GeneratorWord right = sigma_power(edge, -(2 * p[1] - 1));
      GeneratorWord both = left;
      both.letters.insert(both.letters.end(), right.letters.begin(), right.letters.end());
      check_emission(move, both);
      int f = move.factor;
      int k = static_cast<int>(pivots.size());
      int last = f + 2 * k + 2;
      require(last < static_cast<int>(state.factors.size()), "missing drag pieces");
      const auto* lw = std::get_if<GeneratorWord>(&state.factors[f]);
      const auto* rw = std::get_if<GeneratorWord>(&state.factors[last]);
      require(lw && *lw == left && rw && *rw == right, "conjugating letters not found");
      Walk middle = loop_at(state, f + k + 1);
      for (int i = k - 1; i >= 0; --i) {
        SplitPieces pieces{loop_at(state, f + 1 + i), middle, loop_at(state, last - 1 - i)};
        middle = merge_split(pieces, pivots[i]);
      }
      const DualEdge& d = s.edge(edge);
      FaceId base = d.tail == middle.front() ? d.head : d.tail;
      Walk original = undo_drag(s, base, middle, p[1], p[2], expanded);
      state.factors.erase(state.factors.begin() + f, state.factors.begin() + last + 1);
      state.factors.insert(state.factors.begin() + f, loop_factor(std::move(original)));
      return;
    }
    case MoveKind::DiskFactor: {
      DiskParams dp = decode_disk(move);
      auto gens = factor_disk_loop(s, dp.faces, dp.loop);
      int n = static_cast<int>(gens.size());
      require(move.factor + n <= static_cast<int>(state.factors.size()), "missing disk pieces");
      for (int k = 0; k < n; ++k) {
        require(loop_at(state, move.factor + k) == gens[k].loop, "disk piece differs");
      }
      state.factors.erase(state.factors.begin() + move.factor,
                          state.factors.begin() + move.factor + n);
      state.factors.insert(state.factors.begin() + move.factor, loop_factor(dp.loop));
      return;
    }
  }
  throw PreconditionError("unknown move kind");
}

TraceRecorder::TraceRecorder(std::shared_ptr<const Surface> surface, EngineState initial,
                             std::size_t move_limit)
    : state_(initial), limit_(move_limit) {
  trace_.surface = std::move(surface);
  trace_.initial = std::move(initial);
}

const Move& TraceRecorder::record(Move move) {
  if (trace_.moves.size() >= limit_) {
    throw MoveLimitExceeded("move limit of " + std::to_string(limit_) + " exceeded");
  }
  apply_move(*trace_.surface, state_, move);
  trace_.moves.push_back(std::move(move));
  return trace_.moves.back();
}

Trace TraceRecorder::finish() && {
  trace_.final_state = state_;
  trace_.emitted = letters_of(state_);
  return std::move(trace_);
}

std::string serialize_walk(const Surface& s, const Walk& walk) {
  StrandWord strand = to_strand(s, walk);
  std::string tokens = serialize_tokens(strand.tokens);
  return std::to_string(strand.start_face) + " :" + (tokens.empty() ? "" : " " + tokens);
}

namespace {

std::string state_block(const Surface* s, const EngineState& state) {
  std::ostringstream out;
  out << "state " << state.factors.size() << "\n";
  for (const Factor& f : state.factors) {
    if (const auto* c = std::get_if<Configuration>(&f)) {
      out << "config " << c->words.size() << "\n";
      for (std::size_t i = 0; i < c->words.size(); ++i) {
        out << "word " << i << " ";
        if (s) {
          out << serialize_walk(*s, c->words[i]);
        } else {
          // Surface-free rendering: faces with windings.
          const Walk& w = c->words[i];
          out << ":";
          for (std::size_t k = 0; k < w.size(); ++k) out << " " << w.faces[k] << "/" << w.winds[k];
        }
        out << "\n";
      }
    } else {
      std::string letters = serialize_letters(std::get<GeneratorWord>(f));
      out << "letters" << (letters.empty() ? "" : " " + letters) << "\n";
    }
  }
  return out.str();
}

}  // namespace

std::string serialize_state(const EngineState& state) { return state_block(nullptr, state); }

std::string serialize_move(const Move& move) {
  std::ostringstream out;
  out << "move " << move_kind_name(move.kind) << " " << move.factor << " " << move.word
      << " params";
  for (auto v : move.params) out << " " << v;
  out << " emit";
  std::string letters = serialize_letters(move.emitted);
  if (!letters.empty()) out << " " << letters;
  return out.str();
}

std::string serialize_trace(const Trace& trace) {
  std::ostringstream out;
  out << "trace " << trace.surface->name() << "\n";
  out << serialize_surface(*trace.surface);
  out << "initial\n" << state_block(trace.surface.get(), trace.initial);
  out << "moves " << trace.moves.size() << "\n";
  for (const Move& m : trace.moves) out << serialize_move(m) << "\n";
  out << "final\n" << state_block(trace.surface.get(), trace.final_state);
  std::string letters = serialize_letters(trace.emitted);
  out << "emitted" << (letters.empty() ? "" : " " + letters) << "\n";
  out << "end\n";
  return out.str();
}

namespace {

using detail::Line;

class TraceReader {
 public:
  explicit TraceReader(std::vector<Line> lines) : lines_(std::move(lines)) {}

  const Line& next(std::string_view keyword) {
    if (pos_ >= lines_.size()) {
      throw ParseError(lines_.empty() ? 1 : lines_.back().number + 1, 1,
                       "expected '" + std::string(keyword) + "'");
    }
    const Line& line = lines_[pos_++];
    detail::expect_keyword(line, 0, keyword);
    return line;
  }
  const Line& peek() const {
    if (pos_ >= lines_.size()) throw ParseError(lines_.back().number + 1, 1, "unexpected end of trace");
    return lines_[pos_];
  }
  bool done() const { return pos_ >= lines_.size(); }

  EngineState state(const Surface& s) {
    const Line& head = next("state");
    head.expect_size(2);
    int n = detail::id_at(head, 1);
    EngineState out;
    for (int k = 0; k < n; ++k) {
      const Line& line = peek();
      if (line.at(0).text == "letters") {
        ++pos_;
        GeneratorWord w = letters(s, line, 1);
        if (w.letters.empty()) line.fail(0, "empty letter factor");
        out.factors.emplace_back(std::move(w));
        continue;
      }
      const Line& cfg = next("config");
      cfg.expect_size(2);
      int words = detail::id_at(cfg, 1);
      Configuration c;
      for (int i = 0; i < words; ++i) {
        const Line& wl = next("word");
        if (detail::id_at(wl, 1) != i) wl.fail(1, "words must be numbered consecutively");
        StrandWord strand{detail::id_at(wl, 2), {}};
        detail::expect_keyword(wl, 3, ":");
        for (std::size_t t = 4; t < wl.tokens.size(); ++t) {
          std::string_view tok = wl.tokens[t].text;
          std::int64_t v = 0;
          if (tok.size() >= 3 && tok[0] == 'x' && (tok[1] == '+' || tok[1] == '-') &&
              detail::parse_int(tok.substr(2), v)) {
            strand.tokens.emplace_back(Cross{{static_cast<EdgeId>(v), tok[1] == '+' ? 1 : -1}});
          } else if (tok.size() >= 2 && tok[0] == 'w' && detail::parse_int(tok.substr(1), v)) {
            strand.tokens.emplace_back(Wind{v});
          } else {
            wl.fail(t, "expected a curve token");
          }
        }
        try {
          c.words.push_back(to_walk(s, strand));
        } catch (const ValidationError& e) {
          wl.fail(4, e.what());
        }
      }
      out.factors.emplace_back(std::move(c));
    }
    return out;
  }

  GeneratorWord letters(const Surface& s, const Line& line, std::size_t first) {
    std::string text;
    for (std::size_t i = first; i < line.tokens.size(); ++i) {
      text += std::string(line.tokens[i].text) + " ";
    }
    try {
      return parse_letters(s, text);
    } catch (const ParseError& e) {
      line.fail(first, e.what());
    }
  }

  std::size_t position() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  const std::vector<Line>& lines() const { return lines_; }

 private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

Trace parse_trace(std::string_view text) {
  TraceReader r(detail::tokenize(text));
  const Line& head = r.next("trace");
  head.expect_size(2);

  // Embedded surface block runs to its own 'end'.
  std::string surface_text;
  while (true) {
    const Line& line = r.peek();
    r.seek(r.position() + 1);
    for (const auto& t : line.tokens) surface_text += std::string(t.text) + " ";
    surface_text += "\n";
    if (line.at(0).text == "end") break;
  }
  Trace trace;
  trace.surface = std::make_shared<const Surface>(parse_surface(surface_text));
  if (trace.surface->name() != head.tokens[1].text) head.fail(1, "surface name mismatch");
  const Surface& s = *trace.surface;

  r.next("initial").expect_size(1);
  trace.initial = r.state(s);
  const Line& moves = r.next("moves");
  moves.expect_size(2);
  int count = detail::id_at(moves, 1);
  for (int i = 0; i < count; ++i) {
    const Line& ml = r.next("move");
    Move m;
    try {
      m.kind = parse_move_kind(ml.at(1).text);
    } catch (const PreconditionError& e) {
      ml.fail(1, e.what());
    }
    m.factor = detail::id_at(ml, 2);
    m.word = detail::id_at(ml, 3);
    detail::expect_keyword(ml, 4, "params");
    std::size_t t = 5;
    for (; t < ml.tokens.size() && ml.tokens[t].text != "emit"; ++t) {
      m.params.push_back(detail::int_at(ml, t));
    }
    detail::expect_keyword(ml, t, "emit");
    m.emitted = r.letters(s, ml, t + 1);
    trace.moves.push_back(std::move(m));
  }
  r.next("final").expect_size(1);
  trace.final_state = r.state(s);
  trace.emitted = r.letters(s, r.next("emitted"), 1);
  r.next("end").expect_size(1);
  if (!r.done()) r.peek().fail(0, "content after 'end'");
  return trace;
}

}  // namespace braidcell
