#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "braidcell/curve.hpp"
#include "braidcell/surface.hpp"

namespace braidcell {

/// A set of words with one word per basepoint; word i need not start at
/// face i once moves have run, but first faces always form a bijection onto
/// the faces it covers. A single-word configuration is a one-particle loop
/// (every other particle stays put).
struct Configuration {
  std::vector<Walk> words;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

using Factor = std::variant<Configuration, GeneratorWord>;

/// Product of factors read right to left. The engines rewrite one factor at
/// a time while keeping the product equal to the input class. Letter factors
/// are never empty.
struct EngineState {
  std::vector<Factor> factors;
  friend bool operator==(const EngineState&, const EngineState&) = default;
};

EngineState state_of(const CurveSystem& curve);
/// Concatenation of every letter factor, left to right.
GeneratorWord letters_of(const EngineState& state);
/// Total crossings over all configuration factors.
std::size_t measure(const EngineState& state);
/// True when each configuration's first faces are pairwise distinct and,
/// for full configurations (one word per face), cover every face.
bool first_faces_bijective(const Surface& s, const EngineState& state);

enum class MoveKind {
  BalancePrepend,
  CancelPrefix,
  MoveFirstLetter,
  SplitPalindrome,
  DragConjugate,
  SlideX2X1X2,
  DiskFactor,
  ClearWind,
  DropLoop,
};

std::string_view move_kind_name(MoveKind kind);
MoveKind parse_move_kind(std::string_view name);

/// One logged rewriting step. `params` hold everything the inverse needs;
/// `emitted` is the generator word produced (empty for bookkeeping moves).
struct Move {
  MoveKind kind = MoveKind::CancelPrefix;
  int factor = 0;
  int word = 0;
  std::vector<std::int64_t> params;
  GeneratorWord emitted;
  friend bool operator==(const Move&, const Move&) = default;
};

/// Applies `move` to `state`. Every parameter that describes the current
/// state is checked against it, and the emission is recomputed and compared
/// with `move.emitted`. Throws PreconditionError on any mismatch.
void apply_move(const Surface& s, EngineState& state, const Move& move);
/// Exact inverse of apply_move.
void unapply_move(const Surface& s, EngineState& state, const Move& move);

struct Trace {
  std::shared_ptr<const Surface> surface;
  EngineState initial;
  std::vector<Move> moves;
  EngineState final_state;
  GeneratorWord emitted;
  friend bool operator==(const Trace& a, const Trace& b) {
    return *a.surface == *b.surface && a.initial == b.initial && a.moves == b.moves &&
           a.final_state == b.final_state && a.emitted == b.emitted;
  }
};

/// Applies moves to a working state while logging them.
class TraceRecorder {
 public:
  TraceRecorder(std::shared_ptr<const Surface> surface, EngineState initial,
                std::size_t move_limit);

  const Surface& surface() const { return *trace_.surface; }
  const EngineState& state() const { return state_; }
  std::size_t move_count() const { return trace_.moves.size(); }

  /// Applies and logs. Throws MoveLimitExceeded past the limit.
  const Move& record(Move move);
  Trace finish() &&;

 private:
  Trace trace_;
  EngineState state_;
  std::size_t limit_;
};

std::string serialize_state(const EngineState& state);
std::string serialize_move(const Move& move);
std::string serialize_trace(const Trace& trace);
Trace parse_trace(std::string_view text);

std::string serialize_walk(const Surface& s, const Walk& walk);

}  // namespace braidcell
