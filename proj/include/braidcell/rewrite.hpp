#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "braidcell/chains.hpp"
#include "braidcell/curve.hpp"
#include "braidcell/trace.hpp"

namespace braidcell {

inline constexpr std::size_t kDefaultMoveLimit = 1'000'000;

/// kDefaultMoveLimit unless BRAIDCELL_MOVE_LIMIT holds a positive integer.
std::size_t default_move_limit();

struct ReduceOptions {
  std::size_t move_limit = kDefaultMoveLimit;
};

struct Reduction {
  GeneratorWord word;
  Trace trace;
};

// ---------------------------------------------------------------------------
// Balancing

/// Closed walk from `base` to vertex v's cycle, once around it and back,
/// repeated |copies| times; traversed backwards when copies > 0 so that its
/// edge chain is -copies * boundary(v).
Walk balance_segment(const Surface& s, FaceId base, VertexId v, std::int64_t copies);

struct BalanceResult {
  CurveSystem balanced;
  Chain vertex_chain;
  Trace trace;
};

/// Appends vertex loops to the strand ending at face 0 until the edge chain
/// vanishes. Throws NotNullHomologous when the edge chain is not a boundary.
BalanceResult balance(const CurveSystem& curve);

// ---------------------------------------------------------------------------
// Many-particle moves on a full configuration

/// Deletes a leading back-and-forth crossing of word `word`, emitting
/// sigma^(2w) for the winding w of the enclosed visit.
const Move& cancel_prefix(TraceRecorder& rec, int factor, int word);

/// Hands the first face of word `word` to the word starting at its second
/// face, emitting one letter on the edge between them.
const Move& move_first_letter(TraceRecorder& rec, int factor, int word);

/// Balance, then shrink face sets phase by phase until every word is a
/// single face, then clear leftover windings.
Reduction reduce_main(const CurveSystem& curve, const ReduceOptions& options = {});

// ---------------------------------------------------------------------------
// One-particle loops

int palindrome_height(const Walk& loop);

/// Lowest i in 1..h-1 (h = height - 1) with faces[i-1] == faces[i+1].
std::optional<int> find_split_pivot(const Walk& loop);

/// Pieces of a split. The loop equals left * middle * right, right first.
struct SplitPieces {
  Walk left;
  Walk middle;
  Walk right;
  friend bool operator==(const SplitPieces&, const SplitPieces&) = default;
};

SplitPieces split_palindrome(const Walk& loop, int pivot);
Walk merge_split(const SplitPieces& pieces, int pivot);

struct DragResult {
  Walk dragged;
  EdgeId edge = 0;
  std::int64_t first_winding = 0;  // a
  std::int64_t last_winding = 0;   // b
  /// Positions in the input loop whose face was expanded s -> s b s.
  std::vector<int> expanded;
  /// The loop equals left * dragged * right.
  GeneratorWord left;
  GeneratorWord right;
};

/// Conjugates by the edge between the first two faces: drops the outer
/// visits and expands every interior visit of the second face s into s b s.
DragResult drag_conjugate(const Surface& s, const Walk& loop);
Walk undo_drag(const Surface& s, FaceId base, const Walk& dragged, std::int64_t a,
               std::int64_t b, const std::vector<int>& expanded);

enum class PalindromeRule { Drop, Closed, Slide, Split, Drag };

struct PalindromeStep {
  PalindromeRule rule;
  int index = 0;
};

/// The rule reduce_palindrome applies next to a loop.
PalindromeStep next_palindrome_step(const Walk& loop);

/// Well-founded key: (height, 1 if the next step is a drag whose apex is the
/// second face else 0). Every rule replaces a loop by loops of smaller key.
struct PalindromeKey {
  int height = 0;
  int detour = 0;
  auto operator<=>(const PalindromeKey&) const = default;
};

PalindromeKey palindrome_key(const Walk& loop);
/// Keys of all loop factors, sorted descending (multiset order compares
/// these lexicographically).
std::vector<PalindromeKey> loop_measure(const EngineState& state);

Reduction reduce_palindrome(std::shared_ptr<const Surface> surface, const Walk& loop,
                            const ReduceOptions& options = {});

/// Drives every loop factor of the recorder's state to letters.
void reduce_loops(TraceRecorder& rec);

// ---------------------------------------------------------------------------
// Disk subcomplexes

struct DiskGenerator {
  std::vector<FaceId> conjugator;  // tree path from the base face to the pivot
  Walk loop;                       // palindromic puncture loop
  friend bool operator==(const DiskGenerator&, const DiskGenerator&) = default;
};

/// Throws ValidationError("not a disk") unless the faces induce a connected
/// dual subgraph whose filled complex has Euler characteristic 1.
void validate_disk(const Surface& s, const std::vector<FaceId>& faces);

/// Writes a loop inside a disk as a product of tree-conjugated puncture
/// loops, listed left to right in product order.
std::vector<DiskGenerator> factor_disk_loop(const Surface& s, const std::vector<FaceId>& faces,
                                            const Walk& loop);

Reduction reduce_disk_loop(std::shared_ptr<const Surface> surface,
                           const std::vector<FaceId>& faces, const Walk& loop,
                           const ReduceOptions& options = {});

}  // namespace braidcell
