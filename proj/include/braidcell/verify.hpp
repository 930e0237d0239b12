#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "braidcell/chains.hpp"
#include "braidcell/curve.hpp"
#include "braidcell/rewrite.hpp"
#include "braidcell/trace.hpp"

namespace braidcell {

enum class Direction { Forward, Backward };

struct ReplayResult {
  EngineState state;
  GeneratorWord emitted;
};

/// Forward: applies every move to the initial state and compares the result
/// with the recorded final state and emitted word. Backward: undoes every
/// move starting from the final state and compares with the initial state.
/// Throws ReplayDivergence with the index of the first failing move.
ReplayResult replay(const Trace& trace, Direction direction);

/// Product permutation of a state. Letter factors contribute the
/// permutation of their word; a configuration maps each word's first face
/// to its last.
Permutation permutation_of(const Surface& s, const EngineState& state);

struct CheckEntry {
  std::string name;
  bool pass = true;
  double ms = 0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckEntry> entries;
  /// Serialized trace, filled in only when a check failed.
  std::string counterexample;

  bool passed() const;
  /// One "check <name> <pass|fail> <ms>" line per entry, followed on failure
  /// by the details and the counterexample trace.
  std::string serialize() const;
};

/// Audits a trace on its own: replay in both directions, permutation of
/// the input equals that of the emitted word, emitted word has zero edge
/// chain, crossing count drops by exactly 2 at CancelPrefix and is kept by
/// MoveFirstLetter and reaches 0, first faces stay a bijection, and the
/// palindrome key multiset drops at every move other than DiskFactor on
/// all-palindrome states.
CheckReport check_trace(const Trace& trace);

/// check_trace plus agreement of the trace with the input and result.
CheckReport check_reduction(const CurveSystem& input, const Reduction& result);

GeneratorWord random_word(const Surface& s, std::size_t length, std::uint64_t seed);
/// boundary of a random vertex chain with coefficients in [-bound, bound].
Chain random_exact_chain(const Surface& s, int bound, std::uint64_t seed);
/// Strand 0 runs `count` random vertex loops (random vertex, copies in
/// [-2, 2]) from face 0; every other strand stays put.
CurveSystem random_vertex_loops(std::shared_ptr<const Surface> surface, int count,
                                std::uint64_t seed);

/// Signed swap count per unordered particle pair, particles named by their
/// starting face. Diagnostic only.
std::map<std::pair<int, int>, std::int64_t> crossing_counts(const GeneratorWord& w,
                                                            const Surface& s);

struct FuzzOptions {
  int count = 0;
  int length = 0;
  std::uint64_t seed = 0;
  std::size_t move_limit = kDefaultMoveLimit;
};

struct FuzzCase {
  bool pass = false;
  std::size_t word_length = 0;
  std::size_t input_measure = 0;
  std::size_t moves = 0;
  std::size_t emitted_length = 0;
  std::string failure;         // first failing check or error message
  std::string counterexample;  // curve file plus trace, when available
};

struct FuzzSummary {
  std::string surface;
  FuzzOptions options;
  std::vector<FuzzCase> cases;

  int passed() const;
  int failed() const;
  /// Deterministic text: totals, worst cases and one line per failure.
  std::string serialize() const;
};

/// Seed used for case i of a run.
std::uint64_t case_seed(std::uint64_t seed, int index);

/// Round trip for one case: random word, its curve, reduce_main, check.
FuzzCase run_fuzz_case(std::shared_ptr<const Surface> surface, const FuzzOptions& options,
                       int index);

/// Reference implementation: cases one after another.
FuzzSummary run_fuzz_serial(std::shared_ptr<const Surface> surface, const FuzzOptions& options);
/// Same cases sharded over OpenMP threads; identical output.
FuzzSummary run_fuzz_parallel(std::shared_ptr<const Surface> surface,
                              const FuzzOptions& options);

}  // namespace braidcell
