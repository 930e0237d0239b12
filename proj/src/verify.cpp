#include "braidcell/verify.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "braidcell/error.hpp"

namespace braidcell {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string describe(const EngineState& state) { return serialize_state(state); }

bool all_palindromic_loops(const EngineState& state) {
  for (const Factor& f : state.factors) {
    const auto* c = std::get_if<Configuration>(&f);
    if (c == nullptr) continue;
    if (c->words.size() != 1) return false;
    const Walk& w = c->words[0];
    if (w.faces.empty() || !is_palindrome(w.faces)) return false;
  }
  return true;
}

// Runs `body` and records its outcome; exceptions count as failures.
template <typename Body>
void run_check(CheckReport& report, std::string name, Body&& body) {
  CheckEntry entry{std::move(name), true, 0, {}};
  auto start = Clock::now();
  try {
    entry.detail = body();
    entry.pass = entry.detail.empty();
  } catch (const std::exception& e) {
    entry.pass = false;
    entry.detail = e.what();
  }
  entry.ms = elapsed_ms(start);
  report.entries.push_back(std::move(entry));
}

}  // namespace

ReplayResult replay(const Trace& trace, Direction direction) {
  const Surface& s = *trace.surface;
  const std::size_t n = trace.moves.size();
  if (direction == Direction::Forward) {
    EngineState state = trace.initial;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        apply_move(s, state, trace.moves[i]);
      } catch (const Error& e) {
        throw ReplayDivergence(i, e.what());
      }
    }
    if (state != trace.final_state) {
      throw ReplayDivergence(n, "final state differs\nreplayed:\n" + describe(state) +
                                    "recorded:\n" + describe(trace.final_state));
    }
    GeneratorWord emitted = letters_of(state);
    if (emitted != trace.emitted) {
      throw ReplayDivergence(n, "emitted word differs: replayed '" + serialize_letters(emitted) +
                                    "', recorded '" + serialize_letters(trace.emitted) + "'");
    }
    return {std::move(state), std::move(emitted)};
  }

  EngineState state = trace.final_state;
  if (letters_of(state) != trace.emitted) {
    throw ReplayDivergence(n, "emitted word does not match the final state");
  }
  for (std::size_t i = n; i-- > 0;) {
    try {
      unapply_move(s, state, trace.moves[i]);
    } catch (const Error& e) {
      throw ReplayDivergence(i, e.what());
    }
  }
  if (state != trace.initial) {
    throw ReplayDivergence(0, "initial state differs\nreplayed:\n" + describe(state) +
                                  "recorded:\n" + describe(trace.initial));
  }
  return {std::move(state), letters_of(state)};
}

Permutation permutation_of(const Surface& s, const EngineState& state) {
  Permutation total = Permutation::identity(s.face_count());
  for (const Factor& f : state.factors) {
    if (const auto* w = std::get_if<GeneratorWord>(&f)) {
      total = total.after(permutation_of(s, *w));
      continue;
    }
    std::vector<FaceId> image(s.face_count());
    for (FaceId j = 0; j < s.face_count(); ++j) image[j] = j;
    for (const Walk& w : std::get<Configuration>(f).words) image[w.front()] = w.back();
    total = total.after(Permutation(std::move(image)));
  }
  return total;
}

bool CheckReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const CheckEntry& e) { return e.pass; });
}

std::string CheckReport::serialize() const {
  std::ostringstream out;
  for (const CheckEntry& e : entries) {
    out << "check " << e.name << " " << (e.pass ? "pass" : "fail") << " "
        << static_cast<long long>(e.ms + 0.5) << "\n";
  }
  for (const CheckEntry& e : entries) {
    if (!e.pass) out << "# " << e.name << ": " << e.detail << "\n";
  }
  if (!counterexample.empty()) out << counterexample;
  return out.str();
}

CheckReport check_trace(const Trace& trace) {
  const Surface& s = *trace.surface;
  CheckReport report;

  run_check(report, "replay-forward", [&] {
    replay(trace, Direction::Forward);
    return std::string();
  });
  run_check(report, "replay-backward", [&] {
    replay(trace, Direction::Backward);
    return std::string();
  });
  run_check(report, "permutation", [&] {
    Permutation in = permutation_of(s, trace.initial);
    Permutation out = permutation_of(s, trace.emitted);
    return in == out ? std::string() : std::string("input and emitted permutations differ");
  });
  run_check(report, "edge-chain", [&] {
    Chain c = edge_chain_of(curve_of_word(trace.surface, trace.emitted));
    return c.is_zero() ? std::string() : "emitted word has edge chain " + serialize_chain(c);
  });

  // Step audits share one forward pass.
  std::string measure_fail, bijection_fail, loop_fail;
  auto start = Clock::now();
  try {
    EngineState state = trace.initial;
    if (!first_faces_bijective(s, state)) bijection_fail = "initial state";
    for (std::size_t i = 0; i < trace.moves.size(); ++i) {
      const Move& m = trace.moves[i];
      std::size_t before = measure(state);
      // Disk factorization trades one loop for tree-conjugated ones and may
      // raise heights; only the palindrome rules are held to the measure.
      bool loops = m.kind != MoveKind::DiskFactor && all_palindromic_loops(state);
      std::vector<PalindromeKey> keys_before;
      if (loops) keys_before = loop_measure(state);
      apply_move(s, state, m);
      std::size_t after = measure(state);
      std::string at = "move " + std::to_string(i) + ": ";
      if (measure_fail.empty()) {
        if (m.kind == MoveKind::CancelPrefix && after + 2 != before) {
          measure_fail = at + "CancelPrefix changed measure " + std::to_string(before) + " -> " +
                         std::to_string(after);
        } else if (m.kind == MoveKind::MoveFirstLetter && after != before) {
          measure_fail = at + "MoveFirstLetter changed the measure";
        }
      }
      if (bijection_fail.empty() && !first_faces_bijective(s, state)) {
        bijection_fail = at + "first faces are not a bijection";
      }
      if (loop_fail.empty() && loops && all_palindromic_loops(state) &&
          !(loop_measure(state) < keys_before)) {
        loop_fail = at + "palindrome key multiset did not decrease";
      }
    }
    if (measure_fail.empty() && measure(state) != 0) {
      measure_fail = "final measure " + std::to_string(measure(state));
    }
  } catch (const std::exception& e) {
    if (measure_fail.empty()) measure_fail = e.what();
  }
  double ms = elapsed_ms(start);
  report.entries.push_back({"measure", measure_fail.empty(), ms, measure_fail});
  report.entries.push_back({"bijection", bijection_fail.empty(), 0, bijection_fail});
  report.entries.push_back({"loop-measure", loop_fail.empty(), 0, loop_fail});

  if (!report.passed()) report.counterexample = serialize_trace(trace);
  return report;
}

CheckReport check_reduction(const CurveSystem& input, const Reduction& result) {
  CheckReport report = check_trace(result.trace);
  std::string detail;
  if (!(*result.trace.surface == input.surface())) {
    detail = "trace surface differs from the input surface";
  } else if (result.trace.initial != state_of(input)) {
    detail = "trace does not start at the input curve";
  } else if (result.word != result.trace.emitted) {
    detail = "result word differs from the trace";
  }
  report.entries.push_back({"input", detail.empty(), 0, detail});
  if (!report.passed() && report.counterexample.empty()) {
    report.counterexample = serialize_curve(input) + serialize_trace(result.trace);
  }
  return report;
}

GeneratorWord random_word(const Surface& s, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> edge(0, s.edge_count() - 1);
  std::bernoulli_distribution positive(0.5);
  GeneratorWord w;
  for (std::size_t i = 0; i < length; ++i) {
    int e = edge(rng);
    w.letters.push_back({e, positive(rng) ? 1 : -1});
  }
  return w;
}

Chain random_exact_chain(const Surface& s, int bound, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-bound, bound);
  Chain c(Grade::V);
  for (VertexId v = 0; v < s.vertex_count(); ++v) c.add(v, coef(rng));
  return boundary(s, c);
}

CurveSystem random_vertex_loops(std::shared_ptr<const Surface> surface, int count,
                                std::uint64_t seed) {
  const Surface& s = *surface;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> vertex(0, s.vertex_count() - 1);
  std::uniform_int_distribution<int> copies(-2, 2);
  Walk w{{0}, {0}};
  for (int i = 0; i < count; ++i) {
    int v = vertex(rng);
    int c = copies(rng);
    Walk seg = balance_segment(s, 0, v, c);
    w.faces.insert(w.faces.end(), seg.faces.begin() + 1, seg.faces.end());
  }
  w.winds.assign(w.faces.size(), 0);
  std::vector<StrandWord> strands;
  strands.push_back(to_strand(s, w));
  for (FaceId j = 1; j < s.face_count(); ++j) strands.push_back({j, {}});
  return CurveSystem(std::move(surface), std::move(strands));
}

std::map<std::pair<int, int>, std::int64_t> crossing_counts(const GeneratorWord& w,
                                                            const Surface& s) {
  std::vector<int> occupant(s.face_count());
  for (FaceId f = 0; f < s.face_count(); ++f) occupant[f] = f;
  std::map<std::pair<int, int>, std::int64_t> counts;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    const DualEdge& d = s.edge(it->edge);
    int p = occupant[d.tail];
    int q = occupant[d.head];
    counts[{std::min(p, q), std::max(p, q)}] += it->exponent;
    std::swap(occupant[d.tail], occupant[d.head]);
  }
  return counts;
}

int FuzzSummary::passed() const {
  return static_cast<int>(std::count_if(cases.begin(), cases.end(),
                                        [](const FuzzCase& c) { return c.pass; }));
}

int FuzzSummary::failed() const { return static_cast<int>(cases.size()) - passed(); }

std::string FuzzSummary::serialize() const {
  std::size_t max_moves = 0, max_measure = 0, max_emitted = 0, total_moves = 0;
  int worst = -1;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const FuzzCase& c = cases[i];
    total_moves += c.moves;
    max_measure = std::max(max_measure, c.input_measure);
    max_emitted = std::max(max_emitted, c.emitted_length);
    if (c.moves > max_moves || worst < 0) {
      max_moves = c.moves;
      worst = static_cast<int>(i);
    }
  }
  std::ostringstream out;
  out << "fuzz " << surface << " count " << options.count << " length " << options.length
      << " seed " << options.seed << "\n";
  out << "passed " << passed() << " failed " << failed() << "\n";
  out << "moves total " << total_moves << " max " << max_moves;
  if (worst >= 0) out << " (case " << worst << ")";
  out << "\n";
  out << "max input measure " << max_measure << " max emitted length " << max_emitted << "\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!cases[i].pass) out << "fail case " << i << ": " << cases[i].failure << "\n";
  }
  return out.str();
}

std::uint64_t case_seed(std::uint64_t seed, int index) {
  // splitmix64 step so neighbouring cases get unrelated streams
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

FuzzCase run_fuzz_case(std::shared_ptr<const Surface> surface, const FuzzOptions& options,
                       int index) {
  FuzzCase out;
  std::uint64_t seed = case_seed(options.seed, index);
  std::mt19937_64 rng(seed);
  std::size_t length = std::uniform_int_distribution<int>(0, options.length)(rng);
  GeneratorWord w = random_word(*surface, length, rng());
  out.word_length = length;
  std::string curve_text;
  try {
    CurveSystem curve = curve_of_word(surface, w);
    curve_text = serialize_curve(curve);
    out.input_measure = measure(curve);
    Reduction r = reduce_main(curve, ReduceOptions{options.move_limit});
    out.moves = r.trace.moves.size();
    out.emitted_length = r.word.letters.size();
    CheckReport report = check_reduction(curve, r);
    out.pass = report.passed();
    if (!out.pass) {
      for (const CheckEntry& e : report.entries) {
        if (!e.pass) {
          out.failure = e.name + ": " + e.detail.substr(0, e.detail.find('\n'));
          break;
        }
      }
      out.counterexample = curve_text + report.counterexample;
    }
  } catch (const std::exception& e) {
    out.pass = false;
    out.failure = e.what();
    out.counterexample = curve_text;
  }
  return out;
}

FuzzSummary run_fuzz_serial(std::shared_ptr<const Surface> surface, const FuzzOptions& options) {
  FuzzSummary summary{surface->name(), options, {}};
  for (int i = 0; i < options.count; ++i) {
    summary.cases.push_back(run_fuzz_case(surface, options, i));
  }
  return summary;
}

FuzzSummary run_fuzz_parallel(std::shared_ptr<const Surface> surface,
                              const FuzzOptions& options) {
  FuzzSummary summary{surface->name(), options, {}};
  summary.cases.resize(std::max(options.count, 0));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < options.count; ++i) {
    summary.cases[i] = run_fuzz_case(surface, options, i);
  }
  return summary;
}

}  // namespace braidcell
