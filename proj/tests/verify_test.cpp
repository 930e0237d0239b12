#include <doctest.h>

#include <random>

#include "braidcell/error.hpp"
#include "braidcell/verify.hpp"

using namespace braidcell;

namespace {

std::shared_ptr<const Surface> canonical(const char* spec) {
  return std::make_shared<const Surface>(build_canonical(parse_canonical_spec(spec)));
}

const CheckEntry& entry(const CheckReport& r, const std::string& name) {
  for (const CheckEntry& e : r.entries) {
    if (e.name == name) return e;
  }
  FAIL("no check named " << name);
  throw 0;
}

Trace sample_trace(std::uint64_t seed) {
  auto s = canonical("cube");
  CurveSystem c = compose(random_vertex_loops(s, 2, seed), curve_of_word(s, random_word(*s, 12, seed)));
  return reduce_main(c).trace;
}

}  // namespace

TEST_CASE("replay reproduces recorded traces in both directions") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Trace t = sample_trace(seed);
    ReplayResult fwd = replay(t, Direction::Forward);
    CHECK(fwd.state == t.final_state);
    CHECK(fwd.emitted == t.emitted);
    ReplayResult back = replay(t, Direction::Backward);
    CHECK(back.state == t.initial);
    CHECK(check_trace(t).passed());
  }
}

TEST_CASE("a tampered move is reported at its index") {
  Trace t = sample_trace(4);
  REQUIRE(t.moves.size() > 6);
  for (std::size_t at : {std::size_t{0}, std::size_t{3}, t.moves.size() - 1}) {
    CAPTURE(at);
    Trace bad = t;
    Move& m = bad.moves[at];
    if (m.emitted.letters.empty()) {
      m.emitted = sigma_power(0, 1);
    } else {
      m.emitted.letters[0].exponent = -m.emitted.letters[0].exponent;
    }
    try {
      replay(bad, Direction::Forward);
      FAIL("tampered trace replayed");
    } catch (const ReplayDivergence& e) {
      CHECK(e.move_index() == at);
    }
    CheckReport r = check_trace(bad);
    CHECK_FALSE(r.passed());
    CHECK_FALSE(entry(r, "replay-forward").pass);
    CHECK_FALSE(r.counterexample.empty());
  }
}

TEST_CASE("a truncated trace fails the measure check and nothing else") {
  Trace t = sample_trace(9);
  REQUIRE(t.moves.size() > 2);
  Trace cut = t;
  cut.moves.resize(t.moves.size() / 2);
  EngineState st = t.initial;
  for (const Move& m : cut.moves) apply_move(*t.surface, st, m);
  cut.final_state = st;
  cut.emitted = letters_of(st);
  REQUIRE(measure(st) > 0);

  CheckReport r = check_trace(cut);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(entry(r, "measure").pass);
  CHECK(entry(r, "replay-forward").pass);
  CHECK(entry(r, "replay-backward").pass);
  CHECK(entry(r, "bijection").pass);
  CHECK(r.serialize().find("check measure fail") != std::string::npos);
}

TEST_CASE("check_reduction ties the trace to the input") {
  auto s = canonical("cube");
  CurveSystem c = curve_of_word(s, random_word(*s, 10, 2));
  Reduction r = reduce_main(c);
  CHECK(check_reduction(c, r).passed());

  CurveSystem other = curve_of_word(s, random_word(*s, 10, 3));
  CheckReport wrong = check_reduction(other, r);
  CHECK_FALSE(entry(wrong, "input").pass);

  Reduction altered = r;
  altered.word.letters.push_back({0, 1});
  CHECK_FALSE(entry(check_reduction(c, altered), "input").pass);
}

TEST_CASE("report lines") {
  CheckReport r = check_trace(sample_trace(1));
  std::string text = r.serialize();
  for (const char* name : {"replay-forward", "replay-backward", "permutation", "edge-chain",
                           "measure", "bijection", "loop-measure"}) {
    CHECK(text.find(std::string("check ") + name + " pass ") != std::string::npos);
  }
}

TEST_CASE("state permutations") {
  auto s = canonical("tetrahedron");
  EngineState st{{Configuration{{Walk{{0, 1}, {0, 0}}, Walk{{1, 0}, {0, 0}}, Walk{{2}, {0}},
                                 Walk{{3}, {0}}}}}};
  CHECK(permutation_of(*s, st) == Permutation::transposition(4, 0, 1));
  EdgeId e = s->incident_edge(1, 2)->edge;
  st.factors.push_back(GeneratorWord{{{e, 1}}});
  // Rightmost factor first: swap 1,2 then 0,1.
  CHECK(permutation_of(*s, st) ==
        Permutation::transposition(4, 0, 1).after(Permutation::transposition(4, 1, 2)));
}

TEST_CASE("random generators are deterministic") {
  auto s = canonical("torus:3x3");
  CHECK(random_word(*s, 25, 77) == random_word(*s, 25, 77));
  CHECK_FALSE(random_word(*s, 25, 77) == random_word(*s, 25, 78));
  CHECK(random_word(*s, 25, 77).letters.size() == 25);
  CHECK(random_exact_chain(*s, 3, 5) == random_exact_chain(*s, 3, 5));
  CHECK(random_vertex_loops(s, 2, 8) == random_vertex_loops(s, 2, 8));
  CHECK(case_seed(1, 0) != case_seed(1, 1));
  CHECK(case_seed(1, 0) != case_seed(2, 0));
}

TEST_CASE("crossing_counts follow the particles") {
  auto s = canonical("tetrahedron");
  EdgeId e01 = s->incident_edge(0, 1)->edge;
  EdgeId e12 = s->incident_edge(1, 2)->edge;
  // sigma_e01 then sigma_e12: particle 0 reaches face 1, then swaps with 2.
  auto counts = crossing_counts({{{e12, 1}, {e01, -1}}}, *s);
  CHECK(counts.size() == 2);
  CHECK(counts[{0, 1}] == -1);
  CHECK(counts[{0, 2}] == 1);
  auto cancel = crossing_counts({{{e01, 1}, {e01, -1}}}, *s);
  CHECK(cancel[{0, 1}] == 0);
}

TEST_CASE("serial and parallel fuzz runs agree") {
  for (const char* spec : {"cube", "torus:3x3"}) {
    auto s = canonical(spec);
    FuzzOptions opt{60, 20, 12345, kDefaultMoveLimit};
    FuzzSummary a = run_fuzz_serial(s, opt);
    FuzzSummary b = run_fuzz_parallel(s, opt);
    CHECK(a.failed() == 0);
    CHECK(a.passed() == 60);
    CHECK(a.serialize() == b.serialize());
  }
  auto s = canonical("cube");
  FuzzSummary none = run_fuzz_parallel(s, {0, 10, 1, kDefaultMoveLimit});
  CHECK(none.cases.empty());
  CHECK(none.serialize().find("passed 0 failed 0") != std::string::npos);
}

TEST_CASE("fuzz failures carry a counterexample") {
  auto s = canonical("cube");
  FuzzSummary r = run_fuzz_serial(s, {20, 20, 5, 1});
  REQUIRE(r.failed() > 0);
  for (const FuzzCase& c : r.cases) {
    if (c.pass) continue;
    CHECK(c.failure.find("move limit") != std::string::npos);
    CHECK(c.counterexample.rfind("curve cube", 0) == 0);
  }
  CHECK(r.serialize().find("fail case ") != std::string::npos);
}
