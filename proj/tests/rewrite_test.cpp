#include <doctest.h>

#include <algorithm>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "braidcell/error.hpp"
#include "braidcell/rewrite.hpp"
#include "braidcell/verify.hpp"

using namespace braidcell;

namespace {

std::shared_ptr<const Surface> canonical(const char* spec) {
  return std::make_shared<const Surface>(build_canonical(parse_canonical_spec(spec)));
}

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Walk walk(std::vector<FaceId> faces, std::vector<std::int64_t> winds = {}) {
  if (winds.empty()) winds.assign(faces.size(), 0);
  return Walk{std::move(faces), std::move(winds)};
}

// Swap occupants letter by letter, rightmost first.
std::vector<FaceId> simulate_ends(const Surface& s, const GeneratorWord& w) {
  std::vector<FaceId> at(s.face_count());
  for (FaceId j = 0; j < s.face_count(); ++j) at[j] = j;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    const DualEdge& d = s.edge(it->edge);
    for (FaceId& f : at) {
      if (f == d.tail) {
        f = d.head;
      } else if (f == d.head) {
        f = d.tail;
      }
    }
  }
  return at;
}

// A random palindromic loop from `base` built by a random walk out and back.
Walk random_palindrome(const Surface& s, FaceId base, int height, std::mt19937_64& rng) {
  std::vector<FaceId> out{base};
  for (int k = 1; k < height; ++k) {
    auto nb = s.neighbors(out.back());
    out.push_back(nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)].first);
  }
  Walk w;
  w.faces = out;
  w.faces.insert(w.faces.end(), out.rbegin() + 1, out.rend());
  std::uniform_int_distribution<int> wind(-2, 2);
  for (std::size_t k = 0; k < w.faces.size(); ++k) w.winds.push_back(wind(rng));
  return w;
}

}  // namespace

TEST_CASE("balance_segment walks around one vertex") {
  auto s = canonical("cube");
  for (VertexId v = 0; v < s->vertex_count(); ++v) {
    for (std::int64_t copies : {-2, -1, 1, 2}) {
      Walk seg = balance_segment(*s, 0, v, copies);
      CHECK(seg.front() == 0);
      CHECK(seg.back() == 0);
      std::vector<StrandWord> strands{to_strand(*s, seg)};
      for (FaceId j = 1; j < s->face_count(); ++j) strands.push_back({j, {}});
      CurveSystem c(s, strands);
      CHECK(edge_chain_of(c) == boundary(*s, Chain::unit(Grade::V, v, -copies)));
    }
  }
  CHECK(balance_segment(*s, 3, 0, 0) == walk({3}));
  CHECK_THROWS_AS(balance_segment(*s, 0, 8, 1), PreconditionError);
}

TEST_CASE("balance") {
  auto s = canonical("cube");

  SUBCASE("balanced input needs no moves") {
    BalanceResult r = balance(sigma(s, 4));
    CHECK(r.trace.moves.empty());
    CHECK(r.vertex_chain.is_zero());
    CHECK(r.balanced == sigma(s, 4));
  }
  SUBCASE("a loop around vertex 0") {
    CurveSystem c = parse_curve(s, slurp("cube_vertex_loop.curve"));
    Chain edges = edge_chain_of(c);
    BalanceResult r = balance(c);
    CHECK(serialize_chain(r.vertex_chain) == "chain V 0:1");
    CHECK(boundary(*s, r.vertex_chain) == edges);
    CHECK(edge_chain_of(r.balanced).is_zero());
    REQUIRE(r.trace.moves.size() == 1);
    CHECK(r.trace.moves[0].kind == MoveKind::BalancePrepend);
    CHECK(permutation_of(r.balanced) == permutation_of(c));
  }
  SUBCASE("random vertex loops") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      CurveSystem c = compose(random_vertex_loops(s, 3, seed), curve_of_word(s, random_word(*s, 6, seed)));
      BalanceResult r = balance(c);
      CHECK(edge_chain_of(r.balanced).is_zero());
      CHECK(boundary(*s, r.vertex_chain) == edge_chain_of(c));
      CHECK(permutation_of(r.balanced) == permutation_of(c));
    }
  }
  SUBCASE("a wrapped torus row is not null-homologous") {
    auto t = canonical("torus:3x3");
    CHECK_THROWS_AS(balance(parse_curve(t, slurp("torus_row.curve"))), NotNullHomologous);
  }
}

TEST_CASE("reduce_main on small inputs") {
  auto s = canonical("cube");
  Reduction id = reduce_main(CurveSystem::identity(s));
  CHECK(id.word.letters.empty());
  CHECK(id.trace.moves.empty());

  // A single sigma: strand tail -> head, then head -> tail.
  for (EdgeId e = 0; e < s->edge_count(); ++e) {
    Reduction r = reduce_main(sigma(s, e));
    REQUIRE(r.word.letters.size() == 1);
    CHECK(r.word.letters[0].edge == e);
    CHECK(simulate_ends(*s, r.word) == permutation_of(sigma(s, e)).image());
  }

  // sigma^2 is a pure braid; the engine may pad it, but only with edge 2.
  Reduction sq = reduce_main(compose(sigma(s, 2), sigma(s, 2)));
  CHECK(sq.word.letters.size() % 2 == 0);
  for (const Letter& l : sq.word.letters) CHECK(l.edge == 2);
  CHECK(permutation_of(*s, sq.word).is_identity());
}

TEST_CASE("reduce_main preserves the permutation and ends with one face per word") {
  for (const char* spec : {"tetrahedron", "cube", "torus:3x3", "cube_refined"}) {
    CAPTURE(spec);
    auto s = canonical(spec);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      GeneratorWord w = random_word(*s, seed % 20, seed);
      CurveSystem c = compose(random_vertex_loops(s, 1, seed), curve_of_word(s, w));
      Reduction r = reduce_main(c);
      CHECK(simulate_ends(*s, r.word) == permutation_of(c).image());
      CHECK(edge_chain_of(curve_of_word(s, r.word)).is_zero());
      CHECK(measure(r.trace.final_state) == 0);
      int configs = 0;
      for (const Factor& f : r.trace.final_state.factors) {
        const auto* config = std::get_if<Configuration>(&f);
        if (!config) continue;
        ++configs;
        for (const Walk& x : config->words) {
          CHECK(x.size() == 1);
          CHECK(x.winds[0] == 0);
        }
      }
      CHECK(configs == 1);
      CHECK(r.word == letters_of(r.trace.final_state));
    }
  }
}

TEST_CASE("reduce_main respects the move limit") {
  auto s = canonical("cube");
  CurveSystem c = curve_of_word(s, random_word(*s, 30, 7));
  CHECK_THROWS_AS(reduce_main(c, ReduceOptions{3}), MoveLimitExceeded);
}

TEST_CASE("split_palindrome") {
  // (x1 x2 x1 x2 x1) at the first x2 (pivot 1): the pieces are two copies
  // of (x1 x2 x1) around the single visit (x1).
  Walk loop = walk({0, 1, 0, 1, 0}, {1, 2, 3, 4, 5});
  CHECK(find_split_pivot(loop) == 1);
  SplitPieces p = split_palindrome(loop, 1);
  CHECK(p.right == walk({0, 1, 0}, {1, 2, 0}));
  CHECK(p.middle == walk({0}, {3}));
  CHECK(p.left == walk({0, 1, 0}, {0, 4, 5}));
  CHECK(merge_split(p, 1) == loop);

  SUBCASE("no pivot on a simple detour") {
    CHECK_FALSE(find_split_pivot(walk({0, 1, 2, 1, 0})).has_value());
    CHECK_THROWS_AS(split_palindrome(walk({0, 1, 2, 1, 0}), 1), PreconditionError);
  }
  SUBCASE("tampered pieces are rejected") {
    SplitPieces bad = p;
    bad.left.faces[1] = 2;
    CHECK_THROWS_AS(merge_split(bad, 1), PreconditionError);
  }
  SUBCASE("random round trips") {
    auto s = canonical("tetrahedron");
    std::mt19937_64 rng(3);
    int splits = 0;
    for (int trial = 0; trial < 500; ++trial) {
      Walk w = random_palindrome(*s, 0, 2 + trial % 5, rng);
      auto i = find_split_pivot(w);
      if (!i) continue;
      ++splits;
      SplitPieces q = split_palindrome(w, *i);
      CHECK(is_palindrome(q.left.faces));
      CHECK(is_palindrome(q.middle.faces));
      CHECK(is_palindrome(q.right.faces));
      CHECK(palindrome_height(q.middle) < palindrome_height(w));
      CHECK(merge_split(q, *i) == w);
    }
    CHECK(splits > 50);
  }
}

TEST_CASE("drag_conjugate") {
  auto s = canonical("tetrahedron");
  EdgeId e01 = s->incident_edge(0, 1)->edge;

  DragResult d = drag_conjugate(*s, walk({0, 1, 2, 1, 0}, {1, 0, 3, 0, 2}));
  CHECK(d.dragged == walk({1, 2, 1}, {0, 3, 0}));
  CHECK(d.edge == e01);
  CHECK(d.expanded.empty());
  CHECK(d.left == sigma_power(e01, -5));
  CHECK(d.right == sigma_power(e01, -1));

  // Interior visits of the second face pick up a detour through the base.
  Walk loop = walk({0, 1, 2, 1, 2, 1, 0});
  DragResult e = drag_conjugate(*s, loop);
  CHECK(e.dragged.faces == std::vector<FaceId>{1, 2, 1, 0, 1, 2, 1});
  CHECK(e.expanded == std::vector<int>{3});
  CHECK(undo_drag(*s, 0, e.dragged, 0, 0, e.expanded) == loop);
  CHECK_THROWS_AS(undo_drag(*s, 0, e.dragged, 0, 0, {}), PreconditionError);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Walk w = random_palindrome(*s, trial % 4, 2 + trial % 6, rng);
    DragResult r = drag_conjugate(*s, w);
    CHECK(is_palindrome(r.dragged.faces));
    CHECK(undo_drag(*s, w.front(), r.dragged, r.first_winding, r.last_winding, r.expanded) == w);
  }
}

TEST_CASE("palindrome rules") {
  CHECK(next_palindrome_step(walk({2})).rule == PalindromeRule::Drop);
  CHECK(next_palindrome_step(walk({0, 1, 0})).rule == PalindromeRule::Closed);
  // Returning to the base in the middle is a slide.
  PalindromeStep slide = next_palindrome_step(walk({0, 1, 0, 1, 0}));
  CHECK(slide.rule == PalindromeRule::Slide);
  CHECK(slide.index == 2);
  PalindromeStep split = next_palindrome_step(walk({0, 1, 2, 1, 2, 1, 0}));
  CHECK(split.rule == PalindromeRule::Split);
  CHECK(split.index == 2);
  CHECK(next_palindrome_step(walk({0, 1, 2, 1, 0})).rule == PalindromeRule::Drag);
  CHECK_THROWS_AS(next_palindrome_step(walk({0, 1, 2})), PreconditionError);

  CHECK(palindrome_key(walk({0, 1, 2, 1, 0})) == PalindromeKey{3, 0});
  CHECK(palindrome_key(walk({0, 1, 0})) == PalindromeKey{2, 0});
}

TEST_CASE("a closed loop (a b a) reduces to sigma^2w") {
  auto s = canonical("cube");
  for (EdgeId e = 0; e < s->edge_count(); ++e) {
    const DualEdge& d = s->edge(e);
    for (std::int64_t w : {-3, -1, 0, 1, 2}) {
      Reduction r = reduce_palindrome(s, walk({d.tail, d.head, d.tail}, {0, w, 0}));
      CHECK(r.word == sigma_power(e, 2 * w));
    }
  }
}

TEST_CASE("loop reduction strictly lowers the loop measure") {
  for (const char* spec : {"tetrahedron", "cube", "torus:3x3"}) {
    auto s = canonical(spec);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      Walk w = random_palindrome(*s, trial % s->face_count(), 1 + trial % 7, rng);
      Reduction r = reduce_palindrome(s, w);
      EngineState st = r.trace.initial;
      auto before = loop_measure(st);
      for (const Move& m : r.trace.moves) {
        apply_move(*s, st, m);
        auto after = loop_measure(st);
        CHECK(std::lexicographical_compare(after.begin(), after.end(), before.begin(),
                                           before.end()));
        before = after;
      }
      CHECK(before.empty());
      CHECK(permutation_of(*s, r.word).is_identity());
      CHECK(check_trace(r.trace).passed());
    }
  }
}

TEST_CASE("validate_disk") {
  auto s = canonical("cube");
  auto invariant = [&](std::vector<FaceId> faces) -> std::string {
    try {
      validate_disk(*s, faces);
    } catch (const ValidationError& e) {
      return e.invariant();
    }
    return "";
  };
  CHECK(invariant({0}) == "");
  CHECK(invariant({0, 1, 2, 3, 4}) == "");
  CHECK(invariant({0, 1, 2, 3, 4, 5}) == "not a disk");  // the whole sphere
  CHECK(invariant({}) == "not a disk");
  CHECK(invariant({0, 0}) == "not a disk");
  CHECK(invariant({0, 9}) == "unknown face");
  // Faces 0 and 1 share no edge on the cube.
  REQUIRE_FALSE(s->incident_edge(0, 1).has_value());
  CHECK(invariant({0, 1}) == "not a disk");

  auto t = canonical("torus:3x3");
  CHECK(invariant({}) == "not a disk");
  try {
    validate_disk(*t, {0, 1, 2});  // a full row is an annulus
    FAIL("accepted an annulus");
  } catch (const ValidationError& e) {
    CHECK(e.invariant() == "not a disk");
  }
  validate_disk(*t, {0, 1, 3, 4});
}

TEST_CASE("factor_disk_loop") {
  auto s = canonical("cube");
  const std::vector<FaceId> disk{0, 2, 3, 4, 5};
  // Winds at non-base visits become tree-conjugated puncture loops.
  Walk loop = walk({0, 2, 4, 3, 0}, {0, 1, -2, 0, 0});
  auto gens = factor_disk_loop(*s, disk, loop);
  REQUIRE(gens.size() == 3);
  // Reverse time order: the face-4 visit comes first, twice.
  CHECK(gens[0].conjugator == std::vector<FaceId>{0, 4});
  CHECK(gens[0].loop == walk({0, 4, 0}, {0, -1, 0}));
  CHECK(gens[1] == gens[0]);
  CHECK(gens[2].conjugator == std::vector<FaceId>{0, 2});
  CHECK(gens[2].loop == walk({0, 2, 0}, {0, 1, 0}));

  CHECK(factor_disk_loop(*s, disk, walk({0, 2, 0})).empty());
  try {
    factor_disk_loop(*s, {0, 2, 4}, walk({0, 3, 0}));
    FAIL("accepted a loop outside the disk");
  } catch (const ValidationError& e) {
    CHECK(e.invariant() == "loop leaves disk");
  }
  CHECK_THROWS_AS(factor_disk_loop(*s, disk, walk({0, 2})), PreconditionError);

  Reduction r = reduce_disk_loop(s, disk, loop);
  CHECK(r.trace.moves.front().kind == MoveKind::DiskFactor);
  CHECK(check_trace(r.trace).passed());
  CHECK(permutation_of(*s, r.word).is_identity());
}
