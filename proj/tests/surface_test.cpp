#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "braidcell/error.hpp"
#include "braidcell/surface.hpp"

using namespace braidcell;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string invariant_of(const std::string& text) {
  try {
    parse_surface(text);
  } catch (const ValidationError& e) {
    return e.invariant();
  }
  return "";
}

Surface canonical(const char* spec) { return build_canonical(parse_canonical_spec(spec)); }

}  // namespace

TEST_CASE("canonical surfaces have the expected counts") {
  struct Row {
    const char* spec;
    int f, e, v, g;
  };
  for (Row r : {Row{"tetrahedron", 4, 6, 4, 0}, Row{"cube", 6, 12, 8, 0},
                Row{"torus:3x3", 9, 18, 9, 1}, Row{"torus:4x5", 20, 40, 20, 1}}) {
    CAPTURE(r.spec);
    Surface s = canonical(r.spec);
    CHECK(s.face_count() == r.f);
    CHECK(s.edge_count() == r.e);
    CHECK(s.vertex_count() == r.v);
    CHECK(s.genus() == r.g);
  }
}

TEST_CASE("grid families follow closed-form counts") {
  // Counted from the gluing: each cube face cut k x k, or an r x c torus grid.
  for (int k = 1; k <= 4; ++k) {
    Surface s = build_canonical({CanonicalKind::CubeGrid, k, 0});
    CHECK(s.face_count() == 6 * k * k);
    CHECK(s.edge_count() == 12 * k * k);
    CHECK(s.vertex_count() == 6 * k * k + 2);
    CHECK(s.genus() == 0);
  }
  for (int r = 3; r <= 6; ++r) {
    for (int c = 3; c <= 6; ++c) {
      Surface s = build_canonical({CanonicalKind::TorusGrid, r, c});
      CHECK(s.face_count() == r * c);
      CHECK(s.edge_count() == 2 * r * c);
      CHECK(s.vertex_count() == r * c);
      CHECK(s.genus() == 1);
    }
  }
}

TEST_CASE("small torus grids are rejected") {
  for (auto [r, c] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{1, 5}}) {
    try {
      build_canonical({CanonicalKind::TorusGrid, r, c});
      FAIL("accepted a degenerate torus grid");
    } catch (const ValidationError& e) {
      CHECK(e.invariant() == "parameter out of range");
    }
  }
}

TEST_CASE("every edge appears once with each sign in the vertex cycles") {
  for (const char* spec : {"tetrahedron", "cube", "cube_refined", "torus:3x3", "torus:4x5"}) {
    Surface s = canonical(spec);
    std::map<EdgeId, std::pair<int, int>> count;
    for (const auto& cycle : s.vertex_cycles()) {
      for (const SignedEdge& se : cycle) (se.sign > 0 ? count[se.edge].first : count[se.edge].second)++;
    }
    REQUIRE(static_cast<int>(count.size()) == s.edge_count());
    for (auto [e, c] : count) CHECK(c == std::pair{1, 1});
  }
}

TEST_CASE("incident_edge is antisymmetric and matches adjacency") {
  Surface cube = canonical("cube");
  int adjacent = 0;
  for (FaceId a = 0; a < 6; ++a) {
    for (FaceId b = 0; b < 6; ++b) {
      auto ab = cube.incident_edge(a, b);
      auto ba = cube.incident_edge(b, a);
      CHECK(ab.has_value() == ba.has_value());
      if (!ab) continue;
      ++adjacent;
      CHECK(ab->edge == ba->edge);
      CHECK(ab->sign == -ba->sign);
      const DualEdge& d = cube.edge(ab->edge);
      CHECK((ab->sign > 0 ? d.tail : d.head) == a);
    }
  }
  // Each cube face touches four others.
  CHECK(adjacent == 6 * 4);

  // Opposite faces: a face with no shared edge.
  FaceId f = 0;
  std::set<FaceId> near{f};
  for (auto [g, e] : cube.neighbors(f)) near.insert(g);
  REQUIRE(near.size() == 5);
  FaceId opposite = -1;
  for (FaceId g = 0; g < 6; ++g) {
    if (!near.count(g)) opposite = g;
  }
  CHECK_FALSE(cube.incident_edge(f, opposite).has_value());

  Surface tet = canonical("tetrahedron");
  for (FaceId a = 0; a < 4; ++a) {
    for (FaceId b = 0; b < 4; ++b) {
      if (a != b) CHECK(tet.incident_edge(a, b).has_value());
    }
  }
  CHECK_THROWS_AS(tet.incident_edge(0, 7), PreconditionError);
}

TEST_CASE("fixture files parse to the canonical surfaces") {
  CHECK(parse_surface(slurp("tetrahedron.surface")) == canonical("tetrahedron"));
  CHECK(parse_surface(slurp("cube.surface")) == canonical("cube"));
  CHECK(parse_surface(slurp("torus_3x3.surface")) == canonical("torus:3x3"));
}

TEST_CASE("serialization is canonical and round-trips") {
  for (const char* spec : {"tetrahedron", "cube", "cube_refined", "torus:3x3", "torus:4x5"}) {
    Surface s = canonical(spec);
    std::string text = serialize_surface(s);
    Surface back = parse_surface(text);
    CHECK(back == s);
    CHECK(serialize_surface(back) == text);
  }
  // Shuffled line order and comments still give the sorted form.
  std::string text =
      "surface t\nfaces 4\n# comment\nvertex 3 -2 -5 -4\nedge 5 3 2\nedge 4 1 3\n"
      "edge 3 3 0\nedge 2 2 1\nedge 1 0 2\nedge 0 1 0\n"
      "vertex 0 +1 +2 +0\nvertex 1 -0 +4 +3\nvertex 2 -3 +5 -1\nend\n";
  Surface s = parse_surface(text);
  CHECK(s.genus() == 0);
  std::string canon = serialize_surface(s);
  CHECK(canon.find("edge 0 1 0\nedge 1 0 2") != std::string::npos);
}

TEST_CASE("malformed fixtures name the violated invariant") {
  CHECK(invariant_of(slurp("self_neighbor.surface")) == "face self-neighbor");
  CHECK(invariant_of(slurp("double_adjacency.surface")) == "double adjacency");
  CHECK(invariant_of(slurp("broken_cycle.surface")) == "broken cycle");
}

TEST_CASE("other structural violations") {
  const std::string tet = serialize_surface(canonical("tetrahedron"));
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = tet;
    auto at = t.find(from);
    REQUIRE(at != std::string::npos);
    return t.replace(at, from.size(), to);
  };
  // Edge 0 used twice with the same sign.
  CHECK(invariant_of(replace("vertex 1 -0 +4 +3", "vertex 1 +0 +4 +3")) != "");
  // Two disjoint tetrahedra are not connected.
  std::string two = "surface two\nfaces 8\n";
  Surface t = canonical("tetrahedron");
  for (int copy = 0; copy < 2; ++copy) {
    for (EdgeId e = 0; e < 6; ++e) {
      two += "edge " + std::to_string(e + 6 * copy) + " " +
             std::to_string(t.edge(e).tail + 4 * copy) + " " +
             std::to_string(t.edge(e).head + 4 * copy) + "\n";
    }
  }
  for (int copy = 0; copy < 2; ++copy) {
    for (VertexId v = 0; v < 4; ++v) {
      two += "vertex " + std::to_string(v + 4 * copy);
      for (const SignedEdge& se : t.vertex_cycles()[v]) {
        two += std::string(" ") + (se.sign > 0 ? "+" : "-") + std::to_string(se.edge + 6 * copy);
      }
      two += "\n";
    }
  }
  two += "end\n";
  CHECK(invariant_of(two) == "disconnected dual graph");
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_surface("surface x\nfaces four\nend\n");
    FAIL("accepted a bad face count");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_surface("surface x\nfaces 2\nedge 0 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_surface("surfaces x\n"), ParseError);
}

TEST_CASE("canonical surface names") {
  CHECK(parse_canonical_spec("cube_refined").kind == CanonicalKind::CubeGrid);
  CHECK(parse_canonical_spec("cube_refined").rows == 2);
  auto t = parse_canonical_spec("torus:4x5");
  CHECK(t.kind == CanonicalKind::TorusGrid);
  CHECK(t.rows == 4);
  CHECK(t.cols == 5);
  CHECK_THROWS(parse_canonical_spec("klein"));
  CHECK(canonical("cube_grid:3").face_count() == 54);
}
