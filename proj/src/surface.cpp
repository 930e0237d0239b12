#include "braidcell/surface.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <sstream>

#include "braidcell/error.hpp"
#include "text.hpp"

namespace braidcell {

namespace {

std::string pair_str(FaceId a, FaceId b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

Surface Surface::create(std::string name, int face_count,
                        std::vector<DualEdge> edges,
                        std::vector<std::vector<SignedEdge>> vertex_cycles) {
  if (face_count < 1) {
    throw ValidationError("face count", "a surface needs at least one face");
  }
  Surface s;
  s.name_ = std::move(name);
  s.face_count_ = face_count;
  s.edges_ = std::move(edges);
  s.cycles_ = std::move(vertex_cycles);
  s.neighbors_.assign(face_count, {});

  for (EdgeId e = 0; e < s.edge_count(); ++e) {
    const DualEdge& d = s.edges_[e];
    if (!s.valid_face(d.tail) || !s.valid_face(d.head)) {
      throw ValidationError("unknown face",
                            "edge " + std::to_string(e) + " joins " +
                                pair_str(d.tail, d.head));
    }
    if (d.tail == d.head) {
      throw ValidationError("face self-neighbor",
                            "edge " + std::to_string(e) + " has both sides on face " +
                                std::to_string(d.tail));
    }
    auto key = std::minmax(d.tail, d.head);
    auto [it, inserted] = s.pair_to_edge_.emplace(key, e);
    if (!inserted) {
      throw ValidationError("double adjacency",
                            "edges " + std::to_string(it->second) + " and " +
                                std::to_string(e) + " both join faces " +
                                pair_str(key.first, key.second));
    }
    s.neighbors_[d.tail].emplace_back(d.head, e);
    s.neighbors_[d.head].emplace_back(d.tail, e);
  }

  std::vector<std::array<int, 2>> seen(s.edges_.size(), {0, 0});
  for (VertexId v = 0; v < s.vertex_count(); ++v) {
    const auto& cycle = s.cycles_[v];
    if (cycle.empty()) {
      throw ValidationError("broken cycle",
                            "vertex " + std::to_string(v) + " has an empty cycle");
    }
    for (const SignedEdge& se : cycle) {
      if (!s.valid_edge(se.edge) || (se.sign != 1 && se.sign != -1)) {
        throw ValidationError("unknown edge",
                              "vertex " + std::to_string(v) + " lists edge " +
                                  std::to_string(se.edge));
      }
      ++seen[se.edge][se.sign > 0 ? 0 : 1];
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const SignedEdge& cur = cycle[i];
      const SignedEdge& next = cycle[(i + 1) % cycle.size()];
      if (s.to_face(cur) != s.from_face(next)) {
        throw ValidationError(
            "broken cycle",
            "vertex " + std::to_string(v) + ": edge " + std::to_string(cur.edge) +
                " ends on face " + std::to_string(s.to_face(cur)) + " but edge " +
                std::to_string(next.edge) + " starts on face " +
                std::to_string(s.from_face(next)));
      }
    }
  }
  for (EdgeId e = 0; e < s.edge_count(); ++e) {
    if (seen[e][0] != 1 || seen[e][1] != 1) {
      throw ValidationError("edge sign multiplicity",
                            "edge " + std::to_string(e) + " occurs " +
                                std::to_string(seen[e][0]) + " times with + and " +
                                std::to_string(seen[e][1]) +
                                " times with - across vertex cycles");
    }
  }

  std::vector<char> reached(face_count, 0);
  std::queue<FaceId> frontier;
  frontier.push(0);
  reached[0] = 1;
  int count = 1;
  while (!frontier.empty()) {
    FaceId f = frontier.front();
    frontier.pop();
    for (auto [g, e] : s.neighbors_[f]) {
      if (!reached[g]) {
        reached[g] = 1;
        ++count;
        frontier.push(g);
      }
    }
  }
  if (count != face_count) {
    auto it = std::find(reached.begin(), reached.end(), 0);
    throw ValidationError("disconnected dual graph",
                          "face " + std::to_string(it - reached.begin()) +
                              " is unreachable from face 0");
  }

  int euler = s.vertex_count() - s.edge_count() + s.face_count_;
  if (euler > 2 || euler % 2 != 0) {
    throw ValidationError("euler characteristic",
                          "V - E + F = " + std::to_string(euler) +
                              " is not 2 - 2g for any genus g >= 0");
  }
  s.genus_ = (2 - euler) / 2;
  return s;
}

const DualEdge& Surface::edge(EdgeId e) const {
  if (!valid_edge(e)) throw PreconditionError("unknown edge " + std::to_string(e));
  return edges_[e];
}

std::optional<SignedEdge> Surface::incident_edge(FaceId a, FaceId b) const {
  if (!valid_face(a) || !valid_face(b)) {
    throw PreconditionError("unknown face id in " + pair_str(a, b));
  }
  auto it = pair_to_edge_.find(std::minmax(a, b));
  if (it == pair_to_edge_.end()) return std::nullopt;
  return SignedEdge{it->second, edges_[it->second].tail == a ? 1 : -1};
}

const std::vector<std::pair<FaceId, EdgeId>>& Surface::neighbors(FaceId f) const {
  if (!valid_face(f)) throw PreconditionError("unknown face " + std::to_string(f));
  return neighbors_[f];
}

FaceId Surface::from_face(SignedEdge se) const {
  const DualEdge& d = edge(se.edge);
  return se.sign > 0 ? d.tail : d.head;
}

FaceId Surface::to_face(SignedEdge se) const {
  const DualEdge& d = edge(se.edge);
  return se.sign > 0 ? d.head : d.tail;
}

Surface parse_surface(std::string_view text) {
  using detail::Line;
  auto lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty surface file");

  std::size_t li = 0;
  const Line& head = lines[li++];
  detail::expect_keyword(head, 0, "surface");
  head.expect_size(2);
  std::string name(head.tokens[1].text);

  if (li >= lines.size()) throw ParseError(head.number + 1, 1, "expected 'faces'");
  const Line& faces_line = lines[li++];
  detail::expect_keyword(faces_line, 0, "faces");
  faces_line.expect_size(2);
  int face_count = detail::id_at(faces_line, 1);

  std::map<int, DualEdge> edges;
  std::map<int, std::vector<SignedEdge>> vertices;
  bool ended = false;
  for (; li < lines.size(); ++li) {
    const Line& line = lines[li];
    std::string_view kw = line.at(0).text;
    if (kw == "edge") {
      line.expect_size(4);
      int id = detail::id_at(line, 1);
      DualEdge d{detail::id_at(line, 2), detail::id_at(line, 3)};
      if (!edges.emplace(id, d).second) line.fail(1, "duplicate edge id");
    } else if (kw == "vertex") {
      int id = detail::id_at(line, 1);
      std::vector<SignedEdge> cycle;
      for (std::size_t i = 2; i < line.tokens.size(); ++i) {
        std::string_view t = line.tokens[i].text;
        if (t.size() < 2 || (t.front() != '+' && t.front() != '-')) {
          line.fail(i, "expected a signed edge id such as +3 or -5");
        }
        std::int64_t v = 0;
        if (!detail::parse_int(t.substr(1), v) || t[1] == '+' || t[1] == '-') {
          line.fail(i, "expected a signed edge id such as +3 or -5");
        }
        cycle.push_back({static_cast<EdgeId>(v), t.front() == '+' ? 1 : -1});
      }
      if (!vertices.emplace(id, std::move(cycle)).second) {
        line.fail(1, "duplicate vertex id");
      }
    } else if (kw == "end") {
      line.expect_size(1);
      ended = true;
      ++li;
      break;
    } else {
      line.fail(0, "expected 'edge', 'vertex' or 'end'");
    }
  }
  if (!ended) {
    throw ParseError(lines.back().number + 1, 1, "missing 'end'");
  }
  if (li < lines.size()) lines[li].fail(0, "content after 'end'");

  std::vector<DualEdge> edge_list;
  for (auto& [id, d] : edges) {
    if (id != static_cast<int>(edge_list.size())) {
      throw ValidationError("edge ids", "edge ids must be 0..E-1; missing " +
                                            std::to_string(edge_list.size()));
    }
    edge_list.push_back(d);
  }
  std::vector<std::vector<SignedEdge>> cycles;
  for (auto& [id, c] : vertices) {
    if (id != static_cast<int>(cycles.size())) {
      throw ValidationError("vertex ids", "vertex ids must be 0..V-1; missing " +
                                              std::to_string(cycles.size()));
    }
    cycles.push_back(std::move(c));
  }
  return Surface::create(std::move(name), face_count, std::move(edge_list),
                         std::move(cycles));
}

std::string serialize_surface(const Surface& s) {
  std::ostringstream out;
  out << "surface " << s.name() << "\n";
  out << "faces " << s.face_count() << "\n";
  for (EdgeId e = 0; e < s.edge_count(); ++e) {
    out << "edge " << e << " " << s.edges()[e].tail << " " << s.edges()[e].head
        << "\n";
  }
  for (VertexId v = 0; v < s.vertex_count(); ++v) {
    out << "vertex " << v;
    for (const SignedEdge& se : s.vertex_cycles()[v]) {
      out << " " << (se.sign > 0 ? '+' : '-') << se.edge;
    }
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

Surface surface_from_polygons(std::string name,
                              const std::vector<std::vector<VertexId>>& polygons) {
  // Directed side (u, v) -> face holding it.
  std::map<std::pair<VertexId, VertexId>, FaceId> side_face;
  VertexId max_vertex = -1;
  for (FaceId f = 0; f < static_cast<FaceId>(polygons.size()); ++f) {
    const auto& poly = polygons[f];
    for (std::size_t i = 0; i < poly.size(); ++i) {
      VertexId u = poly[i];
      VertexId v = poly[(i + 1) % poly.size()];
      max_vertex = std::max({max_vertex, u, v});
      if (!side_face.emplace(std::pair{u, v}, f).second) {
        throw ValidationError("polygon orientation",
                              "side " + pair_str(u, v) + " occurs twice");
      }
    }
  }

  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_of_side;
  std::vector<DualEdge> edges;
  for (auto& [side, f] : side_face) {
    auto [u, v] = side;
    if (u > v) continue;
    auto back = side_face.find({v, u});
    if (back == side_face.end()) {
      throw ValidationError("polygon orientation",
                            "side " + pair_str(u, v) + " has no opposite side");
    }
    EdgeId e = static_cast<EdgeId>(edges.size());
    edges.push_back({f, back->second});
    edge_of_side[{u, v}] = e;
  }

  std::vector<FaceId> first_face(max_vertex + 1, -1);
  for (FaceId f = 0; f < static_cast<FaceId>(polygons.size()); ++f) {
    for (VertexId v : polygons[f]) {
      if (first_face[v] < 0) first_face[v] = f;
    }
  }

  auto out_neighbor = [&](FaceId f, VertexId v) {
    const auto& poly = polygons[f];
    auto it = std::find(poly.begin(), poly.end(), v);
    return poly[(it - poly.begin() + 1) % poly.size()];
  };

  std::vector<std::vector<SignedEdge>> cycles;
  for (VertexId v = 0; v <= max_vertex; ++v) {
    if (first_face[v] < 0) {
      throw ValidationError("vertex ids",
                            "polygon vertices must be 0..V-1; missing " +
                                std::to_string(v));
    }
    std::vector<SignedEdge> cycle;
    FaceId f = first_face[v];
    do {
      VertexId b = out_neighbor(f, v);
      EdgeId e = edge_of_side.at(std::minmax(v, b));
      cycle.push_back({e, edges[e].tail == f ? 1 : -1});
      f = side_face.at({b, v});
      if (cycle.size() > polygons.size()) {
        throw ValidationError("broken cycle",
                              "faces around vertex " + std::to_string(v) +
                                  " do not close up");
      }
    } while (f != first_face[v]);
    cycles.push_back(std::move(cycle));
  }
  return Surface::create(std::move(name), static_cast<int>(polygons.size()),
                         std::move(edges), std::move(cycles));
}

namespace {

Surface make_tetrahedron() {
  return surface_from_polygons("tetrahedron",
                               {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}});
}

Surface make_cube_grid(int k, std::string name) {
  std::map<std::array<int, 3>, VertexId> ids;
  auto vid = [&](std::array<int, 3> p) {
    auto [it, inserted] = ids.emplace(p, static_cast<VertexId>(ids.size()));
    return it->second;
  };
  std::vector<std::vector<VertexId>> polygons;
  for (int axis = 0; axis < 3; ++axis) {
    int b = (axis + 1) % 3;
    int c = (axis + 2) % 3;
    for (int side : {0, k}) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          std::vector<VertexId> poly;
          for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
            std::array<int, 3> p{};
            p[axis] = side;
            p[b] = i + di;
            p[c] = j + dj;
            poly.push_back(vid(p));
          }
          // (b, c) is a right-handed frame for +axis.
          if (side == 0) std::reverse(poly.begin(), poly.end());
          polygons.push_back(std::move(poly));
        }
      }
    }
  }
  return surface_from_polygons(std::move(name), polygons);
}

Surface make_torus_grid(int rows, int cols) {
  std::vector<std::vector<VertexId>> polygons;
  auto vid = [&](int i, int j) { return (i % rows) * cols + (j % cols); };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      polygons.push_back({vid(i, j), vid(i, j + 1), vid(i + 1, j + 1), vid(i + 1, j)});
    }
  }
  return surface_from_polygons(
      "torus_" + std::to_string(rows) + "x" + std::to_string(cols), polygons);
}

}  // namespace

Surface build_canonical(const CanonicalSpec& spec) {
  switch (spec.kind) {
    case CanonicalKind::Tetrahedron:
      return make_tetrahedron();
    case CanonicalKind::Cube:
      return make_cube_grid(1, "cube");
    case CanonicalKind::CubeGrid:
      if (spec.rows < 1) {
        throw ValidationError("parameter out of range", "cube grid needs k >= 1");
      }
      return make_cube_grid(spec.rows, spec.rows == 1
                                           ? std::string("cube")
                                           : "cube_grid_" + std::to_string(spec.rows));
    case CanonicalKind::TorusGrid:
      if (spec.rows < 3 || spec.cols < 3) {
        throw ValidationError("parameter out of range",
                              "torus grid needs rows >= 3 and cols >= 3, got " +
                                  std::to_string(spec.rows) + "x" +
                                  std::to_string(spec.cols));
      }
      return make_torus_grid(spec.rows, spec.cols);
  }
  throw PreconditionError("unknown canonical kind");
}

CanonicalSpec parse_canonical_spec(std::string_view text) {
  auto bad = [&]() -> CanonicalSpec {
    throw PreconditionError("unknown canonical surface '" + std::string(text) +
                            "' (expected tetrahedron, cube, cube_refined, "
                            "cube_grid:K or torus:RxC)");
  };
  if (text == "tetrahedron") return {CanonicalKind::Tetrahedron};
  if (text == "cube") return {CanonicalKind::Cube};
  if (text == "cube_refined") return {CanonicalKind::CubeGrid, 2};
  auto num = [&](std::string_view s) {
    std::int64_t v = 0;
    if (!detail::parse_int(s, v) || v < 0 || v > 1000) bad();
    return static_cast<int>(v);
  };
  if (text.starts_with("cube_grid:")) {
    return {CanonicalKind::CubeGrid, num(text.substr(10))};
  }
  if (text.starts_with("torus:")) {
    auto dims = text.substr(6);
    auto x = dims.find('x');
    if (x == std::string_view::npos) bad();
    return {CanonicalKind::TorusGrid, num(dims.substr(0, x)), num(dims.substr(x + 1))};
  }
  return bad();
}

}  // namespace braidcell
