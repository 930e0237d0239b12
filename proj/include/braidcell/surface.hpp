#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace braidcell {

using FaceId = int;
using EdgeId = int;
using VertexId = int;

/// An edge of the dual graph crossed in a given direction. `sign` is +1 for
/// tail -> head and -1 for head -> tail.
struct SignedEdge {
  EdgeId edge = 0;
  int sign = 1;

  friend bool operator==(const SignedEdge&, const SignedEdge&) = default;
};

/// Dual-graph edge: joins the basepoints of two faces. Orientation is fixed
/// once, tail -> head is the positive direction.
struct DualEdge {
  FaceId tail = 0;
  FaceId head = 0;

  friend bool operator==(const DualEdge&, const DualEdge&) = default;
};

/// A closed oriented polyhedral surface described through its dual graph.
///
/// Faces are 0..n-1 and each carries one marked point. Vertex cycles list the
/// signed dual edges around each vertex of the polyhedron; each cycle is a
/// closed walk in the dual graph. Instances are immutable and always valid.
class Surface {
 public:
  /// Validates and builds. Throws ValidationError naming the first violated
  /// invariant.
  static Surface create(std::string name, int face_count,
                        std::vector<DualEdge> edges,
                        std::vector<std::vector<SignedEdge>> vertex_cycles);

  const std::string& name() const { return name_; }
  int face_count() const { return face_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int vertex_count() const { return static_cast<int>(cycles_.size()); }
  int genus() const { return genus_; }

  const std::vector<DualEdge>& edges() const { return edges_; }
  const DualEdge& edge(EdgeId e) const;
  const std::vector<std::vector<SignedEdge>>& vertex_cycles() const {
    return cycles_;
  }

  /// The edge joining a and b, signed by the direction a -> b. Throws on an
  /// unknown face id.
  std::optional<SignedEdge> incident_edge(FaceId a, FaceId b) const;

  /// Neighbouring faces of f, ordered by joining edge id.
  const std::vector<std::pair<FaceId, EdgeId>>& neighbors(FaceId f) const;

  FaceId from_face(SignedEdge se) const;
  FaceId to_face(SignedEdge se) const;

  bool valid_face(FaceId f) const { return f >= 0 && f < face_count_; }
  bool valid_edge(EdgeId e) const { return e >= 0 && e < edge_count(); }

  friend bool operator==(const Surface& a, const Surface& b) {
    return a.name_ == b.name_ && a.face_count_ == b.face_count_ &&
           a.edges_ == b.edges_ && a.cycles_ == b.cycles_;
  }

 private:
  Surface() = default;

  std::string name_;
  int face_count_ = 0;
  std::vector<DualEdge> edges_;
  std::vector<std::vector<SignedEdge>> cycles_;
  int genus_ = 0;
  std::map<std::pair<FaceId, FaceId>, EdgeId> pair_to_edge_;
  std::vector<std::vector<std::pair<FaceId, EdgeId>>> neighbors_;
};

Surface parse_surface(std::string_view text);
std::string serialize_surface(const Surface& s);

/// Builds a surface from polygons given as vertex lists, counterclockwise
/// seen from outside. Every directed polygon side must occur exactly once.
/// Dual edges are numbered by the sorted vertex pair of the polygon side and
/// oriented from the face holding the side in increasing vertex order.
Surface surface_from_polygons(std::string name,
                              const std::vector<std::vector<VertexId>>& polygons);

enum class CanonicalKind { Tetrahedron, Cube, CubeGrid, TorusGrid };

struct CanonicalSpec {
  CanonicalKind kind = CanonicalKind::Cube;
  int rows = 0;  // torus grid rows, or cube grid subdivision
  int cols = 0;
};

/// Test fixtures: tetrahedron, cube, cube_grid(k) (each cube face cut into a
/// k x k grid), torus_grid(rows, cols) with rows, cols >= 3.
Surface build_canonical(const CanonicalSpec& spec);

/// Accepts "tetrahedron", "cube", "cube_refined" (= cube_grid 2),
/// "cube_grid:K" and "torus:RxC".
CanonicalSpec parse_canonical_spec(std::string_view text);

}  // namespace braidcell
