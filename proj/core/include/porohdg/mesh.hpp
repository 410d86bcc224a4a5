// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace porohdg {

/// Boundary tags of the displacement partition (Dirichlet / traction).
enum class DispTag : std::uint8_t { none = 0, dirichlet, traction };
/// Boundary tags of the flow partition (pressure / normal flux).
enum class FlowTag : std::uint8_t { none = 0, pressure, flux };

struct Facet {
  std::array<int, 2> vertices;    // global ids, vertices[0] < vertices[1]
  std::array<int, 2> cells;       // adjacent cells, cells[1] == -1 on the boundary
  std::array<int, 2> local_edge;  // local edge index within cells[0] / cells[1]
  Eigen::Vector2d normal;         // unit; lower -> higher cell, outward on the boundary
  double length = 0.0;
};

/// 2D simplicial triangulation with full cell-facet topology and two
/// independent boundary partitions. Immutable after construction; safe for
/// concurrent reads.
class Mesh {
 public:
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> cells;       // positively oriented
  std::vector<Facet> facets;
  std::vector<std::array<int, 3>> cell_facets; // facet id for each local edge
  std::vector<DispTag> disp_tags;              // per facet, none on interior facets
  std::vector<FlowTag> flow_tags;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_facets() const { return static_cast<int>(facets.size()); }

  bool is_boundary_facet(int f) const { return facets[f].cells[1] < 0; }
  int n_boundary_facets() const;

  double cell_area(int c) const;
  double cell_diameter(int c) const;  // longest edge
  double total_area() const;
  double max_diameter() const;
  Eigen::Vector2d facet_midpoint(int f) const;

  /// +1 when the stored facet normal is outward for `cell`, -1 otherwise.
  double normal_sign(int f, int cell) const {
    return facets[f].cells[0] == cell ? 1.0 : -1.0;
  }

  /// Measures of the tagged boundary parts.
  double measure_disp(DispTag tag) const;
  double measure_flow(FlowTag tag) const;

  /// Rebuild facet topology from `vertices` and `cells`; throws on
  /// nonpositively oriented cells or facets shared by more than two cells.
  void finalize();

  /// FNV-1a hash over geometry, topology and tags (bit-exact coordinates).
  std::uint64_t content_hash() const;
};

/// Vertices of local edge e of a triangle; edge e is opposite vertex e and
/// runs from vertex (e+1)%3 to vertex (e+2)%3 in cell orientation order.
std::array<int, 2> cell_edge_vertices(const std::array<int, 3>& cell, int e);

enum class DiagonalPattern { right, crisscross };

/// Conforming triangulation of (0,1)^2 with n subdivisions per side; the
/// `right` pattern splits every square the same way (2 n^2 cells), the
/// `crisscross` pattern alternates the diagonal in a checkerboard.
Mesh build_structured_square(int n, DiagonalPattern pattern = DiagonalPattern::right);

/// Conforming triangulation of (x0,x1) x (y0,y1) with nx x ny squares, each
/// split by the `right` diagonal. Boundary facets are tagged later via
/// tag_boundary.
Mesh build_rectangle(double x0, double x1, double y0, double y1, int nx, int ny);

/// Split every triangle into 4 congruent children; boundary tags inherited,
/// h_max halved.
Mesh uniform_refine(const Mesh& mesh);

using FacetPredicate = std::function<bool(const Eigen::Vector2d&)>;

/// Tag boundary facets by midpoint predicates. Every boundary facet must be
/// matched by exactly one rule per partition; unmatched or doubly matched
/// facets raise an error naming the facet midpoint.
Mesh tag_boundary(Mesh mesh,
                  const std::vector<std::pair<FacetPredicate, DispTag>>& disp_rules,
                  const std::vector<std::pair<FacetPredicate, FlowTag>>& flow_rules);

/// ASCII mesh format:
///   poromesh 2d
///   <n_vertices>
///   <x> <y>                 (one line per vertex, %.17g)
///   <n_cells>
///   <v0> <v1> <v2>
///   facet <v0> <v1> <D|T> <P|F>   (one line per tagged boundary facet)
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);

}  // namespace porohdg
