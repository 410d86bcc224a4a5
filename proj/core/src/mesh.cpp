// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "porohdg/check.hpp"

namespace porohdg {

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

const char* disp_token(DispTag t) { return t == DispTag::dirichlet ? "D" : "T"; }
const char* flow_token(FlowTag t) { return t == FlowTag::pressure ? "P" : "F"; }

}  // namespace

std::array<int, 2> cell_edge_vertices(const std::array<int, 3>& cell, int e) {
  return {cell[(e + 1) % 3], cell[(e + 2) % 3]};
}

int Mesh::n_boundary_facets() const {
  int n = 0;
  for (const auto& f : facets)
    if (f.cells[1] < 0) ++n;
  return n;
}

double Mesh::cell_area(int c) const {
  const auto& k = cells[c];
  return signed_area(vertices[k[0]], vertices[k[1]], vertices[k[2]]);
}

double Mesh::cell_diameter(int c) const {
  const auto& k = cells[c];
  double d = 0.0;
  for (int e = 0; e < 3; ++e)
    d = std::max(d, (vertices[k[(e + 1) % 3]] - vertices[k[(e + 2) % 3]]).norm());
  return d;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < n_cells(); ++c) a += cell_area(c);
  return a;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int c = 0; c < n_cells(); ++c) h = std::max(h, cell_diameter(c));
  return h;
}

Eigen::Vector2d Mesh::facet_midpoint(int f) const {
  const auto& fc = facets[f];
  return 0.5 * (vertices[fc.vertices[0]] + vertices[fc.vertices[1]]);
}

double Mesh::measure_disp(DispTag tag) const {
  double m = 0.0;
  for (int f = 0; f < n_facets(); ++f)
    if (disp_tags[f] == tag) m += facets[f].length;
  return m;
}

double Mesh::measure_flow(FlowTag tag) const {
  double m = 0.0;
  for (int f = 0; f < n_facets(); ++f)
    if (flow_tags[f] == tag) m += facets[f].length;
  return m;
}

void Mesh::finalize() {
  facets.clear();
  cell_facets.assign(cells.size(), {-1, -1, -1});

  for (int c = 0; c < n_cells(); ++c) {
    const double a = cell_area(c);
    POROHDG_CHECK(a > 0.0, "Mesh: cell " << c << " has nonpositive area " << a);
  }

  std::map<std::pair<int, int>, int> facet_of;
  for (int c = 0; c < n_cells(); ++c) {
    for (int e = 0; e < 3; ++e) {
      const auto ev = cell_edge_vertices(cells[c], e);
      const std::pair<int, int> key{std::min(ev[0], ev[1]), std::max(ev[0], ev[1])};
      auto it = facet_of.find(key);
      if (it == facet_of.end()) {
        Facet f;
        f.vertices = {key.first, key.second};
        f.cells = {c, -1};
        f.local_edge = {e, -1};
        const Eigen::Vector2d d = vertices[ev[1]] - vertices[ev[0]];
        f.length = d.norm();
        POROHDG_CHECK(f.length > 0.0, "Mesh: degenerate facet in cell " << c);
        // outward for the first (lower) adjacent cell: edge runs
        // counterclockwise in that cell, so rotate the direction clockwise
        f.normal = Eigen::Vector2d(d.y(), -d.x()) / f.length;
        facet_of.emplace(key, n_facets());
        cell_facets[c][e] = n_facets();
        facets.push_back(f);
      } else {
        Facet& f = facets[it->second];
        POROHDG_CHECK(f.cells[1] < 0,
                      "Mesh: facet (" << key.first << ", " << key.second
                                      << ") shared by more than two cells");
        f.cells[1] = c;
        f.local_edge[1] = e;
        cell_facets[c][e] = it->second;
      }
    }
  }
  disp_tags.assign(facets.size(), DispTag::none);
  flow_tags.assign(facets.size(), FlowTag::none);
}

std::uint64_t Mesh::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t nv = n_vertices(), nc = n_cells();
  mix(&nv, sizeof nv);
  mix(&nc, sizeof nc);
  for (const auto& v : vertices) {
    const double xy[2] = {v.x(), v.y()};
    mix(xy, sizeof xy);
  }
  for (const auto& k : cells) mix(k.data(), sizeof(int) * 3);
  for (int f = 0; f < n_facets(); ++f) {
    if (!is_boundary_facet(f)) continue;
    const std::uint8_t t[2] = {static_cast<std::uint8_t>(disp_tags[f]),
                               static_cast<std::uint8_t>(flow_tags[f])};
    mix(facets[f].vertices.data(), sizeof(int) * 2);
    mix(t, sizeof t);
  }
  return h;
}

Mesh build_rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  POROHDG_REQUIRE(x1 > x0 && y1 > y0, "build_rectangle: degenerate coordinate range");
  POROHDG_REQUIRE(nx >= 1 && ny >= 1, "build_rectangle: need nx, ny >= 1");
  Mesh mesh;
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }
  }
  mesh.finalize();
  return mesh;
}

Mesh build_structured_square(int n, DiagonalPattern pattern) {
  POROHDG_REQUIRE(n >= 1, "build_structured_square: need n >= 1");
  if (pattern == DiagonalPattern::right) return build_rectangle(0.0, 1.0, 0.0, 1.0, n, n);
  Mesh mesh;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.cells.push_back({v00, v10, v11});
        mesh.cells.push_back({v00, v11, v01});
      } else {
        mesh.cells.push_back({v00, v10, v01});
        mesh.cells.push_back({v10, v11, v01});
      }
    }
  }
  mesh.finalize();
  return mesh;
}

Mesh uniform_refine(const Mesh& mesh) {
  Mesh fine;
  fine.vertices = mesh.vertices;
  // one new vertex per facet
  std::vector<int> midpoint(mesh.n_facets());
  for (int f = 0; f < mesh.n_facets(); ++f) {
    midpoint[f] = fine.n_vertices();
    fine.vertices.push_back(mesh.facet_midpoint(f));
  }
  fine.cells.reserve(4 * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& k = mesh.cells[c];
    const int m0 = midpoint[mesh.cell_facets[c][0]];
    const int m1 = midpoint[mesh.cell_facets[c][1]];
    const int m2 = midpoint[mesh.cell_facets[c][2]];
    fine.cells.push_back({k[0], m2, m1});
    fine.cells.push_back({k[1], m0, m2});
    fine.cells.push_back({k[2], m1, m0});
    fine.cells.push_back({m0, m1, m2});
  }
  fine.finalize();

  // children of a boundary facet contain its midpoint vertex; inherit tags
  std::vector<int> parent_of_midpoint(fine.n_vertices(), -1);
  for (int f = 0; f < mesh.n_facets(); ++f)
    if (mesh.is_boundary_facet(f)) parent_of_midpoint[midpoint[f]] = f;
  for (int f = 0; f < fine.n_facets(); ++f) {
    if (!fine.is_boundary_facet(f)) continue;
    const auto& fc = fine.facets[f];
    int parent = parent_of_midpoint[fc.vertices[0]];
    if (parent < 0) parent = parent_of_midpoint[fc.vertices[1]];
    POROHDG_CHECK(parent >= 0, "uniform_refine: lost parent of boundary facet " << f);
    fine.disp_tags[f] = mesh.disp_tags[parent];
    fine.flow_tags[f] = mesh.flow_tags[parent];
  }
  return fine;
}

Mesh tag_boundary(Mesh mesh,
                  const std::vector<std::pair<FacetPredicate, DispTag>>& disp_rules,
                  const std::vector<std::pair<FacetPredicate, FlowTag>>& flow_rules) {
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!mesh.is_boundary_facet(f)) continue;
    const Eigen::Vector2d mid = mesh.facet_midpoint(f);
    int nd = 0, nf = 0;
    for (const auto& [pred, tag] : disp_rules) {
      if (pred(mid)) {
        mesh.disp_tags[f] = tag;
        ++nd;
      }
    }
    for (const auto& [pred, tag] : flow_rules) {
      if (pred(mid)) {
        mesh.flow_tags[f] = tag;
        ++nf;
      }
    }
    POROHDG_REQUIRE(nd == 1 && nf == 1,
                    "tag_boundary: facet with midpoint (" << mid.x() << ", " << mid.y()
                        << ") matched by " << nd << " displacement and " << nf
                        << " flow rules (need exactly one each)");
  }
  return mesh;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  char buf[128];
  out << "poromesh 2d\n" << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  out << mesh.n_cells() << "\n";
  for (const auto& k : mesh.cells) out << k[0] << " " << k[1] << " " << k[2] << "\n";
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!mesh.is_boundary_facet(f)) continue;
    if (mesh.disp_tags[f] == DispTag::none && mesh.flow_tags[f] == FlowTag::none) continue;
    POROHDG_CHECK(mesh.disp_tags[f] != DispTag::none && mesh.flow_tags[f] != FlowTag::none,
                  "write_mesh: boundary facet " << f << " only partially tagged");
    out << "facet " << mesh.facets[f].vertices[0] << " " << mesh.facets[f].vertices[1]
        << " " << disp_token(mesh.disp_tags[f]) << " " << flow_token(mesh.flow_tags[f])
        << "\n";
  }
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  POROHDG_CHECK(out.good(), "write_mesh: cannot open " << path);
  write_mesh(mesh, out);
}

Mesh read_mesh(std::istream& in) {
  std::string word, dim;
  in >> word >> dim;
  POROHDG_REQUIRE(word == "poromesh" && dim == "2d",
                  "read_mesh: bad header '" << word << " " << dim << "'");
  int nv = 0;
  in >> nv;
  POROHDG_REQUIRE(in.good() && nv >= 3, "read_mesh: bad vertex count");
  Mesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    in >> v.x() >> v.y();
    POROHDG_REQUIRE(in.good(), "read_mesh: truncated vertex list");
  }
  int nc = 0;
  in >> nc;
  POROHDG_REQUIRE(in.good() && nc >= 1, "read_mesh: bad cell count");
  mesh.cells.resize(nc);
  for (auto& k : mesh.cells) {
    in >> k[0] >> k[1] >> k[2];
    POROHDG_REQUIRE(in.good(), "read_mesh: truncated cell list");
    for (int v : k)
      POROHDG_REQUIRE(v >= 0 && v < nv, "read_mesh: vertex index " << v << " out of range");
  }
  mesh.finalize();

  std::map<std::pair<int, int>, int> facet_of;
  for (int f = 0; f < mesh.n_facets(); ++f)
    facet_of[{mesh.facets[f].vertices[0], mesh.facets[f].vertices[1]}] = f;
  while (in >> word) {
    POROHDG_REQUIRE(word == "facet", "read_mesh: unexpected token '" << word << "'");
    int a = 0, b = 0;
    std::string dt, ft;
    in >> a >> b >> dt >> ft;
    POROHDG_REQUIRE(in.good(), "read_mesh: truncated facet tag line");
    auto it = facet_of.find({std::min(a, b), std::max(a, b)});
    POROHDG_REQUIRE(it != facet_of.end(),
                    "read_mesh: tag line names unknown facet (" << a << ", " << b << ")");
    POROHDG_REQUIRE(mesh.is_boundary_facet(it->second),
                    "read_mesh: tag on interior facet (" << a << ", " << b << ")");
    POROHDG_REQUIRE(dt == "D" || dt == "T", "read_mesh: bad displacement tag " << dt);
    POROHDG_REQUIRE(ft == "P" || ft == "F", "read_mesh: bad flow tag " << ft);
    mesh.disp_tags[it->second] = dt == "D" ? DispTag::dirichlet : DispTag::traction;
    mesh.flow_tags[it->second] = ft == "P" ? FlowTag::pressure : FlowTag::flux;
  }
  return mesh;
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  POROHDG_CHECK(in.good(), "read_mesh_file: cannot open " << path);
  return read_mesh(in);
}

}  // namespace porohdg
