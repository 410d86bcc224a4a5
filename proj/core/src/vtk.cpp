// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "porohdg/basis.hpp"
#include "porohdg/check.hpp"

namespace porohdg {

void write_vtk(const std::string& path, const Mesh& mesh, const DofLayout& layout,
               const SolutionState& state, const std::string& title) {
  const int k = layout.k;
  const int n_lat = (k + 1) * (k + 2) / 2;

  // reference lattice (i/k, j/k) and its uniform sub-triangulation
  Eigen::Matrix<double, Eigen::Dynamic, 2> lattice(n_lat, 2);
  std::vector<std::vector<int>> grid(k + 1);
  {
    int id = 0;
    for (int j = 0; j <= k; ++j) {
      grid[j].resize(k - j + 1);
      for (int i = 0; i <= k - j; ++i) {
        lattice(id, 0) = static_cast<double>(i) / k;
        lattice(id, 1) = static_cast<double>(j) / k;
        grid[j][i] = id++;
      }
    }
  }
  std::vector<std::array<int, 3>> subtri;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k - j; ++i) {
      subtri.push_back({grid[j][i], grid[j][i + 1], grid[j + 1][i]});
      if (i + 1 <= k - j - 1)
        subtri.push_back({grid[j][i + 1], grid[j + 1][i + 1], grid[j + 1][i]});
    }
  }

  const TriangleBasis bk(k), bkm1(k - 1);
  const Eigen::MatrixXd vk = bk.values(lattice);
  const Eigen::MatrixXd vkm1 = bkm1.values(lattice);

  const int n_points = mesh.n_cells() * n_lat;
  const int n_sub = mesh.n_cells() * static_cast<int>(subtri.size());

  std::ofstream out(path);
  POROHDG_CHECK(out.good(), "write_vtk: cannot open " << path);
  char buf[256];
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n_points << " double\n";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& kc = mesh.cells[c];
    const AffineMap map =
        affine_map(mesh.vertices[kc[0]], mesh.vertices[kc[1]], mesh.vertices[kc[2]]);
    for (int l = 0; l < n_lat; ++l) {
      const Eigen::Vector2d x = map.to_physical(lattice.row(l).transpose());
      std::snprintf(buf, sizeof buf, "%.12e %.12e 0\n", x(0), x(1));
      out << buf;
    }
  }
  out << "CELLS " << n_sub << " " << 4 * n_sub << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (const auto& t : subtri)
      out << "3 " << c * n_lat + t[0] << " " << c * n_lat + t[1] << " "
          << c * n_lat + t[2] << "\n";
  out << "CELL_TYPES " << n_sub << "\n";
  for (int i = 0; i < n_sub; ++i) out << "5\n";

  out << "POINT_DATA " << n_points << "\n";
  auto write_vector_field = [&](const char* name, const Eigen::VectorXd& coeffs) {
    out << "VECTORS " << name << " double\n";
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const int off = layout.cell_u_offset(c);
      for (int l = 0; l < n_lat; ++l) {
        double vx = 0.0, vy = 0.0;
        for (int i = 0; i < layout.nk; ++i) {
          vx += coeffs(off + i) * vk(l, i);
          vy += coeffs(off + layout.nk + i) * vk(l, i);
        }
        std::snprintf(buf, sizeof buf, "%.12e %.12e 0\n", vx, vy);
        out << buf;
      }
    }
  };
  auto write_scalar_field = [&](const char* name, const Eigen::VectorXd& coeffs) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const int off = layout.cell_p_offset(c);
      for (int l = 0; l < n_lat; ++l) {
        double v = 0.0;
        for (int i = 0; i < layout.nkm1; ++i) v += coeffs(off + i) * vkm1(l, i);
        std::snprintf(buf, sizeof buf, "%.12e\n", v);
        out << buf;
      }
    }
  };
  write_vector_field("displacement", state.u);
  write_vector_field("darcy_velocity", state.z);
  write_scalar_field("pressure", state.p);
  write_scalar_field("total_pressure", state.pT);
  POROHDG_CHECK(out.good(), "write_vtk: write failed for " << path);
}

}  // namespace porohdg
