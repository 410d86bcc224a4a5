// Copyright 2026 the porohdg authors. See the top-level LICENSE file for details.
//
// SPDX-License-Identifier: Apache-2.0

#include "porohdg/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "porohdg/check.hpp"

namespace porohdg {

namespace {

void write_vector(std::ostream& out, const char* name, const Eigen::VectorXd& v) {
  char buf[64];
  out << name << " " << v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %a", v(i));
    out << buf;
  }
  out << "\n";
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& expected_name) {
  std::string name;
  long long n = 0;
  in >> name >> n;
  POROHDG_REQUIRE(in.good() && name == expected_name && n >= 0,
                  "checkpoint: expected vector '" << expected_name << "'");
  Eigen::VectorXd v(n);
  std::string tok;
  for (long long i = 0; i < n; ++i) {
    in >> tok;
    POROHDG_REQUIRE(in.good(), "checkpoint: truncated vector " << expected_name);
    char* end = nullptr;
    v(i) = std::strtod(tok.c_str(), &end);
    POROHDG_REQUIRE(end && *end == '\0', "checkpoint: bad float token '" << tok << "'");
  }
  return v;
}

void write_state(std::ostream& out, const SolutionState& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", s.time);
  out << "time " << buf << "\n";
  write_vector(out, "u", s.u);
  write_vector(out, "pT", s.pT);
  write_vector(out, "z", s.z);
  write_vector(out, "p", s.p);
  write_vector(out, "ubar", s.ubar);
  write_vector(out, "pTbar", s.pTbar);
  write_vector(out, "pbar", s.pbar);
}

SolutionState read_state(std::istream& in) {
  SolutionState s;
  std::string key, tok;
  in >> key >> tok;
  POROHDG_REQUIRE(in.good() && key == "time", "checkpoint: expected time record");
  s.time = std::strtod(tok.c_str(), nullptr);
  s.u = read_vector(in, "u");
  s.pT = read_vector(in, "pT");
  s.z = read_vector(in, "z");
  s.p = read_vector(in, "p");
  s.ubar = read_vector(in, "ubar");
  s.pTbar = read_vector(in, "pTbar");
  s.pbar = read_vector(in, "pbar");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream out(path);
  POROHDG_CHECK(out.good(), "save_checkpoint: cannot open " << path);
  out << "porohdg-checkpoint 1\n";
  out << "mesh_hash " << cp.mesh_hash << "\n";
  out << "layout_hash " << cp.layout_hash << "\n";
  out << "step " << cp.step << "\n";
  write_state(out, cp.state);
  out << "previous " << (cp.previous ? 1 : 0) << "\n";
  if (cp.previous) write_state(out, *cp.previous);
  POROHDG_CHECK(out.good(), "save_checkpoint: write failed for " << path);
}

Checkpoint load_checkpoint(const std::string& path, std::uint64_t mesh_hash,
                           std::uint64_t layout_hash) {
  std::ifstream in(path);
  POROHDG_CHECK(in.good(), "load_checkpoint: cannot open " << path);
  std::string word;
  int version = 0;
  in >> word >> version;
  POROHDG_REQUIRE(word == "porohdg-checkpoint" && version == 1,
                  "load_checkpoint: unsupported header in " << path);
  Checkpoint cp;
  in >> word >> cp.mesh_hash;
  POROHDG_REQUIRE(word == "mesh_hash", "load_checkpoint: malformed file");
  in >> word >> cp.layout_hash;
  POROHDG_REQUIRE(word == "layout_hash", "load_checkpoint: malformed file");
  in >> word >> cp.step;
  POROHDG_REQUIRE(word == "step" && cp.step >= 0, "load_checkpoint: malformed file");
  POROHDG_REQUIRE(cp.mesh_hash == mesh_hash && cp.layout_hash == layout_hash,
                  "load_checkpoint: checkpoint was written for a different "
                  "mesh/layout (hash mismatch)");
  cp.state = read_state(in);
  int has_prev = 0;
  in >> word >> has_prev;
  POROHDG_REQUIRE(word == "previous", "load_checkpoint: malformed file");
  if (has_prev) cp.previous = read_state(in);
  return cp;
}

}  // namespace porohdg
