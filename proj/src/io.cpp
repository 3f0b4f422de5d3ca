#include "m1dg/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

namespace fs = std::filesystem;

Sampling parse_sampling(const std::string& s) {
  if (s == "means") return Sampling::CellMeans;
  if (s == "nodes") return Sampling::Nodes;
  throw ConfigError(fmt::format("unknown sampling '{}' (means, nodes)", s));
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return os;
}

void close_checked(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

void field_row(std::ostream& os, Vec2 x, const MomentVector& u) {
  const double f = std::hypot(u.psi1x, u.psi1y) / u.psi0;
  os << format_double(x.x) << ',' << format_double(x.y) << ',' << format_double(u.psi0) << ','
     << format_double(u.psi1x) << ',' << format_double(u.psi1y) << ',' << format_double(f) << '\n';
}

} // namespace

void write_field_csv(const fs::path& path, const DGField& field, Sampling sampling) {
  std::ofstream os = open_out(path);
  const DGSpace& sp = field.space();
  const Mesh& mesh = sp.mesh();
  os << "x,y,psi0,psi1x,psi1y,f\n";
  for (std::size_t c = 0; c < sp.num_cells(); ++c) {
    if (sampling == Sampling::CellMeans) {
      field_row(os, mesh.cell(c).centroid, field.mean(c));
      continue;
    }
    const Tabulation& nodes = sp.nodes();
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      field_row(os, mesh.to_physical(c, nodes.points[q]), field.eval(c, nodes.row(q)));
    }
  }
  close_checked(os, path);
}

void write_field_csv(const fs::path& path, const FVGrid& g) {
  std::ofstream os = open_out(path);
  os << "x,y,psi0,psi1x,psi1y,f\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) field_row(os, g.center(i, j), g.at(i, j));
  close_checked(os, path);
}

void write_stats_csv(const fs::path& path, const std::vector<RealizabilityStats>& series) {
  std::ofstream os = open_out(path);
  os << "time,pct_gp,pct_cm,theta_max\n";
  for (const auto& s : series) {
    os << format_double(s.time) << ',' << format_double(s.pct_gp) << ',' << format_double(s.pct_cm) << ','
       << format_double(s.theta_max) << '\n';
  }
  close_checked(os, path);
}

std::vector<RealizabilityStats> read_stats_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(is, line) || line != "time,pct_gp,pct_cm,theta_max") {
    throw ParseError(fmt::format("'{}': unexpected header", path.string()), 1);
  }
  std::vector<RealizabilityStats> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ss, tok, ',')) throw ParseError(fmt::format("'{}': expected 4 columns", path.string()), lineno);
      // strtod rather than stod: subnormals set ERANGE but parse exactly
      char* end = nullptr;
      v[i] = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v[i])) {
        throw ParseError(fmt::format("'{}': bad number '{}'", path.string(), tok), lineno);
      }
    }
    RealizabilityStats s;
    s.time = v[0];
    s.pct_gp = v[1];
    s.pct_cm = v[2];
    s.theta_max = v[3];
    out.push_back(s);
  }
  return out;
}

void write_study_csv(const fs::path& path, const std::vector<StudyRow>& rows) {
  std::ofstream os = open_out(path);
  auto opt = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  os << "inv_h,E1,order1,Einf,orderinf,theta_max\n";
  for (const auto& r : rows) {
    os << format_double(r.inv_h) << ',' << format_double(r.e1) << ',' << opt(r.order1) << ','
       << format_double(r.einf) << ',' << opt(r.orderinf) << ',' << format_double(r.theta_max) << '\n';
  }
  close_checked(os, path);
}

void write_vtk(const fs::path& path, const DGField& field) {
  std::ofstream os = open_out(path);
  const DGSpace& sp = field.space();
  const Mesh& mesh = sp.mesh();
  const auto& verts = mesh.vertices();
  const std::size_t nc = mesh.num_cells();

  std::vector<MomentVector> point_sum(verts.size());
  std::vector<int> point_count(verts.size(), 0);
  const auto ref = reference_vertices(mesh.kind());
  std::size_t conn = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    const Cell& cell = mesh.cell(c);
    conn += cell.vertex_count + 1;
    for (int v = 0; v < cell.vertex_count; ++v) {
      const int id = cell.vertex_ids[v];
      point_sum[id] = point_sum[id] + field.eval_at(c, ref[v]);
      ++point_count[id];
    }
  }

  os << "# vtk DataFile Version 3.0\nm1dg field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << verts.size() << " double\n";
  for (const Vec2& v : verts) os << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  os << "CELLS " << nc << ' ' << conn << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    const Cell& cell = mesh.cell(c);
    os << cell.vertex_count;
    for (int v = 0; v < cell.vertex_count; ++v) os << ' ' << cell.vertex_ids[v];
    os << '\n';
  }
  os << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) os << (mesh.cell(c).vertex_count == 3 ? 5 : 9) << '\n';

  os << "CELL_DATA " << nc << '\n';
  os << "SCALARS psi0 double 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < nc; ++c) os << format_double(field.mean(c).psi0) << '\n';
  os << "VECTORS psi1 double\n";
  for (std::size_t c = 0; c < nc; ++c) {
    const MomentVector u = field.mean(c);
    os << format_double(u.psi1x) << ' ' << format_double(u.psi1y) << " 0\n";
  }
  os << "POINT_DATA " << verts.size() << '\n';
  os << "SCALARS psi0 double 1\nLOOKUP_TABLE default\n";
  for (std::size_t v = 0; v < verts.size(); ++v) {
    os << format_double(point_count[v] ? point_sum[v].psi0 / point_count[v] : 0.0) << '\n';
  }
  close_checked(os, path);
}

} // namespace m1dg
