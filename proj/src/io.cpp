#include "filmnet/io.hpp"

#include <cstdlib>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "filmnet/errors.hpp"

namespace filmnet {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, std::size_t line) {
  // strtod accepts inf/nan as written by operator<<.
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw IoError("line " + std::to_string(line) + ": cannot parse number '" + text + "'");
  return v;
}

std::map<std::string, std::string> parse_header(const std::string& line) {
  std::map<std::string, std::string> out;
  std::string body = line.substr(1);
  for (const auto& item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    std::string key = item.substr(0, eq);
    key.erase(0, key.find_first_not_of(' '));
    out[key] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace

void write_snapshot(std::ostream& os, const FilmState& state, const GraphGrid& grid, const std::string& hash) {
  const MetricGraph& g = grid.graph();
  os << std::setprecision(17);
  os << "# t=" << state.t << ",step=" << state.step_count << ",config_hash=" << hash << "\n";
  os << "edge_id,s,x,u\n";
  double offset = 0.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const std::size_t n = grid.cells(e);
    const double length = g.edge(e).length;
    for (std::size_t k = 0; k <= n; ++k) {
      const double s = k == n ? 1.0 : static_cast<double>(k) / static_cast<double>(n);
      os << g.edge_ids()[e] << "," << s << "," << offset + s * length << ","
         << state.u[static_cast<Eigen::Index>(grid.node(e, k))] << "\n";
    }
    offset += length;
  }
  if (!os) throw IoError("failed writing snapshot");
}

Snapshot read_snapshot(std::istream& is, const GraphGrid& grid) {
  Snapshot snap;
  snap.state.u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()),
                                           std::numeric_limits<double>::quiet_NaN());
  std::string line;
  std::size_t line_no = 0;
  bool have_columns = false;
  std::vector<std::size_t> next_node(grid.graph().edge_count(), 0);
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto header = parse_header(line);
      if (auto it = header.find("t"); it != header.end()) snap.state.t = parse_double(it->second, line_no);
      if (auto it = header.find("step"); it != header.end())
        snap.state.step_count = static_cast<std::size_t>(std::stoull(it->second));
      if (auto it = header.find("config_hash"); it != header.end()) snap.config_hash = it->second;
      continue;
    }
    if (!have_columns) {
      if (line != "edge_id,s,x,u") throw IoError("line " + std::to_string(line_no) + ": unexpected snapshot columns");
      have_columns = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw IoError("line " + std::to_string(line_no) + ": expected 4 fields");
    const auto edge = grid.graph().find_edge(fields[0]);
    if (!edge) throw IoError("line " + std::to_string(line_no) + ": unknown edge '" + fields[0] + "'");
    const std::size_t k = next_node[*edge]++;
    if (k > grid.cells(*edge)) throw IoError("line " + std::to_string(line_no) + ": too many rows for edge");
    snap.state.u[static_cast<Eigen::Index>(grid.node(*edge, k))] = parse_double(fields[3], line_no);
  }
  for (std::size_t e = 0; e < next_node.size(); ++e)
    if (next_node[e] != grid.cells(e) + 1)
      throw IoError("snapshot has " + std::to_string(next_node[e]) + " rows for edge '" + grid.graph().edge_ids()[e] +
                    "', expected " + std::to_string(grid.cells(e) + 1));
  return snap;
}

void write_diagnostics_header(std::ostream& os, const std::string& hash, double n) {
  os << std::setprecision(17) << "# config_hash=" << hash << ",n=" << n << "\n" << kDiagnosticsColumns << "\n";
}

void write_diagnostics(std::ostream& os, const DiagnosticsRecord& r) {
  os << std::setprecision(17) << r.t << "," << r.mass << "," << r.energy << "," << r.entropy << "," << r.min_u << ","
     << r.max_u << "," << r.vertex_residual_max << "," << r.clamp_events << "," << r.moment << "\n";
}

DiagnosticsTable read_diagnostics(std::istream& is) {
  DiagnosticsTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_columns = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto header = parse_header(line);
      if (auto it = header.find("config_hash"); it != header.end()) table.config_hash = it->second;
      if (auto it = header.find("n"); it != header.end()) table.n = parse_double(it->second, line_no);
      continue;
    }
    if (!have_columns) {
      if (line.rfind("t,mass,energy", 0) != 0)
        throw IoError("line " + std::to_string(line_no) + ": missing diagnostics column header");
      have_columns = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8 && f.size() != 9)
      throw IoError("line " + std::to_string(line_no) + ": expected 9 diagnostics fields");
    DiagnosticsRecord r;
    r.t = parse_double(f[0], line_no);
    r.mass = parse_double(f[1], line_no);
    r.energy = parse_double(f[2], line_no);
    r.entropy = parse_double(f[3], line_no);
    r.min_u = parse_double(f[4], line_no);
    r.max_u = parse_double(f[5], line_no);
    r.vertex_residual_max = parse_double(f[6], line_no);
    r.clamp_events = static_cast<std::size_t>(parse_double(f[7], line_no));
    r.moment = f.size() == 9 ? parse_double(f[8], line_no) : std::numeric_limits<double>::quiet_NaN();
    table.records.push_back(r);
  }
  return table;
}

DiagnosticsTable read_diagnostics_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open diagnostics file '" + path.string() + "'");
  return read_diagnostics(in);
}

}  // namespace filmnet
