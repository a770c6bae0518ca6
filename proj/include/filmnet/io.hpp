#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "filmnet/diagnostics.hpp"
#include "filmnet/grid.hpp"
#include "filmnet/timestepper.hpp"

namespace filmnet {

// Snapshot CSV:
//   # t=<t>,step=<k>,config_hash=<hash>
//   edge_id,s,x,u
//   one row per node of every edge (end points included), edges in order.
// x is the arc length along the edges laid end to end in edge order.
void write_snapshot(std::ostream& os, const FilmState& state, const GraphGrid& grid, const std::string& hash);

struct Snapshot {
  FilmState state;
  std::string config_hash;
};

/// Reads a snapshot back onto `grid`. Throws IoError on malformed input.
Snapshot read_snapshot(std::istream& is, const GraphGrid& grid);

// Diagnostics CSV:
//   # config_hash=<hash>,n=<n>
//   t,mass,energy,entropy,min_u,max_u,vertex_residual_max,clamp_events,moment
inline constexpr const char* kDiagnosticsColumns =
    "t,mass,energy,entropy,min_u,max_u,vertex_residual_max,clamp_events,moment";

void write_diagnostics_header(std::ostream& os, const std::string& hash, double n);
void write_diagnostics(std::ostream& os, const DiagnosticsRecord& record);

struct DiagnosticsTable {
  std::vector<DiagnosticsRecord> records;
  std::string config_hash;
  std::optional<double> n;
};

DiagnosticsTable read_diagnostics(std::istream& is);
DiagnosticsTable read_diagnostics_file(const std::filesystem::path& path);

}  // namespace filmnet
