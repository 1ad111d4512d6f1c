// SPDX-License-Identifier: Apache-2.0

#ifndef PLATE_CLI_HPP
#define PLATE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "plate/geometry.hpp"

namespace plate {

/// Front-end configuration: flat key=value file plus command-line
/// overrides, later settings win.
struct RunConfig {
  int degree = 1;
  std::vector<int> levels = {4, 5, 6, 7};
  double eta = -1;  ///< <0 means the default 10 k^2
  double nu = 0.0;
  double stiffness = 1.0;
  SideTags tags;  ///< west, north, east, south; default benchmark layout
  CellKind kind = CellKind::Triangle;
  std::string mode = "study";  ///< solve | study | diagnose
  std::string out;
  std::string mesh_file;  ///< optional externally generated mesh (solve/diagnose)
  bool dump_systems = false;
  int threads = 1;

  void validate() const;  ///< throws InvalidConfig
};

/// Parse "c,s,f,s" in (west,north,east,south) order.
SideTags parse_tags(const std::string& spec);
/// Parse "A..B" or a single level.
std::vector<int> parse_levels(const std::string& spec);

void apply_config_file(RunConfig& config, const std::string& path);
void apply_option(RunConfig& config, const std::string& key, const std::string& value);

/// Run one mode; returns the process exit code and writes artifacts.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry: parses argv, maps errors to exit codes.
int run_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plate

#endif
