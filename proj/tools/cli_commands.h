#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cgame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGeometry = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitParse = 64;
inline constexpr int kExitUnsupported = 65;
inline constexpr int kExitMissingArtifact = 66;

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<int> nodes_per_axis;
  std::optional<int> threads;
};

int cmd_check(const std::string& config_path, const Overrides& ov, std::ostream& out,
              std::ostream& err);

/// mode is "finite" or "mintime". Artifacts go to <output_dir>/<mode>/.
int cmd_solve(const std::string& config_path, const std::string& mode, const Overrides& ov,
              std::ostream& out, std::ostream& err);

/// Loads <output_dir>/finite/manifest.json unless `manifest_path` is given.
int cmd_play(const std::string& config_path, const std::optional<std::string>& manifest_path,
             const std::vector<double>& x0, double t0, const Overrides& ov,
             std::ostream& out, std::ostream& err);

/// which is "eq42", "thm43" or "all".
int cmd_verify(const std::string& config_path, const std::string& which, const Overrides& ov,
               std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cgame::cli
