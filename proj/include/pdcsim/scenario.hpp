// JSON-configured experiments: parse, validate, run, and record every
// artifact with its content hash in manifest.json. Schema in docs/config.md.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdcsim/ghost.hpp"

namespace pdcsim::scenario {

enum class Kind { SeparabilitySweep, NrfSweep, OracleValidate, GhostImage, GhostDiffraction };

std::string to_string(Kind kind);

/// Validation failure naming the offending field, e.g. `geometry.d3`.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ParameterGrid {
  std::vector<double> mu_t;
  std::vector<double> mu_r;
  std::vector<double> n_pdc;
  std::vector<double> tau{1.0};
};

struct ProfileSpec {
  enum class Type { Constant, Sinc } type{Type::Constant};
  double mu_t{0};
  double mu_r{0};
  double kappa{0};  // |κ| (κ₀ for sinc), resolved from n_pdc when given
  double beta{0};
};

struct ObjectSpec {
  enum class Type { SingleSlit, DoubleSlit, Grating, Csv } type{Type::SingleSlit};
  double width{0};
  double center{0};
  double separation{0};
  double period{0};
  double duty{0.5};
  int slits{1};
  std::filesystem::path csv;
  double feature{0};  // spectral-support scale for the default q grid
  std::optional<double> dx;
  int nx{512};
};

struct ScenarioConfig {
  Kind kind{Kind::SeparabilitySweep};
  std::filesystem::path output_dir{"pdcsim-out"};
  std::uint64_t seed{1};
  int random_checks{0};

  ParameterGrid grid;  // sweeps and oracle-validate

  int cutoff{0};  // 0: default_cutoff per point
  double tolerance{1e-6};
  bool factorization{false};

  ghost::GhostGeometry geometry;
  ProfileSpec profile;
  ObjectSpec object;
  int q_half{512};
  double q_window{8.0};
  std::optional<double> dq;
  ghost::Summation summation{ghost::Summation::Direct};
  std::optional<double> min_ncc;
};

/// Relative paths inside the config (object CSV) resolve against base_dir.
ScenarioConfig parse_config(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

struct Artifact {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct Check {
  std::string name;
  double value{0};
  double threshold{0};
  bool passed{false};
};

struct Manifest {
  Kind kind{Kind::SeparabilitySweep};
  std::vector<Artifact> files;
  std::vector<Check> checks;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Output directory precedence: explicit override, then $PDCSIM_OUT_DIR, then
/// the config's output_dir.
std::filesystem::path resolve_output_dir(const ScenarioConfig& config,
                                         const std::optional<std::filesystem::path>& cli_out);

/// Runs the scenario, writes artifacts plus manifest.json into out_dir.
Manifest run(const ScenarioConfig& config, const std::filesystem::path& out_dir,
             unsigned workers = 1);

}  // namespace pdcsim::scenario
