#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tikband/inference.hpp"
#include "tikband/models.hpp"
#include "tikband/simulation.hpp"

namespace tikband {

enum class Command { npiv, funreg, deconv, mc, dkw };

struct RunSpec {
  Command command = Command::npiv;
  std::optional<std::filesystem::path> input_path;
  std::filesystem::path output_path;
  double alpha = 0.0;
  std::optional<double> h;
  double gamma = 0.05;
  BandMethod method = BandMethod::gauss;
  int process_index = 1;
  int grid_m = 100;
  double c0 = 0.0;
  int gauss_draws = 2000;
  std::uint64_t seed = 0;
  int workers = 1;

  // npiv / mc
  double truncation = 1.0;
  // mc
  std::optional<std::string> preset;
  std::optional<int> reps;
  std::optional<Index> n;
  double phi_scale = 1.0;
  // funreg: grid bounds of the z and w curves
  double t_lower = 0.0, t_upper = 1.0;
  double s_lower = 0.0, s_upper = 1.0;
  // deconv: estimation interval and noise density
  std::optional<std::pair<double, double>> bounds;
  std::optional<std::string> noise;
  std::optional<std::filesystem::path> noise_table;
  // dkw: evaluation interval (defaults to the sample range)
  std::optional<std::pair<double, double>> x_bounds;

  // Flags given explicitly on the command line (long names without dashes).
  std::vector<std::string> given;

  // Set when --help was requested; holds the usage text.
  std::optional<std::string> help;
};

/// argv without the program name.
RunSpec parse_cli(const std::vector<std::string>& args);

/// Monte Carlo configuration: preset (if any) overridden by explicit flags.
McConfig mc_config(const RunSpec& spec);

/// Header must contain y, z and w (any order).
NpivData load_npiv_csv(const std::filesystem::path& path);

/// Wide layout: y, z_1..z_mt, w_1..w_ms.
FunRegData load_funreg_csv(const std::filesystem::path& path, double t_lower, double t_upper, double s_lower,
                           double s_upper);

/// One numeric column named `column`.
Eigen::VectorXd load_column_csv(const std::filesystem::path& path, const std::string& column);

/// Tabulated density with header u,f.
NoiseDensity load_noise_table(const std::filesystem::path& path);

/// "epanechnikov:<scale>".
NoiseDensity parse_noise_spec(const std::string& text);

/// z,estimate,lower,upper plus <path>.meta.json.
void write_band_csv(const ConfidenceBand& band, const std::filesystem::path& path);

/// x,ecdf,lower,upper.
void write_ecdf_csv(const ConfidenceBand& band, const std::filesystem::path& path);

nlohmann::json band_meta_json(const ConfidenceBand& band);
nlohmann::json to_json(const McConfig& config);
nlohmann::json to_json(const McReport& report);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

/// Runs a parsed command; returns a one-line summary.
std::string run(const RunSpec& spec);

}  // namespace tikband
