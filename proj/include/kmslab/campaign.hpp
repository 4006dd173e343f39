#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmslab/ellipticity.hpp"
#include "kmslab/spectral.hpp"

namespace kmslab {

/// Overrides for presets; unset fields keep the preset defaults.
struct CampaignOptions {
  std::optional<std::vector<std::size_t>> grids;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<int> j;
  std::uint64_t seed = 1;
  int random_fields = 32;
  int bump_fields = 8;
  Thresholds thresholds;
  /// Directory for binary field snapshots; empty disables dumping.
  std::string dump_dir;
  /// Custom first-kind campaign (preset "kms1").
  std::string A = "sym";
  std::string B_part = "Id";
  std::string base = "curl";
  std::size_t n = 3;
};

struct CampaignResult {
  std::string preset;
  bool pass = false;
  std::string expectation;
  std::string summary;
  nlohmann::json report;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& preset_names();
CampaignResult run_preset(const std::string& name, const CampaignOptions& opt = {});

/// Default corpus at one resolution: band-limited random fields (modes <= min grid / 8) and centred bumps.
std::vector<GridField> default_corpus(const GridDomain& d, Space space, std::size_t min_grid,
                                      const CampaignOptions& opt);

/// Little-endian dump: uint64 n, N, dim, then float64 values point-major.
void write_field_binary(const std::string& path, const GridField& f);
GridField read_field_binary(const std::string& path);

}  // namespace kmslab
