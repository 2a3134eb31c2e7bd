// Human-readable JSON configuration: every parameter has a built-in default,
// a config file overrides sections of it, and command-line flags override the
// file. The effective configuration is echoed into every output.

#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "json.hpp"
#include "lander/harness.hpp"

namespace lander {

/// Parsed run configuration: the trial template plus campaign seed defaults.
struct RunConfig {
    CameraModel camera;
    ControllerConfig controller;
    /// When unset, the commit altitude follows the per-system default.
    std::optional<double> commit_altitude_override;
    VehicleParams vehicle;
    std::map<FiducialId, FiducialProfile> profiles;  // built-ins unless overridden
    TrialToggles toggles;
    double latency_min = 0.5;
    double latency_max = 2.0;
    double link_rate_hz = 7.0;
    double start_distance = 2.5;
    double start_facing = kPi;
    double timeout_s = 180.0;
    double arena_radius = 15.0;
    double pad_extent = 0.28;
    double tick_rate_hz = 50.0;
    double heartbeat_hz = 5.0;
    std::uint64_t base_seed = 1;

    RunConfig();

    /// Trial configuration for one fiducial system under this run config.
    TrialConfig trial_config(FiducialId id, std::uint64_t seed, double pad_yaw = 0.0) const;
};

/// Defaults overlaid with the given config file (every section optional).
RunConfig load_run_config(const std::filesystem::path& file);

/// Applies a JSON fragment on top of an existing config (file loading and
/// tests share this).
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& cfg);

nlohmann::json trial_config_to_json(const TrialConfig& cfg);
TrialConfig trial_config_from_json(const nlohmann::json& j);

}  // namespace lander
