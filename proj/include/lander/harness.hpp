// Seeded closed-loop trials and 20-landing campaigns: wires the marker model,
// latency pipeline, controller, and vehicle dynamics into one deterministic
// simulation, computes outcome metrics, and exports logs and plot data.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lander/controller.hpp"
#include "lander/geometry.hpp"
#include "lander/marker_model.hpp"
#include "lander/vehicle_sim.hpp"

namespace lander {

// The rotation experiment: 20 landings, pad turned clockwise 18 degrees after each.
constexpr int kCampaignTrials = 20;
constexpr double kCampaignYawStep = deg_to_rad(-18.0);

struct TrialToggles {
    bool ambiguity = true;
    bool noise = true;
    bool loss = true;
    bool latency = true;
    bool view_bias = true;
};

struct TrialConfig {
    FiducialProfile profile;
    CameraModel camera;
    ControllerConfig controller;
    VehicleParams vehicle;
    TrialToggles toggles;
    double latency_min = 0.5;       // s
    double latency_max = 2.0;       // s
    double link_rate_hz = 7.0;      // video link frame rate cap
    double pad_yaw = 0.0;           // rad, world heading of the pad's forward axis
    double start_distance = 2.5;    // m between drone and pad at start
    double start_facing = kPi;      // rad relative to the pad bearing (pi = facing away)
    std::uint64_t seed = 1;
    double timeout_s = 180.0;
    double arena_radius = 15.0;     // m from the pad before the trial aborts
    double pad_extent = 0.28;       // m, pad half-width used for the on-pad test
    double tick_rate_hz = 50.0;
    double heartbeat_hz = 5.0;

    void validate() const;  // throws std::invalid_argument on inconsistent values
};

/// Builds a trial configuration with the built-in defaults for one fiducial
/// system, including its per-system landing commit altitude.
TrialConfig default_trial_config(FiducialId id, std::uint64_t seed);

enum class Termination { LandedOnPad, GroundTouch, Timeout, LeftArena };

std::string_view termination_name(Termination t);

/// One simulation tick as logged: vehicle state after the tick, the command
/// actuated during it, and the detection delivered on it, if any.
struct TickRecord {
    double t = 0.0;
    Phase phase = Phase::Takeoff;
    Vec3 position;
    double yaw = 0.0;
    double gimbal_tilt = 0.0;
    ControlCommand command;
    bool has_detection = false;
    Detection detection;  // valid only when has_detection
};

struct TrialResult {
    TrialConfig config;
    bool success = false;
    Termination termination = Termination::Timeout;
    std::optional<double> landing_radius;  // present iff a touchdown occurred
    double flight_time = 0.0;
    std::vector<std::pair<double, Phase>> phase_timeline;
    std::vector<TickRecord> ticks;
    std::vector<double> flip_capture_times;  // marker-model flip events, capture side
};

TrialResult run_trial(const TrialConfig& cfg);

struct RadiiStats {
    int count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Quartiles with linear interpolation over the sorted sample.
RadiiStats compute_radii_stats(std::vector<double> radii);

struct CampaignResult {
    FiducialId profile = FiducialId::AprilTag48h12;
    std::uint64_t base_seed = 0;
    std::vector<TrialResult> trials;

    int successes() const;
    std::vector<double> landing_radii() const;  // all touchdowns, trial order
    RadiiStats radii_stats() const;
};

/// Deterministic per-trial seed from the campaign seed, profile, and index.
std::uint64_t trial_seed(std::uint64_t base_seed, FiducialId profile, int index);

/// Runs the 20-trial rotation campaign. `base` supplies every setting except
/// pad_yaw and seed, which the campaign derives per trial. Trials are
/// independent; `parallel` only changes scheduling, never results.
CampaignResult run_campaign(const TrialConfig& base, FiducialId profile,
                            std::uint64_t base_seed, bool parallel = false);

// ---------------------------------------------------------------------------
// Exports. All writers are deterministic: same result, same bytes.

/// Writes timeseries.csv and summary.json into `dir` (created if needed).
void export_trial(const TrialResult& result, const std::filesystem::path& dir);

/// Writes per-trial subdirectories plus campaign.json and radii.csv.
void export_campaign(const CampaignResult& result, const std::filesystem::path& dir);

extern const char* const kTimeseriesHeader;

/// Columnar plot-data extracts from previously exported outputs.
void write_tracking_plot(const std::filesystem::path& trial_dir,
                         const std::filesystem::path& out_file);
void write_trajectory_plot(const std::filesystem::path& trial_dir,
                           const std::filesystem::path& out_file);
void write_commands_plot(const std::filesystem::path& trial_dir,
                         const std::filesystem::path& out_file);
/// One landing-radius distribution series per campaign directory found
/// directly under `root` (or `root` itself when it is a campaign directory).
void write_radii_plot(const std::filesystem::path& root,
                      const std::filesystem::path& out_file);

}  // namespace lander
