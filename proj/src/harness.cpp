#include "lander/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lander/config.hpp"

namespace lander {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

FlightMode mode_for(Phase phase) {
    switch (phase) {
        case Phase::Takeoff: return FlightMode::AutoTakeoff;
        case Phase::LandingCommit:
        case Phase::Landed: return FlightMode::CommitDescent;
        default: return FlightMode::Normal;
    }
}

}  // namespace

void TrialConfig::validate() const {
    profile.validate();
    if (!(start_distance > 0.0)) throw std::invalid_argument("TrialConfig: start_distance <= 0");
    if (latency_min < 0.0 || latency_max < latency_min) {
        throw std::invalid_argument("TrialConfig: bad latency range");
    }
    if (!(link_rate_hz > 0.0)) throw std::invalid_argument("TrialConfig: link rate <= 0");
    if (!(tick_rate_hz > 0.0) || !(heartbeat_hz > 0.0)) {
        throw std::invalid_argument("TrialConfig: bad tick or heartbeat rate");
    }
    if (!(timeout_s > 0.0) || !(arena_radius > 0.0) || !(pad_extent > 0.0)) {
        throw std::invalid_argument("TrialConfig: bad limits");
    }
    if (!(controller.deadzone_radius > 0.0) || !(controller.commit_altitude > 0.0)) {
        throw std::invalid_argument("TrialConfig: bad controller limits");
    }
}

TrialConfig default_trial_config(FiducialId id, std::uint64_t seed) {
    TrialConfig cfg;
    cfg.profile = FiducialProfile::builtin(id);
    cfg.controller.commit_altitude = ControllerConfig::default_commit_altitude(id);
    cfg.seed = seed;
    return cfg;
}

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::LandedOnPad: return "landed-on-pad";
        case Termination::GroundTouch: return "ground-touch";
        case Termination::Timeout: return "timeout";
        case Termination::LeftArena: return "left-arena";
    }
    return "unknown";
}

TrialResult run_trial(const TrialConfig& cfg) {
    cfg.validate();

    TrialResult result;
    result.config = cfg;

    Rng detection_rng(Rng::mix(cfg.seed, 1));
    Rng latency_rng(Rng::mix(cfg.seed, 2));

    // Pad due north of the drone start; the drone faces start_facing away
    // from the pad bearing (pi means facing directly away).
    Pose pad;
    pad.position = {cfg.start_distance, 0.0, 0.0};
    pad.orientation = euler_to_rotation(0.0, 0.0, cfg.pad_yaw);
    pad.frame = Frame::World;
    pad.body = Frame::Marker;

    VehicleState state;
    state.position = {0.0, 0.0, 0.0};
    state.yaw = wrap_angle(cfg.start_facing);
    state.mode = FlightMode::AutoTakeoff;

    CameraModel camera = cfg.camera;
    camera.max_range = cfg.profile.max_range_m;

    Controller controller(cfg.controller);
    const double dt = 1.0 / cfg.tick_rate_hz;
    const double frame_interval = detection_interval(cfg.profile, cfg.link_rate_hz);
    const double lat_min = cfg.toggles.latency ? cfg.latency_min : 0.0;
    const double lat_max = cfg.toggles.latency ? cfg.latency_max : 0.0;
    LatencyPipeline pipeline(lat_min, lat_max, frame_interval);

    SynthesisFlags flags;
    flags.noise = cfg.toggles.noise;
    flags.ambiguity = cfg.toggles.ambiguity;
    flags.loss = cfg.toggles.loss;
    flags.view_bias = cfg.toggles.view_bias;

    ControlCommand last_cmd;
    Phase last_phase = controller.phase();
    result.phase_timeline.emplace_back(0.0, last_phase);

    double next_capture = 0.0;
    double next_heartbeat = 0.0;
    const double heartbeat_interval = 1.0 / cfg.heartbeat_hz;
    const double max_ticks = cfg.timeout_s * cfg.tick_rate_hz + 2;

    bool terminated = false;
    for (int tick = 0; tick < max_ticks && !terminated; ++tick) {
        const double t = state.t;
        if (t >= cfg.timeout_s) {
            result.termination = Termination::Timeout;
            break;
        }

        // Capture on the detection schedule.
        if (t + 1e-9 >= next_capture) {
            flags.sweeping = controller.phase() == Phase::Search;
            const auto det = synthesize_detection(state.pose(), state.gimbal_tilt, pad,
                                                  cfg.profile, camera, flags, detection_rng, t);
            if (det) {
                pipeline.push(*det, t, latency_rng);
                if (det->ambiguity_flipped) result.flip_capture_times.push_back(t);
            }
            next_capture += frame_interval;
        }

        // Deliveries drive the controller; at most one arrives per tick
        // because releases are spaced a full frame interval apart.
        std::optional<Detection> delivered;
        while (auto det = pipeline.pop(t)) {
            const auto out = controller.step(*det, state.position.z, t);
            last_cmd = out.command;
            delivered = *det;
        }

        // Heartbeat keeps timeouts and the search pattern moving without detections.
        if (t + 1e-9 >= next_heartbeat) {
            const auto out = controller.step(std::nullopt, state.position.z, t);
            if (!delivered) last_cmd = out.command;
            next_heartbeat += heartbeat_interval;
        }

        if (controller.phase() != last_phase) {
            last_phase = controller.phase();
            result.phase_timeline.emplace_back(t, last_phase);
        }

        state.mode = mode_for(controller.phase());
        state = step_dynamics(state, last_cmd, dt, cfg.vehicle);

        // Ground contact resolves the trial in any phase after takeoff;
        // outside the commit it means the vehicle sank into the ground.
        if (state.airborne && state.mode != FlightMode::AutoTakeoff) {
            if (const auto outcome = touchdown_check(state, pad, cfg.pad_extent, cfg.vehicle)) {
                controller.step(std::nullopt, state.position.z, state.t, /*touchdown=*/true);
                result.phase_timeline.emplace_back(state.t, Phase::Landed);
                result.landing_radius = outcome->radius;
                result.termination =
                    outcome->on_pad ? Termination::LandedOnPad : Termination::GroundTouch;
                terminated = true;
            }
        }
        if (!terminated &&
            (state.position - pad.position).planar_norm() > cfg.arena_radius) {
            result.termination = Termination::LeftArena;
            terminated = true;
        }

        TickRecord rec;
        rec.t = state.t;
        rec.phase = terminated && result.termination == Termination::LandedOnPad
                        ? Phase::Landed
                        : controller.phase();
        rec.position = state.position;
        rec.yaw = state.yaw;
        rec.gimbal_tilt = state.gimbal_tilt;
        rec.command = last_cmd;
        rec.has_detection = delivered.has_value();
        if (delivered) rec.detection = *delivered;
        result.ticks.push_back(rec);
    }

    result.success = result.termination == Termination::LandedOnPad;
    result.flight_time = state.t;
    return result;
}

RadiiStats compute_radii_stats(std::vector<double> radii) {
    RadiiStats s;
    s.count = static_cast<int>(radii.size());
    if (radii.empty()) return s;
    std::sort(radii.begin(), radii.end());
    const auto quantile = [&](double p) {
        const double idx = p * (radii.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(idx);
        const std::size_t hi = std::min(lo + 1, radii.size() - 1);
        const double frac = idx - static_cast<double>(lo);
        return radii[lo] * (1.0 - frac) + radii[hi] * frac;
    };
    s.min = radii.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = radii.back();
    return s;
}

int CampaignResult::successes() const {
    return static_cast<int>(
        std::count_if(trials.begin(), trials.end(), [](const TrialResult& t) { return t.success; }));
}

std::vector<double> CampaignResult::landing_radii() const {
    std::vector<double> radii;
    for (const auto& t : trials) {
        if (t.landing_radius) radii.push_back(*t.landing_radius);
    }
    return radii;
}

RadiiStats CampaignResult::radii_stats() const { return compute_radii_stats(landing_radii()); }

std::uint64_t trial_seed(std::uint64_t base_seed, FiducialId profile, int index) {
    const std::uint64_t name_hash = Rng::hash_string(fiducial_name(profile));
    return Rng::mix(Rng::mix(base_seed, name_hash), static_cast<std::uint64_t>(index));
}

CampaignResult run_campaign(const TrialConfig& base, FiducialId profile,
                            std::uint64_t base_seed, bool parallel) {
    CampaignResult result;
    result.profile = profile;
    result.base_seed = base_seed;

    std::vector<TrialConfig> configs;
    configs.reserve(kCampaignTrials);
    for (int k = 0; k < kCampaignTrials; ++k) {
        TrialConfig cfg = base;
        cfg.profile.id = profile;
        cfg.pad_yaw = k * kCampaignYawStep;
        cfg.seed = trial_seed(base_seed, profile, k);
        configs.push_back(cfg);
    }

    result.trials.resize(kCampaignTrials);
    if (parallel) {
        std::vector<std::future<TrialResult>> futures;
        futures.reserve(kCampaignTrials);
        for (const auto& cfg : configs) {
            futures.push_back(std::async(std::launch::async, [cfg] { return run_trial(cfg); }));
        }
        for (int k = 0; k < kCampaignTrials; ++k) result.trials[k] = futures[k].get();
    } else {
        for (int k = 0; k < kCampaignTrials; ++k) result.trials[k] = run_trial(configs[k]);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exports

const char* const kTimeseriesHeader =
    "t,phase,pos_n,pos_e,pos_u,yaw,gimbal_tilt,has_det,det_capture_t,det_u,det_v,"
    "det_target_n,det_target_e,det_target_u,det_pad_yaw,det_flip,"
    "cmd_pitch,cmd_roll,cmd_yaw,cmd_throttle,cmd_gimbal";

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + file.string());
    }
    return out;
}

nlohmann::json summary_json(const TrialResult& r) {
    nlohmann::json j;
    j["config"] = trial_config_to_json(r.config);
    j["profile"] = fiducial_name(r.config.profile.id);
    j["seed"] = r.config.seed;
    j["pad_yaw"] = r.config.pad_yaw;
    j["success"] = r.success;
    j["termination"] = termination_name(r.termination);
    if (r.landing_radius) {
        j["landing_radius"] = *r.landing_radius;
    } else {
        j["landing_radius"] = nullptr;
    }
    j["flight_time"] = r.flight_time;
    j["num_ticks"] = r.ticks.size();
    auto timeline = nlohmann::json::array();
    for (const auto& [t, phase] : r.phase_timeline) {
        timeline.push_back({t, std::string(phase_name(phase))});
    }
    j["phase_timeline"] = timeline;
    j["flip_capture_times"] = r.flip_capture_times;
    return j;
}

}  // namespace

void export_trial(const TrialResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    auto csv = open_out(dir / "timeseries.csv");
    csv << kTimeseriesHeader << "\n";
    for (const auto& r : result.ticks) {
        const Detection& d = r.detection;
        csv << fmt(r.t) << ',' << phase_name(r.phase) << ',' << fmt(r.position.x) << ','
            << fmt(r.position.y) << ',' << fmt(r.position.z) << ',' << fmt(r.yaw) << ','
            << fmt(r.gimbal_tilt) << ',' << (r.has_detection ? 1 : 0) << ','
            << fmt(r.has_detection ? d.timestamp : 0.0) << ','
            << fmt(r.has_detection ? d.u : 0.0) << ',' << fmt(r.has_detection ? d.v : 0.0) << ','
            << fmt(r.has_detection ? d.position_target.x : 0.0) << ','
            << fmt(r.has_detection ? d.position_target.y : 0.0) << ','
            << fmt(r.has_detection ? d.position_target.z : 0.0) << ','
            << fmt(r.has_detection ? d.pad_yaw : 0.0) << ','
            << ((r.has_detection && d.ambiguity_flipped) ? 1 : 0) << ','
            << fmt(r.command.pitch) << ',' << fmt(r.command.roll) << ',' << fmt(r.command.yaw)
            << ',' << fmt(r.command.throttle) << ',' << fmt(r.command.gimbal_tilt) << "\n";
    }

    auto js = open_out(dir / "summary.json");
    js << summary_json(result).dump(2) << "\n";
}

void export_campaign(const CampaignResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (int k = 0; k < static_cast<int>(result.trials.size()); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "trial-%02d", k);
        export_trial(result.trials[k], dir / name);
    }

    nlohmann::json j;
    j["profile"] = fiducial_name(result.profile);
    j["base_seed"] = result.base_seed;
    j["successes"] = result.successes();
    j["trial_count"] = result.trials.size();
    if (!result.trials.empty()) {
        j["base_config"] = trial_config_to_json(result.trials.front().config);
    }
    auto trials = nlohmann::json::array();
    for (int k = 0; k < static_cast<int>(result.trials.size()); ++k) {
        const auto& t = result.trials[k];
        nlohmann::json row;
        row["index"] = k;
        row["seed"] = t.config.seed;
        row["pad_yaw"] = t.config.pad_yaw;
        row["success"] = t.success;
        row["termination"] = termination_name(t.termination);
        if (t.landing_radius) {
            row["landing_radius"] = *t.landing_radius;
        } else {
            row["landing_radius"] = nullptr;
        }
        row["flight_time"] = t.flight_time;
        trials.push_back(row);
    }
    j["trials"] = trials;
    const RadiiStats s = result.radii_stats();
    j["radii_stats"] = {{"count", s.count}, {"min", s.min},    {"q1", s.q1},
                        {"median", s.median}, {"q3", s.q3},    {"max", s.max}};

    auto js = open_out(dir / "campaign.json");
    js << j.dump(2) << "\n";

    auto csv = open_out(dir / "radii.csv");
    csv << "index,pad_yaw,success,termination,landing_radius\n";
    for (int k = 0; k < static_cast<int>(result.trials.size()); ++k) {
        const auto& t = result.trials[k];
        csv << k << ',' << fmt(t.config.pad_yaw) << ',' << (t.success ? 1 : 0) << ','
            << termination_name(t.termination) << ','
            << (t.landing_radius ? fmt(*t.landing_radius) : "") << "\n";
    }
}

// ---------------------------------------------------------------------------
// Plot-data extracts

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::runtime_error("timeseries column missing: " + name);
    }
};

CsvTable read_csv(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read input file: " + file.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (first) {
            table.header = fields;
            first = false;
        } else {
            table.rows.push_back(fields);
        }
    }
    return table;
}

}  // namespace

void write_tracking_plot(const std::filesystem::path& trial_dir,
                         const std::filesystem::path& out_file) {
    const CsvTable ts = read_csv(trial_dir / "timeseries.csv");
    const auto t = ts.column("t"), has = ts.column("has_det");
    const auto u = ts.column("det_u"), v = ts.column("det_v");
    auto out = open_out(out_file);
    out << "t,u,v\n";
    for (const auto& row : ts.rows) {
        if (row[has] == "1") out << row[t] << ',' << row[u] << ',' << row[v] << "\n";
    }
}

void write_trajectory_plot(const std::filesystem::path& trial_dir,
                           const std::filesystem::path& out_file) {
    const CsvTable ts = read_csv(trial_dir / "timeseries.csv");
    const auto t = ts.column("t"), has = ts.column("has_det");
    const auto pn = ts.column("pos_n"), pe = ts.column("pos_e"), pu = ts.column("pos_u");
    const auto yaw = ts.column("yaw");
    const auto tn = ts.column("det_target_n"), te = ts.column("det_target_e"),
               tu = ts.column("det_target_u");
    auto out = open_out(out_file);
    out << "t,pos_n,pos_e,pos_u,yaw,has_target,target_n,target_e,target_u\n";
    for (const auto& row : ts.rows) {
        out << row[t] << ',' << row[pn] << ',' << row[pe] << ',' << row[pu] << ',' << row[yaw]
            << ',' << row[has] << ',' << row[tn] << ',' << row[te] << ',' << row[tu] << "\n";
    }
}

void write_commands_plot(const std::filesystem::path& trial_dir,
                         const std::filesystem::path& out_file) {
    const CsvTable ts = read_csv(trial_dir / "timeseries.csv");
    const auto t = ts.column("t");
    const auto pitch = ts.column("cmd_pitch"), roll = ts.column("cmd_roll"),
               yaw = ts.column("cmd_yaw"), throttle = ts.column("cmd_throttle"),
               gimbal = ts.column("cmd_gimbal"), flip = ts.column("det_flip");
    auto out = open_out(out_file);
    out << "t,pitch,roll,yaw,throttle,gimbal_tilt,flip\n";
    for (const auto& row : ts.rows) {
        out << row[t] << ',' << row[pitch] << ',' << row[roll] << ',' << row[yaw] << ','
            << row[throttle] << ',' << row[gimbal] << ',' << row[flip] << "\n";
    }
}

void write_radii_plot(const std::filesystem::path& root, const std::filesystem::path& out_file) {
    std::vector<std::filesystem::path> campaign_files;
    if (std::filesystem::exists(root / "campaign.json")) {
        campaign_files.push_back(root / "campaign.json");
    } else {
        std::vector<std::filesystem::path> dirs;
        for (const auto& entry : std::filesystem::directory_iterator(root)) {
            if (entry.is_directory() && std::filesystem::exists(entry.path() / "campaign.json")) {
                dirs.push_back(entry.path());
            }
        }
        std::sort(dirs.begin(), dirs.end());
        for (const auto& d : dirs) campaign_files.push_back(d / "campaign.json");
    }
    if (campaign_files.empty()) {
        throw std::runtime_error("no campaign.json found under: " + root.string());
    }

    auto out = open_out(out_file);
    out << "profile,trial,landing_radius,success\n";
    for (const auto& file : campaign_files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read input file: " + file.string());
        const auto j = nlohmann::json::parse(in);
        const std::string profile = j.at("profile").get<std::string>();
        for (const auto& trial : j.at("trials")) {
            if (trial.at("landing_radius").is_null()) continue;
            out << profile << ',' << trial.at("index").get<int>() << ','
                << fmt(trial.at("landing_radius").get<double>()) << ','
                << (trial.at("success").get<bool>() ? 1 : 0) << "\n";
        }
    }
}

}  // namespace lander
