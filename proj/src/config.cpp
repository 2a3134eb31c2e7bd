#include "lander/config.hpp"

#include <fstream>
#include <stdexcept>

namespace lander {

namespace {

template <typename T>
void get_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

nlohmann::json camera_to_json(const CameraModel& c) {
    return {{"hfov_half_rad", c.hfov_half},
            {"vfov_half_rad", c.vfov_half},
            {"max_range_m", c.max_range}};
}

void camera_from_json(const nlohmann::json& j, CameraModel& c) {
    get_if_present(j, "hfov_half_rad", c.hfov_half);
    get_if_present(j, "vfov_half_rad", c.vfov_half);
    get_if_present(j, "max_range_m", c.max_range);
}

nlohmann::json controller_to_json(const ControllerConfig& c) {
    return {{"takeoff_altitude", c.takeoff_altitude},
            {"search_yaw_rate", c.search_yaw_rate},
            {"gimbal_sweep_period", c.gimbal_sweep_period},
            {"gimbal_sweep_range", c.gimbal_sweep_range},
            {"nominal_gimbal_rate", c.nominal_gimbal_rate},
            {"deadzone_radius", c.deadzone_radius},
            {"approach_gain", c.approach_gain},
            {"tracking_gain_u", c.tracking_gain_u},
            {"tracking_gain_v", c.tracking_gain_v},
            {"yaw_align_gain", c.yaw_align_gain},
            {"descent_rate", c.descent_rate},
            {"lock_count", c.lock_count},
            {"loss_timeout", c.loss_timeout},
            {"commit_altitude", c.commit_altitude},
            {"altitude_gate_slack", c.altitude_gate_slack},
            {"approach_handoff_radius", c.approach_handoff_radius},
            {"yaw_align_tolerance", c.yaw_align_tolerance}};
}

void controller_from_json(const nlohmann::json& j, ControllerConfig& c) {
    get_if_present(j, "takeoff_altitude", c.takeoff_altitude);
    get_if_present(j, "search_yaw_rate", c.search_yaw_rate);
    get_if_present(j, "gimbal_sweep_period", c.gimbal_sweep_period);
    get_if_present(j, "gimbal_sweep_range", c.gimbal_sweep_range);
    get_if_present(j, "nominal_gimbal_rate", c.nominal_gimbal_rate);
    get_if_present(j, "deadzone_radius", c.deadzone_radius);
    get_if_present(j, "approach_gain", c.approach_gain);
    get_if_present(j, "tracking_gain_u", c.tracking_gain_u);
    get_if_present(j, "tracking_gain_v", c.tracking_gain_v);
    get_if_present(j, "yaw_align_gain", c.yaw_align_gain);
    get_if_present(j, "descent_rate", c.descent_rate);
    get_if_present(j, "lock_count", c.lock_count);
    get_if_present(j, "loss_timeout", c.loss_timeout);
    get_if_present(j, "commit_altitude", c.commit_altitude);
    get_if_present(j, "altitude_gate_slack", c.altitude_gate_slack);
    get_if_present(j, "approach_handoff_radius", c.approach_handoff_radius);
    get_if_present(j, "yaw_align_tolerance", c.yaw_align_tolerance);
}

nlohmann::json vehicle_to_json(const VehicleParams& v) {
    return {{"velocity_tau", v.velocity_tau},
            {"max_speed", v.max_speed},
            {"yaw_rate_per_unit", v.yaw_rate_per_unit},
            {"gimbal_rate_per_unit", v.gimbal_rate_per_unit},
            {"touchdown_altitude", v.touchdown_altitude},
            {"commit_descent_speed", v.commit_descent_speed},
            {"takeoff_climb_rate", v.takeoff_climb_rate},
            {"wind_bias_north", v.wind_bias_north},
            {"wind_bias_east", v.wind_bias_east}};
}

void vehicle_from_json(const nlohmann::json& j, VehicleParams& v) {
    get_if_present(j, "velocity_tau", v.velocity_tau);
    get_if_present(j, "max_speed", v.max_speed);
    get_if_present(j, "yaw_rate_per_unit", v.yaw_rate_per_unit);
    get_if_present(j, "gimbal_rate_per_unit", v.gimbal_rate_per_unit);
    get_if_present(j, "touchdown_altitude", v.touchdown_altitude);
    get_if_present(j, "commit_descent_speed", v.commit_descent_speed);
    get_if_present(j, "takeoff_climb_rate", v.takeoff_climb_rate);
    get_if_present(j, "wind_bias_north", v.wind_bias_north);
    get_if_present(j, "wind_bias_east", v.wind_bias_east);
}

nlohmann::json profile_to_json(const FiducialProfile& p) {
    return {{"ambiguity_base", p.ambiguity_base},
            {"detection_rate_hz", p.detection_rate_hz},
            {"min_range_m", p.min_range_m},
            {"max_range_m", p.max_range_m},
            {"acquisition_loss", p.acquisition_loss},
            {"baseline_loss", p.baseline_loss},
            {"position_noise_sigma", p.position_noise_sigma},
            {"view_bias_gain", p.view_bias_gain}};
}

void profile_from_json(const nlohmann::json& j, FiducialProfile& p) {
    get_if_present(j, "ambiguity_base", p.ambiguity_base);
    get_if_present(j, "detection_rate_hz", p.detection_rate_hz);
    get_if_present(j, "min_range_m", p.min_range_m);
    get_if_present(j, "max_range_m", p.max_range_m);
    get_if_present(j, "acquisition_loss", p.acquisition_loss);
    get_if_present(j, "baseline_loss", p.baseline_loss);
    get_if_present(j, "position_noise_sigma", p.position_noise_sigma);
    get_if_present(j, "view_bias_gain", p.view_bias_gain);
}

nlohmann::json toggles_to_json(const TrialToggles& t) {
    return {{"ambiguity", t.ambiguity},
            {"noise", t.noise},
            {"loss", t.loss},
            {"latency", t.latency},
            {"view_bias", t.view_bias}};
}

void toggles_from_json(const nlohmann::json& j, TrialToggles& t) {
    get_if_present(j, "ambiguity", t.ambiguity);
    get_if_present(j, "noise", t.noise);
    get_if_present(j, "loss", t.loss);
    get_if_present(j, "latency", t.latency);
    get_if_present(j, "view_bias", t.view_bias);
}

}  // namespace

RunConfig::RunConfig() {
    for (const FiducialId id : kAllFiducialIds) {
        profiles.emplace(id, FiducialProfile::builtin(id));
    }
}

TrialConfig RunConfig::trial_config(FiducialId id, std::uint64_t seed, double pad_yaw) const {
    TrialConfig cfg;
    const auto it = profiles.find(id);
    cfg.profile = it != profiles.end() ? it->second : FiducialProfile::builtin(id);
    cfg.profile.id = id;
    cfg.camera = camera;
    cfg.controller = controller;
    cfg.controller.commit_altitude =
        commit_altitude_override.value_or(ControllerConfig::default_commit_altitude(id));
    cfg.vehicle = vehicle;
    cfg.toggles = toggles;
    cfg.latency_min = latency_min;
    cfg.latency_max = latency_max;
    cfg.link_rate_hz = link_rate_hz;
    cfg.pad_yaw = pad_yaw;
    cfg.start_distance = start_distance;
    cfg.start_facing = start_facing;
    cfg.seed = seed;
    cfg.timeout_s = timeout_s;
    cfg.arena_radius = arena_radius;
    cfg.pad_extent = pad_extent;
    cfg.tick_rate_hz = tick_rate_hz;
    cfg.heartbeat_hz = heartbeat_hz;
    return cfg;
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    if (const auto it = j.find("camera"); it != j.end()) camera_from_json(*it, cfg.camera);
    if (const auto it = j.find("controller"); it != j.end()) {
        controller_from_json(*it, cfg.controller);
        if (it->contains("commit_altitude")) {
            cfg.commit_altitude_override = it->at("commit_altitude").get<double>();
        }
    }
    if (const auto it = j.find("vehicle"); it != j.end()) vehicle_from_json(*it, cfg.vehicle);
    if (const auto it = j.find("toggles"); it != j.end()) toggles_from_json(*it, cfg.toggles);
    if (const auto it = j.find("profiles"); it != j.end()) {
        for (const auto& [name, value] : it->items()) {
            const auto id = parse_fiducial_name(name);
            if (!id) throw std::invalid_argument("config: unknown profile name: " + name);
            profile_from_json(value, cfg.profiles[*id]);
            cfg.profiles[*id].id = *id;
        }
    }
    if (const auto it = j.find("latency"); it != j.end()) {
        get_if_present(*it, "min_s", cfg.latency_min);
        get_if_present(*it, "max_s", cfg.latency_max);
        get_if_present(*it, "link_rate_hz", cfg.link_rate_hz);
    }
    if (const auto it = j.find("trial"); it != j.end()) {
        get_if_present(*it, "start_distance", cfg.start_distance);
        get_if_present(*it, "start_facing", cfg.start_facing);
        get_if_present(*it, "timeout_s", cfg.timeout_s);
        get_if_present(*it, "arena_radius", cfg.arena_radius);
        get_if_present(*it, "pad_extent", cfg.pad_extent);
        get_if_present(*it, "tick_rate_hz", cfg.tick_rate_hz);
        get_if_present(*it, "heartbeat_hz", cfg.heartbeat_hz);
    }
    get_if_present(j, "base_seed", cfg.base_seed);
}

RunConfig load_run_config(const std::filesystem::path& file) {
    RunConfig cfg;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + file.string());
    apply_config_json(cfg, nlohmann::json::parse(in));
    return cfg;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    nlohmann::json profiles;
    for (const auto& [id, profile] : cfg.profiles) {
        profiles[std::string(fiducial_name(id))] = profile_to_json(profile);
    }
    nlohmann::json j;
    j["camera"] = camera_to_json(cfg.camera);
    j["controller"] = controller_to_json(cfg.controller);
    if (cfg.commit_altitude_override) {
        j["controller"]["commit_altitude"] = *cfg.commit_altitude_override;
    } else {
        j["controller"].erase("commit_altitude");
    }
    j["vehicle"] = vehicle_to_json(cfg.vehicle);
    j["toggles"] = toggles_to_json(cfg.toggles);
    j["profiles"] = profiles;
    j["latency"] = {{"min_s", cfg.latency_min},
                    {"max_s", cfg.latency_max},
                    {"link_rate_hz", cfg.link_rate_hz}};
    j["trial"] = {{"start_distance", cfg.start_distance}, {"start_facing", cfg.start_facing},
                  {"timeout_s", cfg.timeout_s},           {"arena_radius", cfg.arena_radius},
                  {"pad_extent", cfg.pad_extent},         {"tick_rate_hz", cfg.tick_rate_hz},
                  {"heartbeat_hz", cfg.heartbeat_hz}};
    j["base_seed"] = cfg.base_seed;
    return j;
}

nlohmann::json trial_config_to_json(const TrialConfig& cfg) {
    nlohmann::json j;
    j["profile_name"] = fiducial_name(cfg.profile.id);
    j["profile"] = profile_to_json(cfg.profile);
    j["camera"] = camera_to_json(cfg.camera);
    j["controller"] = controller_to_json(cfg.controller);
    j["vehicle"] = vehicle_to_json(cfg.vehicle);
    j["toggles"] = toggles_to_json(cfg.toggles);
    j["latency"] = {{"min_s", cfg.latency_min},
                    {"max_s", cfg.latency_max},
                    {"link_rate_hz", cfg.link_rate_hz}};
    j["pad_yaw"] = cfg.pad_yaw;
    j["start_distance"] = cfg.start_distance;
    j["start_facing"] = cfg.start_facing;
    j["seed"] = cfg.seed;
    j["timeout_s"] = cfg.timeout_s;
    j["arena_radius"] = cfg.arena_radius;
    j["pad_extent"] = cfg.pad_extent;
    j["tick_rate_hz"] = cfg.tick_rate_hz;
    j["heartbeat_hz"] = cfg.heartbeat_hz;
    return j;
}

TrialConfig trial_config_from_json(const nlohmann::json& j) {
    TrialConfig cfg;
    const auto id = parse_fiducial_name(j.at("profile_name").get<std::string>());
    if (!id) throw std::invalid_argument("trial config: unknown profile name");
    cfg.profile = FiducialProfile::builtin(*id);
    profile_from_json(j.at("profile"), cfg.profile);
    cfg.profile.id = *id;
    camera_from_json(j.at("camera"), cfg.camera);
    controller_from_json(j.at("controller"), cfg.controller);
    vehicle_from_json(j.at("vehicle"), cfg.vehicle);
    toggles_from_json(j.at("toggles"), cfg.toggles);
    get_if_present(j.at("latency"), "min_s", cfg.latency_min);
    get_if_present(j.at("latency"), "max_s", cfg.latency_max);
    get_if_present(j.at("latency"), "link_rate_hz", cfg.link_rate_hz);
    get_if_present(j, "pad_yaw", cfg.pad_yaw);
    get_if_present(j, "start_distance", cfg.start_distance);
    get_if_present(j, "start_facing", cfg.start_facing);
    get_if_present(j, "seed", cfg.seed);
    get_if_present(j, "timeout_s", cfg.timeout_s);
    get_if_present(j, "arena_radius", cfg.arena_radius);
    get_if_present(j, "pad_extent", cfg.pad_extent);
    get_if_present(j, "tick_rate_hz", cfg.tick_rate_hz);
    get_if_present(j, "heartbeat_hz", cfg.heartbeat_hz);
    return cfg;
}

}  // namespace lander
