// Command-line entry point: single trials, rotation campaigns, and plot-data
// extraction. Exit codes: 0 success, 2 unsuccessful landing, 1 usage error.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lander/config.hpp"
#include "lander/harness.hpp"

namespace {

using namespace lander;

std::string valid_profile_names() {
    std::string names;
    for (const FiducialId id : kAllFiducialIds) {
        if (!names.empty()) names += ", ";
        names += fiducial_name(id);
    }
    return names;
}

struct CommonOpts {
    std::string profile_name;
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool seed_given = false;
    bool disable_ambiguity = false;
    bool disable_noise = false;
    bool disable_loss = false;
    bool disable_latency = false;
    bool disable_view_bias = false;
};

void add_common_options(CLI::App& cmd, CommonOpts& opts, bool with_toggles) {
    cmd.add_option("--config", opts.config_path, "JSON config file (all sections optional)")
        ->check(CLI::ExistingFile);
    cmd.add_option("--out", opts.out_dir, "output directory")
        ->envname("LANDER_OUT_DIR");
    cmd.add_option("--seed", opts.seed, "base random seed");
    if (with_toggles) {
        cmd.add_flag("--disable-ambiguity", opts.disable_ambiguity,
                     "turn off orientation ambiguity flips");
        cmd.add_flag("--disable-noise", opts.disable_noise, "turn off position noise");
        cmd.add_flag("--disable-loss", opts.disable_loss, "turn off stochastic detection loss");
        cmd.add_flag("--disable-latency", opts.disable_latency, "deliver detections immediately");
        cmd.add_flag("--disable-view-bias", opts.disable_view_bias,
                     "turn off the multi-marker view bias");
    }
}

RunConfig build_run_config(const CommonOpts& opts) {
    RunConfig rc;
    if (!opts.config_path.empty()) rc = load_run_config(opts.config_path);
    if (opts.disable_ambiguity) rc.toggles.ambiguity = false;
    if (opts.disable_noise) rc.toggles.noise = false;
    if (opts.disable_loss) rc.toggles.loss = false;
    if (opts.disable_latency) rc.toggles.latency = false;
    if (opts.disable_view_bias) rc.toggles.view_bias = false;
    return rc;
}

int resolve_profile(const std::string& name, FiducialId& id) {
    const auto parsed = parse_fiducial_name(name);
    if (!parsed) {
        std::fprintf(stderr, "error: unknown profile '%s'; valid names: %s\n", name.c_str(),
                     valid_profile_names().c_str());
        return 1;
    }
    id = *parsed;
    return 0;
}

int cmd_trial(const CommonOpts& opts, double pad_yaw_deg) {
    FiducialId id;
    if (resolve_profile(opts.profile_name, id) != 0) return 1;

    const RunConfig rc = build_run_config(opts);
    const TrialConfig cfg = rc.trial_config(id, opts.seed, deg_to_rad(pad_yaw_deg));
    const TrialResult result = run_trial(cfg);

    const std::filesystem::path dir =
        std::filesystem::path(opts.out_dir) / ("trial-" + std::string(fiducial_name(id)));
    export_trial(result, dir);

    std::printf("profile=%s seed=%llu termination=%s", fiducial_name(id).data(),
                static_cast<unsigned long long>(cfg.seed),
                termination_name(result.termination).data());
    if (result.landing_radius) std::printf(" landing_radius=%.3f", *result.landing_radius);
    std::printf(" flight_time=%.1fs out=%s\n", result.flight_time, dir.string().c_str());
    return result.success ? 0 : 2;
}

int cmd_campaign(const CommonOpts& opts, bool all, bool serial) {
    std::vector<FiducialId> ids;
    if (all) {
        ids.assign(kAllFiducialIds.begin(), kAllFiducialIds.end());
    } else {
        FiducialId id;
        if (resolve_profile(opts.profile_name, id) != 0) return 1;
        ids.push_back(id);
    }

    const RunConfig rc = build_run_config(opts);
    std::printf("%-16s %-12s %-14s %s\n", "profile", "successes", "median radius", "output");
    for (const FiducialId id : ids) {
        const TrialConfig base = rc.trial_config(id, 0);
        const CampaignResult result = run_campaign(base, id, opts.seed, /*parallel=*/!serial);
        const std::filesystem::path dir =
            std::filesystem::path(opts.out_dir) / ("campaign-" + std::string(fiducial_name(id)));
        export_campaign(result, dir);
        const RadiiStats stats = result.radii_stats();
        std::printf("%-16s %2d/%-9d %-14s %s\n", fiducial_name(id).data(), result.successes(),
                    kCampaignTrials, stats.count > 0 ? std::to_string(stats.median).c_str() : "-",
                    dir.string().c_str());
    }
    return 0;
}

int cmd_plotdata(const std::string& figure, const std::string& input, const std::string& out_dir) {
    const std::filesystem::path in(input);
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    try {
        if (figure == "radii") {
            write_radii_plot(in, out / "plot_radii.csv");
        } else if (figure == "tracking") {
            write_tracking_plot(in, out / "plot_tracking.csv");
        } else if (figure == "trajectory") {
            write_trajectory_plot(in, out / "plot_trajectory.csv");
        } else if (figure == "commands") {
            write_commands_plot(in, out / "plot_commands.csv");
        } else {
            std::fprintf(stderr,
                         "error: unknown figure '%s'; valid: radii, tracking, trajectory, "
                         "commands\n",
                         figure.c_str());
            return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::printf("wrote plot_%s.csv to %s\n", figure.c_str(), out.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gimbal-tracking autonomous landing simulator"};
    app.require_subcommand(1);

    CommonOpts trial_opts;
    double pad_yaw_deg = 0.0;
    auto* trial = app.add_subcommand("trial", "run one landing attempt");
    trial->add_option("--profile", trial_opts.profile_name, "fiducial system to simulate")
        ->required();
    trial->add_option("--pad-yaw-deg", pad_yaw_deg, "pad heading in degrees");
    add_common_options(*trial, trial_opts, /*with_toggles=*/true);

    CommonOpts campaign_opts;
    bool all_profiles = false;
    bool serial = false;
    auto* campaign = app.add_subcommand("campaign", "run the 20-landing rotation experiment");
    campaign->add_option("--profile", campaign_opts.profile_name, "fiducial system to simulate");
    campaign->add_flag("--all", all_profiles, "run every built-in profile");
    campaign->add_flag("--serial", serial, "run trials sequentially");
    add_common_options(*campaign, campaign_opts, /*with_toggles=*/true);

    std::string figure;
    std::string input;
    std::string plot_out = "out";
    auto* plotdata = app.add_subcommand("plotdata", "extract plot-ready columns from outputs");
    plotdata->add_option("--figure", figure, "radii, tracking, trajectory, or commands")
        ->required();
    plotdata->add_option("--input", input, "trial or campaign output directory")->required();
    plotdata->add_option("--out", plot_out, "output directory")->envname("LANDER_OUT_DIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (trial->parsed()) return cmd_trial(trial_opts, pad_yaw_deg);
        if (campaign->parsed()) {
            if (!all_profiles && campaign_opts.profile_name.empty()) {
                std::fprintf(stderr, "error: campaign needs --profile <name> or --all\n");
                return 1;
            }
            return cmd_campaign(campaign_opts, all_profiles, serial);
        }
        if (plotdata->parsed()) return cmd_plotdata(figure, input, plot_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
