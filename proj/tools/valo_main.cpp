// valo: exemplar-based video anomaly localization CLI.
//
// Subcommands: calibrate | build | update | detect | eval | explain.
// VALO_LOG=debug|info|warn|error controls log verbosity.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "valo/common.hpp"
#include "valo/config.hpp"
#include "valo/evaluate.hpp"
#include "valo/explain.hpp"
#include "valo/pipeline.hpp"

namespace fs = std::filesystem;
using namespace valo;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> videos;
    std::vector<std::string> flows;
    std::vector<std::string> features;
    bool estimate_flow = false;

    // config overrides; only applied when set on the command line
    std::optional<int> region_size, temporal_extent;
    std::optional<double> th, th_mot, th_bkg, ncc_min, sentinel, decision_threshold, heatmap_scale;
    std::optional<std::uint64_t> seed, pair_cap;
    std::optional<unsigned> workers;
    std::optional<double> iou_min, track_fraction;
    std::optional<std::uint64_t> max_thresholds;
};

void add_input_options(CLI::App* cmd, CommonArgs& args, bool video_required) {
    auto* v = cmd->add_option("--video", args.videos, "frame directory (repeatable)");
    if (video_required) v->required();
    cmd->add_option("--flow", args.flows, ".flo directory, paired with --video by order");
    cmd->add_option("--features", args.features, "EVF1 feature file, paired with --video by order");
    cmd->add_flag("--estimate-flow", args.estimate_flow, "estimate flow in-process instead of reading .flo files");
}

void add_config_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "TOML config file");
    cmd->add_option("--region-size", args.region_size, "region size h = w (even)");
    cmd->add_option("--t", args.temporal_extent, "temporal extent (frames per volume)");
    cmd->add_option("--th", args.th, "exemplar selection threshold");
    cmd->add_option("--th-mot", args.th_mot, "moving-pixel flow magnitude threshold");
    cmd->add_option("--th-bkg", args.th_bkg, "background volume stationary fraction threshold");
    cmd->add_option("--ncc-min", args.ncc_min, "unchanged-volume NCC threshold");
    cmd->add_option("--sentinel", args.sentinel, "score for never-observed regions");
    cmd->add_option("--decision-threshold", args.decision_threshold, "anomaly decision threshold");
    cmd->add_option("--heatmap-scale", args.heatmap_scale, "score mapped to full heatmap intensity");
    cmd->add_option("--seed", args.seed, "calibration sampling seed");
    cmd->add_option("--pair-cap", args.pair_cap, "all pairs below this count, sampled above");
    cmd->add_option("--workers", args.workers, "worker threads (0 = cores)");
    cmd->add_option("--iou-min", args.iou_min, "detection/GT IoU threshold");
    cmd->add_option("--track-fraction", args.track_fraction, "fraction of track boxes for a track detection");
    cmd->add_option("--max-thresholds", args.max_thresholds, "threshold sweep cap");
}

Config effective_config(const CommonArgs& args, bool skip_flag_set = false, bool skip_value = true) {
    Config cfg = args.config_path.empty() ? Config{} : load_config(args.config_path);
    if (args.region_size) cfg.region_size = *args.region_size;
    if (args.temporal_extent) cfg.temporal_extent = *args.temporal_extent;
    if (args.th) cfg.exemplar_threshold = static_cast<float>(*args.th);
    if (args.th_mot) cfg.th_mot = *args.th_mot;
    if (args.th_bkg) cfg.th_bkg = *args.th_bkg;
    if (args.ncc_min) cfg.ncc_min = *args.ncc_min;
    if (args.sentinel) cfg.sentinel_score = *args.sentinel;
    if (args.decision_threshold) cfg.decision_threshold = *args.decision_threshold;
    if (args.heatmap_scale) cfg.heatmap_scale = *args.heatmap_scale;
    if (args.seed) cfg.seed = *args.seed;
    if (args.pair_cap) cfg.pair_cap = *args.pair_cap;
    if (args.workers) cfg.workers = *args.workers;
    if (args.iou_min) cfg.iou_min = *args.iou_min;
    if (args.track_fraction) cfg.track_fraction = *args.track_fraction;
    if (args.max_thresholds) cfg.max_thresholds = *args.max_thresholds;
    if (skip_flag_set) cfg.skip_unchanged = skip_value;
    cfg.validate();
    return cfg;
}

std::vector<VideoInput> video_inputs(const CommonArgs& args) {
    if (args.videos.empty()) throw ConfigError("at least one --video is required");
    if (!args.flows.empty() && args.flows.size() != args.videos.size())
        throw ConfigError("--flow count must match --video count");
    if (!args.features.empty() && args.features.size() != args.videos.size())
        throw ConfigError("--features count must match --video count");
    if (!args.features.empty() && (!args.flows.empty() || args.estimate_flow))
        throw ConfigError("--features replaces flow input; do not combine with --flow/--estimate-flow");

    std::vector<VideoInput> inputs;
    for (std::size_t i = 0; i < args.videos.size(); ++i) {
        VideoInput in;
        in.frames_dir = args.videos[i];
        if (!args.flows.empty()) in.flow_dir = args.flows[i];
        if (!args.features.empty()) in.feature_file = args.features[i];
        in.estimate_flow = args.estimate_flow;
        inputs.push_back(std::move(in));
    }
    return inputs;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw valo::Error("cannot open for writing: " + path);
    out << text;
}

void save_normalizers_toml(const std::string& path, const Normalizers& z) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "[normalizers]\nz_app = %.9g\nz_ang = %.9g\nz_mag = %.9g\nz_bkg = %.9g\n",
                  static_cast<double>(z.z_app), static_cast<double>(z.z_ang), static_cast<double>(z.z_mag),
                  static_cast<double>(z.z_bkg));
    write_text_file(path, buf);
}

Normalizers load_normalizers_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open normalizers file: " + path);
    Normalizers z;
    bool in_section = false, seen = false;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line == "[normalizers]") {
            in_section = true;
            continue;
        }
        if (!line.empty() && line.front() == '[') {
            in_section = false;
            continue;
        }
        if (!in_section) continue;
        float v = 0.f;
        char key[16];
        if (std::sscanf(line.c_str(), "%15[a-z_] = %f", key, &v) != 2)
            throw ConfigError("malformed normalizers line in " + path + ": " + line);
        const std::string key_name = key;
        if (key_name == "z_app") z.z_app = v;
        else if (key_name == "z_ang") z.z_ang = v;
        else if (key_name == "z_mag") z.z_mag = v;
        else if (key_name == "z_bkg") z.z_bkg = v;
        else throw ConfigError("unknown normalizer '" + key_name + "' in " + path);
        seen = true;
    }
    if (!seen) throw ConfigError("no [normalizers] section found in " + path);
    return z;
}

void print_build_summary(const SceneModel& model) {
    std::vector<std::size_t> counts;
    counts.reserve(model.regions.size());
    for (const auto& r : model.regions) counts.push_back(r.exemplars.size());
    std::vector<std::size_t> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    auto pct = [&](double p) { return sorted.empty() ? 0 : sorted[static_cast<std::size_t>(p * (sorted.size() - 1))]; };
    std::printf("regions: %zu\n", counts.size());
    std::printf("exemplars: %zu total (per region: min %zu, p50 %zu, p90 %zu, max %zu)\n", model.exemplar_count(),
                sorted.empty() ? 0 : sorted.front(), pct(0.5), pct(0.9), sorted.empty() ? 0 : sorted.back());
    std::printf("normalizers: z_app=%.6g z_ang=%.6g z_mag=%.6g z_bkg=%.6g\n", static_cast<double>(model.z.z_app),
                static_cast<double>(model.z.z_ang), static_cast<double>(model.z.z_mag),
                static_cast<double>(model.z.z_bkg));
}

// ----------------------------- subcommands ----------------------------------

int run_calibrate(const CommonArgs& args, const std::string& out_path) {
    Config cfg = effective_config(args);

    if (args.videos.empty() && args.features.empty())
        throw ConfigError("calibrate needs --video directories or --features files");

    std::vector<FeatureVector> all;
    if (args.videos.empty() && !args.features.empty()) {
        // calibrate straight from feature files, no video needed
        for (const auto& path : args.features) {
            FeatureTable table = load_feature_file(path);
            for (const auto& [key, rec] : table.records) all.push_back(assemble_feature(rec));
        }
    } else {
        auto inputs = video_inputs(args);
        FeatureSource source = input_source(inputs);
        RegionGrid grid;
        bool grid_ready = false;
        for (const auto& in : inputs) {
            LoadedVideo video = load_video(in, cfg);
            if (!grid_ready) {
                grid = build_region_grid(video.seq.height(), video.seq.width(), cfg.region_size, cfg.region_size);
                grid_ready = true;
            }
            auto features = collect_features(video, grid, cfg.temporal_extent, FlowThresholds{cfg.th_mot, cfg.th_bkg},
                                             source, cfg.workers);
            all.insert(all.end(), std::make_move_iterator(features.begin()), std::make_move_iterator(features.end()));
        }
    }
    Normalizers z = calibrate_normalizers(all, CalibrationParams{static_cast<std::size_t>(cfg.pair_cap), cfg.seed});
    std::printf("calibrated on %zu features:\n", all.size());
    std::printf("z_app = %.9g\nz_ang = %.9g\nz_mag = %.9g\nz_bkg = %.9g\n", static_cast<double>(z.z_app),
                static_cast<double>(z.z_ang), static_cast<double>(z.z_mag), static_cast<double>(z.z_bkg));
    if (!out_path.empty()) save_normalizers_toml(out_path, z);
    return 0;
}

int run_build(const CommonArgs& args, const std::string& normalizers_path, const std::string& out_path) {
    Config cfg = effective_config(args);
    std::optional<Normalizers> z;
    if (!normalizers_path.empty()) z = load_normalizers_toml(normalizers_path);
    SceneModel model = build_scene_model(video_inputs(args), cfg, z);
    save_model(out_path, model);
    print_build_summary(model);
    std::printf("model written to %s\n", out_path.c_str());
    return 0;
}

int run_update(const CommonArgs& args, const std::string& model_path, const std::string& out_path) {
    Config cfg = effective_config(args);
    SceneModel model = load_model(model_path);
    auto inputs = video_inputs(args);
    for (const auto& in : inputs) update_scene_model(model, in, cfg);
    save_model(out_path.empty() ? model_path : out_path, model);
    print_build_summary(model);
    return 0;
}

int run_detect(const CommonArgs& args, const std::string& model_path, const std::string& out_dir, bool skip_set,
               bool skip_value, bool heatmaps) {
    Config cfg = effective_config(args, skip_set, skip_value);
    SceneModel model = load_model(model_path);
    auto inputs = video_inputs(args);
    if (inputs.size() != 1) throw ConfigError("detect expects exactly one test video");

    DetectResult result = detect_video(inputs.front(), model, cfg);
    save_score_map(out_dir, result.map, config_echo(cfg));
    save_volume_scores_csv((fs::path(out_dir) / "volume_scores.csv").string(), result.scores);
    if (heatmaps) write_heatmaps((fs::path(out_dir) / "heatmaps").string(), result.map, cfg.heatmap_scale);

    double max_score = 0.0;
    for (const auto& vs : result.scores) max_score = std::max(max_score, vs.score);
    std::size_t above = 0;
    for (const auto& vs : result.scores)
        if (vs.score > cfg.decision_threshold) ++above;
    std::printf("volumes: %llu (features computed: %llu)\n", static_cast<unsigned long long>(result.volumes_total),
                static_cast<unsigned long long>(result.features_computed));
    std::printf("max volume score: %.4f; %zu volume(s) above decision threshold %.2f\n", max_score, above,
                cfg.decision_threshold);
    std::printf("score map written to %s\n", out_dir.c_str());
    return 0;
}

int run_eval(const CommonArgs& args, const std::string& scores_dir, const std::string& gt_path,
             const std::string& out_path, const std::string& json_path) {
    Config cfg = effective_config(args);
    ScoreMap map = load_score_map(scores_dir);
    auto tracks = load_tracks_csv(gt_path);
    EvalParams params;
    params.iou_min = cfg.iou_min;
    params.track_fraction = cfg.track_fraction;
    params.max_thresholds = static_cast<std::size_t>(cfg.max_thresholds);
    MetricsReport report = evaluate_metrics(map, tracks, params);
    std::string text = render_metrics_report(report, config_echo(cfg));
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_text_file(out_path, text);
    if (!json_path.empty()) write_text_file(json_path, metrics_report_json(report, config_echo(cfg)));
    return 0;
}

int run_explain(const CommonArgs& args, const std::string& model_path, const std::string& head_path,
                std::int64_t region, std::int64_t frame, bool summary, std::int64_t top_k,
                const std::string& json_path, const std::string& png_path) {
    Config cfg = effective_config(args);
    SceneModel model = load_model(model_path);
    if (region < 0 || region >= model.grid.region_count())
        throw ConfigError("region " + std::to_string(region) + " outside the grid (0.." +
                          std::to_string(model.grid.region_count() - 1) + ")");

    AttributeHead head;
    const AttributeHead* head_ptr = nullptr;
    if (!head_path.empty()) {
        head = load_attribute_head(head_path);
        head_ptr = &head;
    }
    const RegionModel& rm = model.regions[static_cast<std::size_t>(region)];

    if (summary) {
        RegionSummary s = render_region_summary(rm, model.source, head_ptr, static_cast<std::size_t>(top_k));
        std::fputs(region_summary_text(s, model.video_ids).c_str(), stdout);
        return 0;
    }

    if (args.videos.empty()) throw ConfigError("explain needs --video (or --summary for the region overview)");
    auto inputs = video_inputs(args);
    if (inputs.size() != 1) throw ConfigError("explain expects exactly one test video");
    if (frame < 0) throw ConfigError("--frame is required for a volume explanation");

    LoadedVideo video = load_video(inputs.front(), cfg, model.source == FeatureSource::Builtin);
    std::int64_t frame_start = frame / model.t * model.t;
    FeatureVector feature = compute_volume_feature(video, model, static_cast<std::uint32_t>(region), frame_start);
    Explanation e = explain_score(feature, rm, model.z, model.source, head_ptr, cfg.decision_threshold,
                                  cfg.sentinel_score);
    std::fputs(explanation_text(e, model.video_ids).c_str(), stdout);
    if (!json_path.empty()) write_text_file(json_path, explanation_json(e, model.video_ids, config_echo(cfg)));
    if (!png_path.empty()) write_panel_png(png_path, e.test_panel);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exemplar-based video anomaly localization"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* calibrate = app.add_subcommand("calibrate", "compute distance normalizers from nominal video or features");
    add_input_options(calibrate, args, false);
    add_config_options(calibrate, args);
    std::string calibrate_out;
    calibrate->add_option("--out", calibrate_out, "normalizers TOML file to write");

    auto* build = app.add_subcommand("build", "build a scene model from nominal video");
    add_input_options(build, args, true);
    add_config_options(build, args);
    std::string build_normalizers, build_out;
    build->add_option("--normalizers", build_normalizers, "use these normalizers instead of calibrating");
    build->add_option("--out", build_out, "model file to write")->required();

    auto* update = app.add_subcommand("update", "extend a scene model with new nominal video");
    add_input_options(update, args, true);
    add_config_options(update, args);
    std::string update_model, update_out;
    update->add_option("--model", update_model, "existing model file")->required();
    update->add_option("--out", update_out, "output model file (default: overwrite --model)");

    auto* detect = app.add_subcommand("detect", "score a test video against a scene model");
    add_input_options(detect, args, true);
    add_config_options(detect, args);
    std::string detect_model, detect_out;
    bool detect_skip = false, detect_no_skip = false, detect_heatmaps = false;
    detect->add_option("--model", detect_model, "model file")->required();
    detect->add_option("--out", detect_out, "output directory")->required();
    detect->add_flag("--skip", detect_skip, "enable the unchanged-volume skip");
    detect->add_flag("--no-skip", detect_no_skip, "disable the unchanged-volume skip");
    detect->add_flag("--heatmaps", detect_heatmaps, "write 8-bit heatmap PNGs");

    auto* eval = app.add_subcommand("eval", "compute RBDC/TBDC/frame-AUC from score maps and ground truth");
    add_config_options(eval, args);
    std::string eval_scores, eval_gt, eval_out, eval_json;
    eval->add_option("--scores", eval_scores, "score map directory")->required();
    eval->add_option("--gt", eval_gt, "ground-truth CSV (track_id,frame,x,y,w,h)")->required();
    eval->add_option("--out", eval_out, "write the text report here");
    eval->add_option("--json", eval_json, "write the JSON report here");

    auto* explain = app.add_subcommand("explain", "explain a volume's anomaly decision or summarize a region");
    add_input_options(explain, args, false);
    add_config_options(explain, args);
    std::string explain_model, explain_head, explain_json_path, explain_png;
    std::int64_t explain_region = -1, explain_frame = -1, explain_top_k = 10;
    bool explain_summary = false;
    explain->add_option("--model", explain_model, "model file")->required();
    explain->add_option("--region", explain_region, "region index")->required();
    explain->add_option("--frame", explain_frame, "any frame of the volume to explain");
    explain->add_option("--head", explain_head, "attribute head file (EVH1) for imported features");
    explain->add_flag("--summary", explain_summary, "print the region's exemplar summary");
    explain->add_option("--top-k", explain_top_k, "exemplar panels in the summary");
    explain->add_option("--json", explain_json_path, "write the machine-readable record here");
    explain->add_option("--png", explain_png, "write the test panel bar chart here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(calibrate)) return run_calibrate(args, calibrate_out);
        if (app.got_subcommand(build)) return run_build(args, build_normalizers, build_out);
        if (app.got_subcommand(update)) return run_update(args, update_model, update_out);
        if (app.got_subcommand(detect)) {
            if (detect_skip && detect_no_skip) throw ConfigError("--skip and --no-skip are mutually exclusive");
            bool skip_set = detect_skip || detect_no_skip;
            return run_detect(args, detect_model, detect_out, skip_set, detect_skip, detect_heatmaps);
        }
        if (app.got_subcommand(eval)) return run_eval(args, eval_scores, eval_gt, eval_out, eval_json);
        if (app.got_subcommand(explain))
            return run_explain(args, explain_model, explain_head, explain_region, explain_frame, explain_summary,
                               explain_top_k, explain_json_path, explain_png);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
