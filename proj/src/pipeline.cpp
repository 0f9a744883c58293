#include "valo/pipeline.hpp"

#include <filesystem>

#include "valo/common.hpp"

namespace fs = std::filesystem;

namespace valo {

LoadedVideo load_video(const VideoInput& input, const Config& cfg, bool need_motion_source) {
    LoadedVideo video;
    video.id = fs::path(input.frames_dir).filename().string();
    if (video.id.empty()) video.id = input.frames_dir;
    video.seq = load_frame_sequence(input.frames_dir);

    if (!input.feature_file.empty()) {
        video.features = load_feature_file(input.feature_file);
        return video;
    }
    if (!need_motion_source) return video;

    if (input.estimate_flow) {
        video.flows.reserve(video.seq.size() - 1);
        for (std::size_t i = 0; i + 1 < video.seq.size(); ++i)
            video.flows.push_back(estimate_flow(video.seq.frames[i], video.seq.frames[i + 1], cfg.flow));
    } else {
        if (input.flow_dir.empty())
            throw ConfigError("video " + video.id + " needs a flow directory, a feature file, or --estimate-flow");
        video.flows = load_flow_sequence(input.flow_dir, video.seq.size() - 1);
        for (std::size_t i = 0; i < video.flows.size(); ++i) {
            if (video.flows[i].height != video.seq.height() || video.flows[i].width != video.seq.width())
                throw IngestError("flow field for frame pair " + std::to_string(i) + "->" + std::to_string(i + 1) +
                                  " has dims " + std::to_string(video.flows[i].height) + "x" +
                                  std::to_string(video.flows[i].width) + ", frames are " +
                                  std::to_string(video.seq.height()) + "x" + std::to_string(video.seq.width()));
        }
    }
    return video;
}

FeatureProvider builtin_provider(const LoadedVideo& video, const RegionGrid& grid, int t, const FlowThresholds& th) {
    if (t < 2) throw ConfigError("builtin motion attributes need a temporal extent of at least 2 frames");
    const std::vector<FlowField>* flows = &video.flows;
    return [flows, grid, t, th](std::uint32_t region, std::int64_t frame_start,
                                const VideoVolume& vol) -> FeatureVector {
        if (frame_start + t - 1 > static_cast<std::int64_t>(flows->size()))
            throw IngestError("flow for frame pair " + std::to_string(frame_start + t - 2) + "->" +
                              std::to_string(frame_start + t - 1) + " missing");
        std::vector<FlowField> cropped;
        cropped.reserve(static_cast<std::size_t>(t) - 1);
        for (std::int64_t i = frame_start; i < frame_start + t - 1; ++i)
            cropped.push_back(crop_flow((*flows)[static_cast<std::size_t>(i)], grid, region));
        MotionAttributes motion = compute_motion_attributes(cropped, th);
        return assemble_feature(builtin_appearance(vol), motion);
    };
}

FeatureProvider imported_provider(const LoadedVideo& video, const ComponentDims& expected_dims) {
    if (!video.features) throw ConfigError("video " + video.id + " has no feature file loaded");
    const FeatureTable* table = &*video.features;
    if (!(table->dims == expected_dims))
        throw IngestError("feature file dims do not match the model's declared dims for video " + video.id);
    return [table](std::uint32_t region, std::int64_t frame_start, const VideoVolume&) -> FeatureVector {
        auto it = table->records.find(VolumeKey{region, static_cast<std::uint64_t>(frame_start)});
        if (it == table->records.end())
            throw IngestError("feature file has no record for volume (region " + std::to_string(region) + ", frame " +
                              std::to_string(frame_start) + ")");
        return assemble_feature(it->second);
    };
}

FeatureProvider make_provider(const LoadedVideo& video, const RegionGrid& grid, int t, const FlowThresholds& th,
                              const ComponentDims& expected_dims, FeatureSource source) {
    if (source == FeatureSource::Imported) return imported_provider(video, expected_dims);
    return builtin_provider(video, grid, t, th);
}

std::vector<FeatureVector> collect_features(const LoadedVideo& video, const RegionGrid& grid, int t,
                                            const FlowThresholds& th, FeatureSource source, unsigned workers) {
    ComponentDims dims;
    if (source == FeatureSource::Imported) {
        if (!video.features) throw ConfigError("video " + video.id + " has no feature file loaded");
        dims = video.features->dims;
    } else {
        dims = ComponentDims{kBuiltinAppearanceDim, kDirectionBins, kDirectionBins, 1};
    }
    FeatureProvider provider = make_provider(video, grid, t, th, dims, source);

    const std::size_t windows = temporal_window_count(video.seq.size(), t);
    if (windows == 0) throw IngestError("video " + video.id + " has fewer frames than one temporal window");
    const std::size_t n_regions = static_cast<std::size_t>(grid.region_count());

    std::vector<FeatureVector> features(windows * n_regions);
    parallel_for(windows * n_regions, workers, [&](std::size_t i) {
        const std::size_t wnd = i / n_regions;
        const std::uint32_t region = static_cast<std::uint32_t>(i % n_regions);
        const std::int64_t fs = static_cast<std::int64_t>(wnd) * t;
        VideoVolume vol = extract_volume(video.seq, grid, region, fs, t);
        features[i] = provider(region, fs, vol);
    });
    return features;
}

FeatureSource input_source(const std::vector<VideoInput>& inputs) {
    if (inputs.empty()) throw ConfigError("at least one video is required");
    bool imported = !inputs.front().feature_file.empty();
    for (const auto& in : inputs)
        if ((!in.feature_file.empty()) != imported)
            throw ConfigError("either all videos or none must carry feature files");
    return imported ? FeatureSource::Imported : FeatureSource::Builtin;
}

SceneModel build_scene_model(const std::vector<VideoInput>& nominal, const Config& cfg,
                             std::optional<Normalizers> fixed_z) {
    cfg.validate();
    const FeatureSource source = input_source(nominal);

    std::vector<LoadedVideo> videos;
    videos.reserve(nominal.size());
    for (const auto& in : nominal) videos.push_back(load_video(in, cfg));

    const int frame_h = videos.front().seq.height();
    const int frame_w = videos.front().seq.width();
    for (const auto& v : videos)
        if (v.seq.height() != frame_h || v.seq.width() != frame_w)
            throw IngestError("nominal video " + v.id + " is " + std::to_string(v.seq.height()) + "x" +
                              std::to_string(v.seq.width()) + ", expected " + std::to_string(frame_h) + "x" +
                              std::to_string(frame_w));

    const RegionGrid grid = build_region_grid(frame_h, frame_w, cfg.region_size, cfg.region_size);
    const int t = cfg.temporal_extent;
    const FlowThresholds flow_th{cfg.th_mot, cfg.th_bkg};

    // one feature pass per video, reused for calibration and selection
    std::vector<std::vector<FeatureVector>> features;
    features.reserve(videos.size());
    for (const auto& v : videos) features.push_back(collect_features(v, grid, t, flow_th, source, cfg.workers));

    ComponentDims dims = features.front().empty() ? ComponentDims{} : features.front().front().dims();

    Normalizers z;
    if (fixed_z) {
        z = *fixed_z;
    } else {
        std::vector<FeatureVector> all;
        for (const auto& fv : features) all.insert(all.end(), fv.begin(), fv.end());
        z = calibrate_normalizers(all, CalibrationParams{static_cast<std::size_t>(cfg.pair_cap), cfg.seed});
        log_info("calibrated normalizers: z_app=" + std::to_string(z.z_app) + " z_ang=" + std::to_string(z.z_ang) +
                 " z_mag=" + std::to_string(z.z_mag) + " z_bkg=" + std::to_string(z.z_bkg));
    }

    SceneModel model = make_scene_model(grid, static_cast<std::uint32_t>(t), cfg.exemplar_threshold, z, dims, source,
                                        flow_th);
    model.config_echo = config_echo(cfg);

    const std::size_t n_regions = static_cast<std::size_t>(grid.region_count());
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const auto& cached = features[v];
        append_video(
            model, videos[v].id, cached.size() / n_regions,
            [&](std::uint32_t region, std::int64_t frame_start) {
                return cached[static_cast<std::size_t>(frame_start / t) * n_regions + region];
            },
            cfg.workers);
    }
    return model;
}

void update_scene_model(SceneModel& model, const VideoInput& input, const Config& cfg) {
    LoadedVideo video = load_video(input, cfg, model.source == FeatureSource::Builtin);
    if (video.seq.height() != model.grid.frame_h || video.seq.width() != model.grid.frame_w)
        throw IngestError("video " + video.id + " is " + std::to_string(video.seq.height()) + "x" +
                          std::to_string(video.seq.width()) + ", the model grid expects " +
                          std::to_string(model.grid.frame_h) + "x" + std::to_string(model.grid.frame_w));
    if ((model.source == FeatureSource::Imported) != static_cast<bool>(video.features))
        throw ConfigError("feature source of the update video does not match the model (builtin vs imported)");

    FeatureProvider provider =
        make_provider(video, model.grid, static_cast<int>(model.t), model.flow_th, model.dims, model.source);
    const std::size_t windows = temporal_window_count(video.seq.size(), static_cast<int>(model.t));
    if (windows == 0) throw IngestError("video " + video.id + " has fewer frames than one temporal window");

    append_video(
        model, video.id, windows,
        [&](std::uint32_t region, std::int64_t frame_start) {
            VideoVolume vol = extract_volume(video.seq, model.grid, region, frame_start, static_cast<int>(model.t));
            return provider(region, frame_start, vol);
        },
        cfg.workers);
}

DetectResult detect_video(const VideoInput& input, const SceneModel& model, const Config& cfg) {
    LoadedVideo video = load_video(input, cfg, model.source == FeatureSource::Builtin);
    if ((model.source == FeatureSource::Imported) != static_cast<bool>(video.features))
        throw ConfigError("feature source of the test video does not match the model (builtin vs imported)");
    FeatureProvider provider =
        make_provider(video, model.grid, static_cast<int>(model.t), model.flow_th, model.dims, model.source);

    DetectParams params;
    params.skip_unchanged = cfg.skip_unchanged;
    params.ncc_min = cfg.ncc_min;
    params.sentinel = cfg.sentinel_score;
    params.workers = cfg.workers;
    return detect(video.seq, provider, model, params);
}

FeatureVector compute_volume_feature(const LoadedVideo& video, const SceneModel& model, std::uint32_t region_index,
                                     std::int64_t frame_start) {
    if (frame_start % model.t != 0)
        throw ConfigError("frame_start " + std::to_string(frame_start) + " is not aligned to the temporal stride " +
                          std::to_string(model.t));
    FeatureProvider provider =
        make_provider(video, model.grid, static_cast<int>(model.t), model.flow_th, model.dims, model.source);
    VideoVolume vol = extract_volume(video.seq, model.grid, region_index, frame_start, static_cast<int>(model.t));
    return provider(region_index, frame_start, vol);
}

}  // namespace valo
