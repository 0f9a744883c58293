#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "valo/config.hpp"
#include "valo/evaluate.hpp"
#include "valo/model.hpp"
#include "valo/scoring.hpp"

namespace valo {

// One video's worth of input. Flow comes from a .flo directory (file i maps
// frames i -> i+1), from the built-in estimator, or is absent when features
// are imported from a file.
struct VideoInput {
    std::string frames_dir;
    std::string flow_dir;      // .flo per consecutive frame pair
    std::string feature_file;  // EVF1; replaces builtin feature computation
    bool estimate_flow = false;
};

struct LoadedVideo {
    std::string id;  // directory name
    FrameSequence seq;
    std::vector<FlowField> flows;          // empty for imported features
    std::optional<FeatureTable> features;  // set for imported features
};

LoadedVideo load_video(const VideoInput& input, const Config& cfg, bool need_motion_source = true);

using FeatureProvider =
    std::function<FeatureVector(std::uint32_t region, std::int64_t frame_start, const VideoVolume& volume)>;

// Analytic path: motion attributes from the cropped flow fields plus the
// builtin appearance descriptor.
FeatureProvider builtin_provider(const LoadedVideo& video, const RegionGrid& grid, int t, const FlowThresholds& th);

// Import path: looks volumes up by (region_index, frame_start); a missing
// key or a dim mismatch against the model is an error.
FeatureProvider imported_provider(const LoadedVideo& video, const ComponentDims& expected_dims);

FeatureProvider make_provider(const LoadedVideo& video, const RegionGrid& grid, int t, const FlowThresholds& th,
                              const ComponentDims& expected_dims, FeatureSource source);

// All volume features of one video in stream order (windows outer, regions
// inner); shared by calibration and model building.
std::vector<FeatureVector> collect_features(const LoadedVideo& video, const RegionGrid& grid, int t,
                                            const FlowThresholds& th, FeatureSource source, unsigned workers);

FeatureSource input_source(const std::vector<VideoInput>& inputs);

// Builds the scene model from nominal videos. When `fixed_z` is empty the
// normalizers are calibrated on the nominal features themselves.
SceneModel build_scene_model(const std::vector<VideoInput>& nominal, const Config& cfg,
                             std::optional<Normalizers> fixed_z = {});

// Greedy continuation with new nominal video; equivalent to having appended
// the video to the original nominal stream.
void update_scene_model(SceneModel& model, const VideoInput& video, const Config& cfg);

// Scores a test video against the model.
DetectResult detect_video(const VideoInput& test, const SceneModel& model, const Config& cfg);

// Feature of a single volume of a test video (explain path).
FeatureVector compute_volume_feature(const LoadedVideo& video, const SceneModel& model, std::uint32_t region_index,
                                     std::int64_t frame_start);

}  // namespace valo
