#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "valo/model.hpp"

namespace valo {

// Anomaly score of one test volume: minimum feature distance to the
// region's exemplars. nearest == -1 means the region has no exemplars and
// the score is the sentinel.
struct VolumeScore {
    std::uint32_t region_index = 0;
    std::int64_t frame_start = 0;
    double score = 0.0;
    std::int32_t nearest = -1;

    bool operator==(const VolumeScore&) const = default;
};

// A region that was never observed in the nominal video scores as maximally
// anomalous; the sentinel sits above any plausible normalized distance.
inline constexpr double kDefaultSentinelScore = 10.0;

VolumeScore score_volume(const FeatureVector& feature, const RegionModel& rm, const Normalizers& z,
                         double sentinel = kDefaultSentinelScore);

// Per-pixel, per-frame anomaly scores. Each pixel holds the max score over
// all volumes containing it.
struct ScoreMap {
    int height = 0;
    int width = 0;
    std::int64_t frame_begin = 0;
    std::int64_t frame_count = 0;
    std::vector<float> data;  // frame-major, then row-major

    ScoreMap() = default;
    ScoreMap(int h, int w, std::int64_t begin, std::int64_t count)
        : height(h), width(w), frame_begin(begin), frame_count(count),
          data(static_cast<std::size_t>(count) * h * w, 0.f) {}

    float& at(std::int64_t frame, int y, int x) {
        return data[(static_cast<std::size_t>(frame - frame_begin) * height + y) * width + x];
    }
    float at(std::int64_t frame, int y, int x) const {
        return data[(static_cast<std::size_t>(frame - frame_begin) * height + y) * width + x];
    }
    bool operator==(const ScoreMap&) const = default;
};

// Writes max(old, vs.score) into every in-frame pixel of every frame of the
// volume; the zero-padded overhang is ignored.
void accumulate(ScoreMap& map, const VolumeScore& vs, const RegionGrid& grid, int t);

// True iff the two volumes are near-identical: zero-mean NCC >= ncc_min, or
// both constant with equal value.
bool volume_unchanged(const VideoVolume& cur, const VideoVolume& prev, double ncc_min = 0.995);

struct DetectParams {
    bool skip_unchanged = true;
    double ncc_min = 0.995;
    double sentinel = kDefaultSentinelScore;
    unsigned workers = 0;
};

struct DetectResult {
    ScoreMap map;
    std::vector<VolumeScore> scores;       // stream order
    std::uint64_t features_computed = 0;   // provider invocations
    std::uint64_t volumes_total = 0;
};

// Scores every volume of a test video against the model. With skipping
// enabled, a volume unchanged from the previous temporal window reuses that
// window's score verbatim without recomputing its feature.
DetectResult detect(const FrameSequence& seq,
                    const std::function<FeatureVector(std::uint32_t region, std::int64_t frame_start,
                                                      const VideoVolume& volume)>& provider,
                    const SceneModel& model, const DetectParams& params = {});

// On-disk layout: <dir>/index.json plus one raw little-endian float32 grid
// per frame (frame_000000.f32, ...).
void save_score_map(const std::string& dir, const ScoreMap& map, const std::string& config_echo = "");
ScoreMap load_score_map(const std::string& dir);

void save_volume_scores_csv(const std::string& path, const std::vector<VolumeScore>& scores);
std::vector<VolumeScore> load_volume_scores_csv(const std::string& path);

// 8-bit grayscale heatmap PNGs, scores clamped at `scale`.
void write_heatmaps(const std::string& dir, const ScoreMap& map, double scale);

}  // namespace valo
