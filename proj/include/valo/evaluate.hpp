#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "valo/scoring.hpp"

namespace valo {

struct GtBox {
    std::int64_t frame = 0;
    int x = 0, y = 0, w = 0, h = 0;

    bool operator==(const GtBox&) const = default;
};

// Annotated anomalous regions of one object, grouped over time.
struct GroundTruthTrack {
    int track_id = 0;
    std::vector<GtBox> boxes;
};

// CSV lines `track_id,frame,x,y,w,h`; an optional header line is skipped.
std::vector<GroundTruthTrack> load_tracks_csv(const std::string& path);
void save_tracks_csv(const std::string& path, const std::vector<GroundTruthTrack>& tracks);

// Connected pixel region of a thresholded score map (8-connectivity).
struct DetectionRegion {
    std::int64_t frame = 0;
    std::vector<std::uint32_t> pixels;  // linear y*width+x indices, sorted
    double score = 0.0;                 // max pixel score inside
};

// Regions of map >= tau on every frame, in (frame, discovery) order.
std::vector<DetectionRegion> extract_detections(const ScoreMap& map, double tau);

// Distinct positive scores, descending; capped at `max_thresholds` quantiles.
std::vector<double> threshold_sweep(const ScoreMap& map, std::size_t max_thresholds = 1000);

// Intersection-over-union between a detection's pixel set and a ground-truth
// box clamped to the frame.
double region_box_iou(const DetectionRegion& region, const GtBox& box, int height, int width);

struct EvalParams {
    double iou_min = 0.1;
    double track_fraction = 0.1;
    std::size_t max_thresholds = 1000;
};

struct CurvePoint {
    double tau = 0.0;
    double fppf = 0.0;
    double tpr = 0.0;
};

struct MetricsReport {
    double rbdc_auc = 0.0;
    double tbdc_auc = 0.0;
    double frame_auc = 0.0;
    std::vector<CurvePoint> rbdc_curve;  // tau descending
    std::vector<CurvePoint> tbdc_curve;
    EvalParams params;
    std::int64_t frames = 0;
    std::size_t gt_boxes = 0;
    std::size_t gt_tracks = 0;
    std::size_t thresholds = 0;
};

// Region-based criterion: fraction of GT boxes matched (IoU >= iou_min)
// versus false-positive regions per frame, AUC over FPPF in [0,1].
double rbdc_auc(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks, const EvalParams& params = {});

// Track-based criterion: a track counts detected at tau when at least
// track_fraction of its boxes are detected (inclusive boundary).
double tbdc_auc(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks, const EvalParams& params = {});

// Standard ROC AUC with tied scores handled by the rank statistic.
double frame_auc(const std::vector<double>& frame_scores, const std::vector<int>& frame_labels);

// All three criteria plus the full curves in one pass.
MetricsReport evaluate_metrics(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks,
                               const EvalParams& params = {});

std::string render_metrics_report(const MetricsReport& report, const std::string& config_echo = "");
std::string metrics_report_json(const MetricsReport& report, const std::string& config_echo = "");

}  // namespace valo
