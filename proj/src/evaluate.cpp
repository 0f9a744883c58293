#include "valo/evaluate.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "valo/common.hpp"

namespace valo {

std::vector<GroundTruthTrack> load_tracks_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open ground-truth file: " + path);
    std::map<int, GroundTruthTrack> by_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        int id, x, y, w, h;
        long long frame;
        if (std::sscanf(line.c_str(), "%d,%lld,%d,%d,%d,%d", &id, &frame, &x, &y, &w, &h) != 6) {
            if (line_no == 1) continue;  // header
            throw FormatError("malformed ground-truth line " + std::to_string(line_no) + " in " + path + ": " + line);
        }
        auto& track = by_id[id];
        track.track_id = id;
        track.boxes.push_back(GtBox{frame, x, y, w, h});
    }
    std::vector<GroundTruthTrack> out;
    out.reserve(by_id.size());
    for (auto& [id, track] : by_id) {
        std::sort(track.boxes.begin(), track.boxes.end(),
                  [](const GtBox& a, const GtBox& b) { return a.frame < b.frame; });
        out.push_back(std::move(track));
    }
    return out;
}

void save_tracks_csv(const std::string& path, const std::vector<GroundTruthTrack>& tracks) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "track_id,frame,x,y,w,h\n";
    for (const auto& track : tracks)
        for (const auto& b : track.boxes)
            out << track.track_id << ',' << b.frame << ',' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
}

std::vector<DetectionRegion> extract_detections(const ScoreMap& map, double tau) {
    std::vector<DetectionRegion> out;
    const int h = map.height, w = map.width;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(h) * w);
    std::vector<std::uint32_t> stack;

    for (std::int64_t f = map.frame_begin; f < map.frame_begin + map.frame_count; ++f) {
        std::fill(visited.begin(), visited.end(), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                std::uint32_t start = static_cast<std::uint32_t>(y) * w + x;
                if (visited[start] || map.at(f, y, x) < tau) continue;
                DetectionRegion region;
                region.frame = f;
                stack.assign(1, start);
                visited[start] = 1;
                while (!stack.empty()) {
                    std::uint32_t idx = stack.back();
                    stack.pop_back();
                    region.pixels.push_back(idx);
                    int cy = static_cast<int>(idx) / w;
                    int cx = static_cast<int>(idx) % w;
                    double s = map.at(f, cy, cx);
                    if (s > region.score) region.score = s;
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            if (dy == 0 && dx == 0) continue;
                            int ny = cy + dy, nx = cx + dx;
                            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                            std::uint32_t nidx = static_cast<std::uint32_t>(ny) * w + nx;
                            if (visited[nidx] || map.at(f, ny, nx) < tau) continue;
                            visited[nidx] = 1;
                            stack.push_back(nidx);
                        }
                    }
                }
                std::sort(region.pixels.begin(), region.pixels.end());
                out.push_back(std::move(region));
            }
        }
    }
    return out;
}

std::vector<double> threshold_sweep(const ScoreMap& map, std::size_t max_thresholds) {
    if (max_thresholds == 0) throw ConfigError("threshold cap must be positive");
    std::set<float> distinct;
    for (float v : map.data)
        if (v > 0.f) distinct.insert(v);
    std::vector<double> taus(distinct.begin(), distinct.end());
    if (taus.size() > max_thresholds) {
        // quantiles of the distinct values keep the sweep bounded
        std::vector<double> capped;
        capped.reserve(max_thresholds);
        if (max_thresholds == 1) {
            capped.push_back(taus.back());
        } else {
            for (std::size_t k = 0; k < max_thresholds; ++k)
                capped.push_back(taus[k * (taus.size() - 1) / (max_thresholds - 1)]);
            capped.erase(std::unique(capped.begin(), capped.end()), capped.end());
        }
        taus = std::move(capped);
    }
    std::reverse(taus.begin(), taus.end());  // descending
    return taus;
}

double region_box_iou(const DetectionRegion& region, const GtBox& box, int height, int width) {
    int x0 = std::max(box.x, 0), y0 = std::max(box.y, 0);
    int x1 = std::min(box.x + box.w, width), y1 = std::min(box.y + box.h, height);
    if (x0 >= x1 || y0 >= y1) return 0.0;
    std::size_t inter = 0;
    for (std::uint32_t idx : region.pixels) {
        int y = static_cast<int>(idx) / width;
        int x = static_cast<int>(idx) % width;
        if (x >= x0 && x < x1 && y >= y0 && y < y1) ++inter;
    }
    std::size_t box_area = static_cast<std::size_t>(x1 - x0) * (y1 - y0);
    std::size_t uni = region.pixels.size() + box_area - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct FlatBox {
    std::size_t track = 0;  // index into the evaluated track list
    GtBox box;
};

// Boxes that fall outside the map's frame span (e.g. the dropped trailing
// window) are unobservable and excluded from the criteria.
std::vector<FlatBox> observable_boxes(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks) {
    std::vector<FlatBox> flat;
    std::size_t dropped = 0;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
        for (const GtBox& b : tracks[ti].boxes) {
            int x0 = std::max(b.x, 0), y0 = std::max(b.y, 0);
            int x1 = std::min(b.x + b.w, map.width), y1 = std::min(b.y + b.h, map.height);
            bool in_time = b.frame >= map.frame_begin && b.frame < map.frame_begin + map.frame_count;
            if (!in_time || x0 >= x1 || y0 >= y1) {
                ++dropped;
                continue;
            }
            flat.push_back(FlatBox{ti, b});
        }
    }
    if (dropped > 0)
        log_warn(std::to_string(dropped) + " ground-truth boxes fall outside the score map and are ignored");
    return flat;
}

// Per-threshold matching shared by RBDC and TBDC: which GT boxes are
// detected, and how many detections match no GT box at all.
struct TauMatch {
    std::vector<std::uint8_t> box_detected;  // parallel to the flat box list
    std::size_t false_positives = 0;
};

TauMatch match_at_tau(const ScoreMap& map, const std::vector<DetectionRegion>& detections,
                      const std::vector<FlatBox>& boxes, double iou_min) {
    TauMatch m;
    m.box_detected.assign(boxes.size(), 0);
    std::vector<std::uint8_t> det_matched(detections.size(), 0);
    for (std::size_t d = 0; d < detections.size(); ++d) {
        const DetectionRegion& region = detections[d];
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            if (boxes[b].box.frame != region.frame) continue;
            if (region_box_iou(region, boxes[b].box, map.height, map.width) >= iou_min) {
                m.box_detected[b] = 1;
                det_matched[d] = 1;
            }
        }
    }
    for (std::size_t d = 0; d < detections.size(); ++d)
        if (!det_matched[d]) ++m.false_positives;
    return m;
}

// AUC over FPPF in [0,1]: points deduped by FPPF keeping the best TPR,
// anchored at (0,0), trapezoid up to FPPF=1, constant extension past the
// final point.
double auc_fppf(std::vector<CurvePoint> points) {
    std::vector<std::pair<double, double>> xy;
    xy.emplace_back(0.0, 0.0);
    for (const auto& p : points) xy.emplace_back(p.fppf, p.tpr);
    std::sort(xy.begin(), xy.end());
    std::vector<std::pair<double, double>> dedup;
    for (const auto& p : xy) {
        if (!dedup.empty() && dedup.back().first == p.first)
            dedup.back().second = std::max(dedup.back().second, p.second);
        else
            dedup.push_back(p);
    }
    double auc = 0.0;
    for (std::size_t i = 1; i < dedup.size(); ++i) {
        auto [x0, y0] = dedup[i - 1];
        auto [x1, y1] = dedup[i];
        if (x0 >= 1.0) break;
        if (x1 > 1.0) {
            // clip the segment at fppf = 1
            double t = (1.0 - x0) / (x1 - x0);
            double y_at_1 = y0 + t * (y1 - y0);
            auc += (1.0 - x0) * (y0 + y_at_1) / 2.0;
            return auc;
        }
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    // curve ended before fppf = 1: the detector makes no further false
    // positives, extend at the final tpr
    if (dedup.back().first < 1.0) auc += (1.0 - dedup.back().first) * dedup.back().second;
    return auc;
}

}  // namespace

double frame_auc(const std::vector<double>& frame_scores, const std::vector<int>& frame_labels) {
    if (frame_scores.size() != frame_labels.size())
        throw IngestError("frame scores and labels differ in length");
    std::size_t pos = 0, neg = 0;
    for (int l : frame_labels) (l ? pos : neg) += 1;
    if (pos == 0 || neg == 0)
        throw IngestError("frame AUC undefined: ground truth contains a single class (" + std::to_string(pos) +
                          " positive, " + std::to_string(neg) + " negative frames)");

    // Mann-Whitney rank statistic; ties get average ranks (trapezoid ROC).
    std::vector<std::size_t> order(frame_scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return frame_scores[a] < frame_scores[b]; });
    std::vector<double> ranks(order.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && frame_scores[order[j + 1]] == frame_scores[order[i]]) ++j;
        double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
        i = j + 1;
    }
    double rank_sum_pos = 0.0;
    for (std::size_t k = 0; k < ranks.size(); ++k)
        if (frame_labels[k]) rank_sum_pos += ranks[k];
    double u = rank_sum_pos - static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport evaluate_metrics(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks,
                               const EvalParams& params) {
    if (tracks.empty()) throw IngestError("RBDC/TBDC undefined on empty ground truth");
    MetricsReport report;
    report.params = params;
    report.frames = map.frame_count;

    std::vector<FlatBox> boxes = observable_boxes(map, tracks);
    if (boxes.empty()) throw IngestError("no ground-truth boxes fall inside the score map's frame range");
    std::set<std::size_t> track_set;
    for (const auto& fb : boxes) track_set.insert(fb.track);
    std::vector<std::size_t> boxes_per_track(tracks.size(), 0);
    for (const auto& fb : boxes) ++boxes_per_track[fb.track];

    report.gt_boxes = boxes.size();
    report.gt_tracks = track_set.size();

    std::vector<double> taus = threshold_sweep(map, params.max_thresholds);
    report.thresholds = taus.size();
    const double frames = static_cast<double>(map.frame_count);

    for (double tau : taus) {
        auto detections = extract_detections(map, tau);
        TauMatch m = match_at_tau(map, detections, boxes, params.iou_min);

        std::size_t detected_boxes = 0;
        std::vector<std::size_t> detected_per_track(tracks.size(), 0);
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            if (m.box_detected[b]) {
                ++detected_boxes;
                ++detected_per_track[boxes[b].track];
            }
        }
        std::size_t detected_tracks = 0;
        for (std::size_t ti : track_set) {
            double fraction = static_cast<double>(detected_per_track[ti]) / static_cast<double>(boxes_per_track[ti]);
            if (fraction >= params.track_fraction) ++detected_tracks;  // inclusive boundary
        }

        double fppf = static_cast<double>(m.false_positives) / frames;
        report.rbdc_curve.push_back(
            CurvePoint{tau, fppf, static_cast<double>(detected_boxes) / static_cast<double>(boxes.size())});
        report.tbdc_curve.push_back(
            CurvePoint{tau, fppf, static_cast<double>(detected_tracks) / static_cast<double>(track_set.size())});
    }

    report.rbdc_auc = auc_fppf(report.rbdc_curve);
    report.tbdc_auc = auc_fppf(report.tbdc_curve);

    // frame-level criterion for completeness
    std::vector<double> frame_scores(static_cast<std::size_t>(map.frame_count), 0.0);
    for (std::int64_t f = 0; f < map.frame_count; ++f) {
        float best = 0.f;
        const std::size_t plane = static_cast<std::size_t>(map.height) * map.width;
        for (std::size_t p = 0; p < plane; ++p)
            best = std::max(best, map.data[static_cast<std::size_t>(f) * plane + p]);
        frame_scores[static_cast<std::size_t>(f)] = best;
    }
    std::vector<int> frame_labels(static_cast<std::size_t>(map.frame_count), 0);
    for (const auto& fb : boxes) frame_labels[static_cast<std::size_t>(fb.box.frame - map.frame_begin)] = 1;
    try {
        report.frame_auc = frame_auc(frame_scores, frame_labels);
    } catch (const IngestError&) {
        report.frame_auc = std::nan("");  // single-class frame labels
        log_warn("frame AUC undefined for this ground truth (single class); reported as nan");
    }
    return report;
}

double rbdc_auc(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks, const EvalParams& params) {
    return evaluate_metrics(map, tracks, params).rbdc_auc;
}

double tbdc_auc(const ScoreMap& map, const std::vector<GroundTruthTrack>& tracks, const EvalParams& params) {
    return evaluate_metrics(map, tracks, params).tbdc_auc;
}

std::string render_metrics_report(const MetricsReport& report, const std::string& config_echo) {
    std::ostringstream out;
    out << "# anomaly detection metrics\n";
    out << "frames: " << report.frames << "  gt_boxes: " << report.gt_boxes << "  gt_tracks: " << report.gt_tracks
        << "\n";
    out << "params: iou_min=" << report.params.iou_min << " track_fraction=" << report.params.track_fraction
        << " thresholds=" << report.thresholds << " fppf_range=[0,1]\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "rbdc_auc: %.6f\n", report.rbdc_auc);
    out << buf;
    std::snprintf(buf, sizeof(buf), "tbdc_auc: %.6f\n", report.tbdc_auc);
    out << buf;
    std::snprintf(buf, sizeof(buf), "frame_auc: %.6f\n", report.frame_auc);
    out << buf;
    out << "# rbdc curve: tau fppf tpr\n";
    for (const auto& p : report.rbdc_curve) {
        std::snprintf(buf, sizeof(buf), "%.9g %.6f %.6f\n", p.tau, p.fppf, p.tpr);
        out << buf;
    }
    out << "# tbdc curve: tau fppf tpr\n";
    for (const auto& p : report.tbdc_curve) {
        std::snprintf(buf, sizeof(buf), "%.9g %.6f %.6f\n", p.tau, p.fppf, p.tpr);
        out << buf;
    }
    if (!config_echo.empty()) out << "# config\n" << config_echo;
    return out.str();
}

std::string metrics_report_json(const MetricsReport& report, const std::string& config_echo) {
    nlohmann::json j;
    j["rbdc_auc"] = report.rbdc_auc;
    j["tbdc_auc"] = report.tbdc_auc;
    j["frame_auc"] = report.frame_auc;
    j["frames"] = report.frames;
    j["gt_boxes"] = report.gt_boxes;
    j["gt_tracks"] = report.gt_tracks;
    j["params"] = {{"iou_min", report.params.iou_min},
                   {"track_fraction", report.params.track_fraction},
                   {"max_thresholds", report.params.max_thresholds}};
    auto curve_json = [](const std::vector<CurvePoint>& curve) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : curve) arr.push_back({{"tau", p.tau}, {"fppf", p.fppf}, {"tpr", p.tpr}});
        return arr;
    };
    j["rbdc_curve"] = curve_json(report.rbdc_curve);
    j["tbdc_curve"] = curve_json(report.tbdc_curve);
    if (!config_echo.empty()) j["config"] = config_echo;
    return j.dump(2);
}

}  // namespace valo
