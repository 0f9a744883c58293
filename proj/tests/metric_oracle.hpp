#pragma once

// Exhaustive, library-independent oracle for the detection criteria:
// union-find labeling, literal matching loops, and the documented curve
// rule. Shares no code with the evaluated implementation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "valo/evaluate.hpp"

namespace metricoracle {

struct OracleRegion {
    std::int64_t frame = 0;
    std::vector<int> xs, ys;
    bool matched = false;
};

inline int uf_find(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

inline std::vector<OracleRegion> oracle_regions(const valo::ScoreMap& map, double tau) {
    std::vector<OracleRegion> out;
    const int h = map.height, w = map.width;
    for (std::int64_t f = map.frame_begin; f < map.frame_begin + map.frame_count; ++f) {
        std::vector<int> parent(static_cast<std::size_t>(h) * w);
        std::iota(parent.begin(), parent.end(), 0);
        auto on = [&](int y, int x) { return y >= 0 && y < h && x >= 0 && x < w && map.at(f, y, x) >= tau; };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!on(y, x)) continue;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dy || dx) && on(y + dy, x + dx)) {
                            int a = uf_find(parent, y * w + x);
                            int b = uf_find(parent, (y + dy) * w + (x + dx));
                            if (a != b) parent[a] = b;
                        }
                    }
            }
        std::map<int, OracleRegion> by_root;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!on(y, x)) continue;
                auto& region = by_root[uf_find(parent, y * w + x)];
                region.frame = f;
                region.xs.push_back(x);
                region.ys.push_back(y);
            }
        for (auto& [root, region] : by_root) out.push_back(std::move(region));
    }
    return out;
}

inline double oracle_iou(const OracleRegion& region, const valo::GtBox& box, int h, int w) {
    int x0 = std::max(box.x, 0), y0 = std::max(box.y, 0);
    int x1 = std::min(box.x + box.w, w), y1 = std::min(box.y + box.h, h);
    if (x0 >= x1 || y0 >= y1) return 0.0;
    std::size_t inter = 0;
    for (std::size_t i = 0; i < region.xs.size(); ++i)
        if (region.xs[i] >= x0 && region.xs[i] < x1 && region.ys[i] >= y0 && region.ys[i] < y1) ++inter;
    std::size_t uni = region.xs.size() + static_cast<std::size_t>(x1 - x0) * (y1 - y0) - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double oracle_auc(std::vector<std::pair<double, double>> pts) {
    pts.emplace_back(0.0, 0.0);
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> dd;
    for (auto& p : pts) {
        if (!dd.empty() && dd.back().first == p.first)
            dd.back().second = std::max(dd.back().second, p.second);
        else
            dd.push_back(p);
    }
    double auc = 0;
    for (std::size_t i = 1; i < dd.size(); ++i) {
        auto [x0, y0] = dd[i - 1];
        auto [x1, y1] = dd[i];
        if (x0 >= 1.0) break;
        if (x1 > 1.0) {
            double y_at_1 = y0 + (1.0 - x0) / (x1 - x0) * (y1 - y0);
            return auc + (1.0 - x0) * (y0 + y_at_1) / 2.0;
        }
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    if (dd.back().first < 1.0) auc += (1.0 - dd.back().first) * dd.back().second;
    return auc;
}

struct OracleResult {
    double rbdc = 0.0;
    double tbdc = 0.0;
    double frame = 0.0;
};

inline OracleResult oracle_metrics(const valo::ScoreMap& map, const std::vector<valo::GroundTruthTrack>& tracks,
                                   double iou_min, double track_fraction) {
    std::set<float> taus_set;
    for (float v : map.data)
        if (v > 0) taus_set.insert(v);
    std::vector<double> taus(taus_set.rbegin(), taus_set.rend());

    struct FB {
        std::size_t track;
        valo::GtBox box;
    };
    std::vector<FB> boxes;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti)
        for (const auto& b : tracks[ti].boxes) {
            if (b.frame < map.frame_begin || b.frame >= map.frame_begin + map.frame_count) continue;
            if (std::max(b.x, 0) >= std::min(b.x + b.w, map.width)) continue;
            if (std::max(b.y, 0) >= std::min(b.y + b.h, map.height)) continue;
            boxes.push_back({ti, b});
        }
    std::map<std::size_t, std::size_t> track_sizes;
    for (const auto& fb : boxes) ++track_sizes[fb.track];

    std::vector<std::pair<double, double>> rbdc_pts, tbdc_pts;
    for (double tau : taus) {
        auto regions = oracle_regions(map, tau);
        std::size_t tp = 0, fp = 0;
        std::map<std::size_t, std::size_t> per_track;
        std::vector<bool> box_hit(boxes.size(), false);
        for (std::size_t bi = 0; bi < boxes.size(); ++bi)
            for (auto& r : regions) {
                if (r.frame != boxes[bi].box.frame) continue;
                if (oracle_iou(r, boxes[bi].box, map.height, map.width) >= iou_min) {
                    box_hit[bi] = true;
                    r.matched = true;
                }
            }
        for (std::size_t bi = 0; bi < boxes.size(); ++bi)
            if (box_hit[bi]) {
                ++tp;
                ++per_track[boxes[bi].track];
            }
        for (const auto& r : regions)
            if (!r.matched) ++fp;

        std::size_t tracks_hit = 0;
        for (const auto& [ti, size] : track_sizes)
            if (static_cast<double>(per_track[ti]) / static_cast<double>(size) >= track_fraction) ++tracks_hit;

        double fppf = static_cast<double>(fp) / static_cast<double>(map.frame_count);
        rbdc_pts.emplace_back(fppf, static_cast<double>(tp) / static_cast<double>(boxes.size()));
        tbdc_pts.emplace_back(fppf, static_cast<double>(tracks_hit) / static_cast<double>(track_sizes.size()));
    }

    // pairwise win probability with ties at 1/2 = trapezoid ROC AUC
    std::vector<std::pair<double, int>> frames;
    for (std::int64_t f = 0; f < map.frame_count; ++f) {
        double best = 0;
        for (int y = 0; y < map.height; ++y)
            for (int x = 0; x < map.width; ++x) best = std::max(best, static_cast<double>(map.at(f, y, x)));
        int label = 0;
        for (const auto& fb : boxes)
            if (fb.box.frame == f) label = 1;
        frames.emplace_back(best, label);
    }
    double wins = 0;
    std::size_t pos = 0, neg = 0;
    for (auto [sp, lp] : frames) {
        if (lp) ++pos;
        else ++neg;
    }
    for (auto [sp, lp] : frames) {
        if (!lp) continue;
        for (auto [sn, ln] : frames) {
            if (ln) continue;
            if (sp > sn) wins += 1.0;
            else if (sp == sn) wins += 0.5;
        }
    }
    OracleResult out;
    out.rbdc = oracle_auc(rbdc_pts);
    out.tbdc = oracle_auc(tbdc_pts);
    out.frame = (pos && neg) ? wins / (static_cast<double>(pos) * static_cast<double>(neg))
                             : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace metricoracle
