#include "valo/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "valo/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace valo {

VolumeScore score_volume(const FeatureVector& feature, const RegionModel& rm, const Normalizers& z, double sentinel) {
    VolumeScore vs;
    vs.region_index = rm.region_index;
    if (rm.exemplars.empty()) {
        vs.score = sentinel;
        vs.nearest = -1;
        return vs;
    }
    double best = -1.0;
    std::int32_t best_idx = -1;
    for (std::size_t i = 0; i < rm.exemplars.size(); ++i) {
        double d = feature_distance(feature, rm.exemplars[i], z);
        if (best_idx < 0 || d < best) {
            best = d;
            best_idx = static_cast<std::int32_t>(i);
        }
    }
    vs.score = best;
    vs.nearest = best_idx;
    return vs;
}

void accumulate(ScoreMap& map, const VolumeScore& vs, const RegionGrid& grid, int t) {
    const std::int64_t f0 = vs.frame_start;
    if (f0 < map.frame_begin || f0 + t > map.frame_begin + map.frame_count)
        throw IngestError("volume window [" + std::to_string(f0) + ", " + std::to_string(f0 + t) +
                          ") outside the score map's frame range");
    const int x0 = grid.anchor_x(static_cast<int>(vs.region_index));
    const int y0 = grid.anchor_y(static_cast<int>(vs.region_index));
    const int y_end = std::min(y0 + grid.region_h, map.height);
    const int x_end = std::min(x0 + grid.region_w, map.width);
    const float s = static_cast<float>(vs.score);
    for (std::int64_t f = f0; f < f0 + t; ++f)
        for (int y = y0; y < y_end; ++y)
            for (int x = x0; x < x_end; ++x) {
                float& px = map.at(f, y, x);
                if (s > px) px = s;
            }
}

bool volume_unchanged(const VideoVolume& cur, const VideoVolume& prev, double ncc_min) {
    if (cur.pixels.size() != prev.pixels.size()) return false;
    const std::size_t n = cur.pixels.size();
    if (n == 0) return false;

    // exact integer moments; u8 payloads cannot overflow these
    std::uint64_t s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t a = cur.pixels[i];
        const std::uint64_t b = prev.pixels[i];
        s1 += a;
        s2 += b;
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
    }
    const double dn = static_cast<double>(n);
    const double var_a = static_cast<double>(s11) - static_cast<double>(s1) * static_cast<double>(s1) / dn;
    const double var_b = static_cast<double>(s22) - static_cast<double>(s2) * static_cast<double>(s2) / dn;
    if (var_a <= 0.0 && var_b <= 0.0) return s1 == s2;  // both constant
    if (var_a <= 0.0 || var_b <= 0.0) return false;     // constant vs textured: NCC undefined, treat as changed
    const double cov = static_cast<double>(s12) - static_cast<double>(s1) * static_cast<double>(s2) / dn;
    return cov / std::sqrt(var_a * var_b) >= ncc_min;
}

DetectResult detect(const FrameSequence& seq,
                    const std::function<FeatureVector(std::uint32_t region, std::int64_t frame_start,
                                                      const VideoVolume& volume)>& provider,
                    const SceneModel& model, const DetectParams& params) {
    if (seq.height() != model.grid.frame_h || seq.width() != model.grid.frame_w)
        throw IngestError("test video dims " + std::to_string(seq.height()) + "x" + std::to_string(seq.width()) +
                          " do not match the model grid " + std::to_string(model.grid.frame_h) + "x" +
                          std::to_string(model.grid.frame_w));

    const int t = static_cast<int>(model.t);
    const std::size_t windows = temporal_window_count(seq.size(), t);
    if (windows == 0) throw IngestError("test video has fewer frames than one temporal window");
    const std::size_t n_regions = model.regions.size();

    DetectResult result;
    result.map = ScoreMap(model.grid.frame_h, model.grid.frame_w, 0, static_cast<std::int64_t>(windows) * t);
    result.scores.reserve(windows * n_regions);

    std::vector<VideoVolume> prev_vols(n_regions), cur_vols(n_regions);
    std::vector<VolumeScore> prev_scores(n_regions), cur_scores(n_regions);
    std::atomic<std::uint64_t> computed{0};

    for (std::size_t wnd = 0; wnd < windows; ++wnd) {
        const std::int64_t fs = static_cast<std::int64_t>(wnd) * t;
        parallel_for(n_regions, params.workers, [&](std::size_t r) {
            VideoVolume vol = extract_volume(seq, model.grid, static_cast<std::uint32_t>(r), fs, t);
            VolumeScore vs;
            if (params.skip_unchanged && wnd > 0 && volume_unchanged(vol, prev_vols[r], params.ncc_min)) {
                vs = prev_scores[r];  // reuse verbatim; no feature computation
                vs.frame_start = fs;
            } else {
                FeatureVector f = provider(static_cast<std::uint32_t>(r), fs, vol);
                computed.fetch_add(1, std::memory_order_relaxed);
                vs = score_volume(f, model.regions[r], model.z, params.sentinel);
                vs.frame_start = fs;
            }
            cur_scores[r] = vs;
            cur_vols[r] = std::move(vol);
        });
        for (std::size_t r = 0; r < n_regions; ++r) {
            accumulate(result.map, cur_scores[r], model.grid, t);
            result.scores.push_back(cur_scores[r]);
        }
        std::swap(prev_vols, cur_vols);
        std::swap(prev_scores, cur_scores);
    }

    result.features_computed = computed.load();
    result.volumes_total = windows * n_regions;
    return result;
}

// ------------------------------ score map I/O -------------------------------

namespace {

std::string frame_file_name(std::int64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06" PRId64 ".f32", i);
    return buf;
}

}  // namespace

void save_score_map(const std::string& dir, const ScoreMap& map, const std::string& config_echo) {
    fs::create_directories(dir);
    json index;
    index["format"] = "valo-scoremap";
    index["version"] = 1;
    index["height"] = map.height;
    index["width"] = map.width;
    index["frame_begin"] = map.frame_begin;
    index["frame_count"] = map.frame_count;
    if (!config_echo.empty()) index["config"] = config_echo;
    json files = json::array();

    const std::size_t plane = static_cast<std::size_t>(map.height) * map.width;
    for (std::int64_t i = 0; i < map.frame_count; ++i) {
        std::string name = frame_file_name(map.frame_begin + i);
        files.push_back(name);
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw Error("cannot open for writing: " + (fs::path(dir) / name).string());
        out.write(reinterpret_cast<const char*>(map.data.data() + static_cast<std::size_t>(i) * plane),
                  static_cast<std::streamsize>(plane * sizeof(float)));
        if (!out) throw Error("short write: " + (fs::path(dir) / name).string());
    }
    index["frames"] = std::move(files);
    std::ofstream out(fs::path(dir) / "index.json");
    if (!out) throw Error("cannot open for writing: " + (fs::path(dir) / "index.json").string());
    out << index.dump(2) << "\n";
}

ScoreMap load_score_map(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "index.json");
    if (!in) throw IngestError("cannot open score map index: " + (fs::path(dir) / "index.json").string());
    json index;
    try {
        in >> index;
    } catch (const json::exception& e) {
        throw FormatError("malformed score map index in " + dir + ": " + e.what());
    }
    if (index.value("format", "") != "valo-scoremap") throw FormatError("not a score map index: " + dir);

    ScoreMap map(index.at("height").get<int>(), index.at("width").get<int>(), index.at("frame_begin").get<std::int64_t>(),
                 index.at("frame_count").get<std::int64_t>());
    const auto& files = index.at("frames");
    if (static_cast<std::int64_t>(files.size()) != map.frame_count)
        throw FormatError("score map index lists " + std::to_string(files.size()) + " frames, expected " +
                          std::to_string(map.frame_count));
    const std::size_t plane = static_cast<std::size_t>(map.height) * map.width;
    for (std::int64_t i = 0; i < map.frame_count; ++i) {
        fs::path p = fs::path(dir) / files[static_cast<std::size_t>(i)].get<std::string>();
        std::ifstream fin(p, std::ios::binary);
        if (!fin) throw IngestError("missing score frame file: " + p.string());
        fin.read(reinterpret_cast<char*>(map.data.data() + static_cast<std::size_t>(i) * plane),
                 static_cast<std::streamsize>(plane * sizeof(float)));
        if (fin.gcount() != static_cast<std::streamsize>(plane * sizeof(float)))
            throw FormatError("truncated score frame file: " + p.string());
    }
    return map;
}

void save_volume_scores_csv(const std::string& path, const std::vector<VolumeScore>& scores) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "region_index,frame_start,score,nearest_exemplar\n";
    char buf[96];
    for (const auto& vs : scores) {
        std::snprintf(buf, sizeof(buf), "%u,%" PRId64 ",%.9g,%d\n", vs.region_index, vs.frame_start, vs.score, vs.nearest);
        out << buf;
    }
}

std::vector<VolumeScore> load_volume_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open volume scores file: " + path);
    std::vector<VolumeScore> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("region_index", 0) == 0) continue;  // header
        }
        VolumeScore vs;
        if (std::sscanf(line.c_str(), "%u,%" SCNd64 ",%lf,%d", &vs.region_index, &vs.frame_start, &vs.score,
                        &vs.nearest) != 4)
            throw FormatError("malformed volume score line in " + path + ": " + line);
        out.push_back(vs);
    }
    return out;
}

void write_heatmaps(const std::string& dir, const ScoreMap& map, double scale) {
    if (scale <= 0) throw ConfigError("heatmap scale must be positive");
    fs::create_directories(dir);
    std::vector<std::uint8_t> plane(static_cast<std::size_t>(map.height) * map.width);
    for (std::int64_t i = 0; i < map.frame_count; ++i) {
        for (std::size_t p = 0; p < plane.size(); ++p) {
            double v = map.data[static_cast<std::size_t>(i) * plane.size() + p] / scale;
            plane[p] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "frame_%06" PRId64 ".png", map.frame_begin + i);
        save_png_gray((fs::path(dir) / buf).string(), plane, map.height, map.width);
    }
}

}  // namespace valo
