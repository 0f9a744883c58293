#include "valo/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "valo/common.hpp"

namespace fs = std::filesystem;

namespace valo {

namespace {

bool numeric_key(const std::string& stem, long long& key) {
    // last run of digits in the stem orders the sequence
    int end = -1;
    for (int i = static_cast<int>(stem.size()) - 1; i >= 0; --i) {
        if (std::isdigit(static_cast<unsigned char>(stem[i]))) {
            end = i;
            break;
        }
    }
    if (end < 0) return false;
    int begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
    key = std::stoll(stem.substr(begin, end - begin + 1));
    return true;
}

std::vector<std::pair<long long, fs::path>> list_numbered_entries(const std::string& dir,
                                                                  const std::vector<std::string>& extensions) {
    if (!fs::is_directory(dir)) throw IngestError("not a directory: " + dir);
    std::vector<std::pair<long long, fs::path>> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) continue;
        long long key = 0;
        if (!numeric_key(e.path().stem().string(), key))
            throw IngestError("file name carries no frame number: " + e.path().string());
        entries.emplace_back(key, e.path());
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.filename().string() < b.second.filename().string();
    });
    return entries;
}

std::vector<fs::path> list_numbered_files(const std::string& dir, const std::vector<std::string>& extensions) {
    auto entries = list_numbered_entries(dir, extensions);
    std::vector<fs::path> out;
    out.reserve(entries.size());
    for (auto& [k, p] : entries) out.push_back(p);
    return out;
}

}  // namespace

FrameSequence load_frame_sequence(const std::string& dir) {
    auto files = list_numbered_files(dir, {".png", ".ppm", ".pgm"});
    if (files.empty()) throw IngestError("no image files found in " + dir);
    FrameSequence seq;
    seq.frames.reserve(files.size());
    for (const auto& p : files) {
        Image img = load_image(p.string());
        if (!seq.frames.empty() && (img.height != seq.height() || img.width != seq.width()))
            throw IngestError("frame dimension mismatch in " + dir + ": " + p.filename().string() + " is " +
                              std::to_string(img.height) + "x" + std::to_string(img.width) + ", expected " +
                              std::to_string(seq.height()) + "x" + std::to_string(seq.width()));
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

std::vector<FlowField> load_flow_sequence(const std::string& dir, std::size_t expected_count) {
    auto entries = list_numbered_entries(dir, {".flo"});
    if (entries.size() != expected_count) {
        // name the first frame pair whose flow file is absent
        long long base = entries.empty() ? 0 : entries.front().first;
        std::size_t missing = entries.size();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].first != base + static_cast<long long>(i)) {
                missing = i;
                break;
            }
        }
        long long pair = base + static_cast<long long>(missing);
        throw IngestError("flow file for frame pair " + std::to_string(pair) + "->" + std::to_string(pair + 1) +
                          " missing in " + dir + " (" + std::to_string(entries.size()) + " .flo files, expected " +
                          std::to_string(expected_count) + ")");
    }
    std::vector<FlowField> out;
    out.reserve(entries.size());
    for (const auto& [k, p] : entries) out.push_back(load_flo(p.string()));
    return out;
}

RegionGrid build_region_grid(int frame_h, int frame_w, int region_h, int region_w) {
    if (region_h <= 0 || region_w <= 0) throw ConfigError("region size must be positive");
    if (region_h % 2 != 0 || region_w % 2 != 0)
        throw ConfigError("region size must be even (half stride undefined for " + std::to_string(region_h) + "x" +
                          std::to_string(region_w) + ")");
    if (frame_h <= 0 || frame_w <= 0) throw ConfigError("frame dims must be positive");
    if (region_h > 2 * frame_h || region_w > 2 * frame_w)
        throw ConfigError("region size exceeds twice the frame dims");

    RegionGrid grid;
    grid.frame_h = frame_h;
    grid.frame_w = frame_w;
    grid.region_h = region_h;
    grid.region_w = region_w;
    // anchors on the half-stride lattice, strictly inside the frame
    grid.ny = (frame_h + region_h / 2 - 1) / (region_h / 2);
    grid.nx = (frame_w + region_w / 2 - 1) / (region_w / 2);
    return grid;
}

std::size_t temporal_window_count(std::size_t n_frames, int t) {
    if (t <= 0) throw ConfigError("temporal extent t must be positive");
    return n_frames / static_cast<std::size_t>(t);
}

VideoVolume extract_volume(const FrameSequence& seq, const RegionGrid& grid, std::uint32_t region_index,
                           std::int64_t frame_start, int t) {
    if (t <= 0) throw ConfigError("temporal extent t must be positive");
    if (region_index >= static_cast<std::uint32_t>(grid.region_count()))
        throw IngestError("region index out of range: " + std::to_string(region_index));
    if (frame_start < 0 || frame_start + t > static_cast<std::int64_t>(seq.size()))
        throw IngestError("temporal window [" + std::to_string(frame_start) + ", " + std::to_string(frame_start + t) +
                          ") outside the video");

    VideoVolume vol;
    vol.h = grid.region_h;
    vol.w = grid.region_w;
    vol.t = t;
    vol.region_index = region_index;
    vol.frame_start = frame_start;
    vol.pixels.assign(static_cast<std::size_t>(t) * vol.h * vol.w * 3, 0);

    const int x0 = grid.anchor_x(static_cast<int>(region_index));
    const int y0 = grid.anchor_y(static_cast<int>(region_index));
    const int y_end = std::min(y0 + vol.h, grid.frame_h);
    const int x_end = std::min(x0 + vol.w, grid.frame_w);

    for (int f = 0; f < t; ++f) {
        const Image& frame = seq.frames[static_cast<std::size_t>(frame_start + f)];
        for (int y = y0; y < y_end; ++y) {
            const std::uint8_t* src = frame.data.data() + (static_cast<std::size_t>(y) * grid.frame_w + x0) * 3;
            std::uint8_t* dst =
                vol.pixels.data() + ((static_cast<std::size_t>(f) * vol.h + (y - y0)) * vol.w + 0) * 3;
            std::copy(src, src + static_cast<std::size_t>(x_end - x0) * 3, dst);
        }
    }
    return vol;
}

std::vector<VideoVolume> extract_volumes(const FrameSequence& seq, const RegionGrid& grid, int t) {
    std::size_t windows = temporal_window_count(seq.size(), t);
    if (windows == 0) throw IngestError("video has fewer frames than one temporal window");
    std::vector<VideoVolume> out;
    out.reserve(windows * static_cast<std::size_t>(grid.region_count()));
    for (std::size_t wnd = 0; wnd < windows; ++wnd)
        for (int r = 0; r < grid.region_count(); ++r)
            out.push_back(extract_volume(seq, grid, static_cast<std::uint32_t>(r), static_cast<std::int64_t>(wnd) * t, t));
    return out;
}

FlowField crop_flow(const FlowField& flow, const RegionGrid& grid, std::uint32_t region_index) {
    if (flow.height != grid.frame_h || flow.width != grid.frame_w)
        throw IngestError("flow dims " + std::to_string(flow.height) + "x" + std::to_string(flow.width) +
                          " do not match the grid frame dims " + std::to_string(grid.frame_h) + "x" +
                          std::to_string(grid.frame_w));
    FlowField out(grid.region_h, grid.region_w);
    const int x0 = grid.anchor_x(static_cast<int>(region_index));
    const int y0 = grid.anchor_y(static_cast<int>(region_index));
    const int y_end = std::min(y0 + grid.region_h, grid.frame_h);
    const int x_end = std::min(x0 + grid.region_w, grid.frame_w);
    for (int y = y0; y < y_end; ++y) {
        for (int x = x0; x < x_end; ++x) {
            out.u[out.index(y - y0, x - x0)] = flow.u[flow.index(y, x)];
            out.v[out.index(y - y0, x - x0)] = flow.v[flow.index(y, x)];
        }
    }
    return out;
}

}  // namespace valo
