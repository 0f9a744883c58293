#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "valo/flow.hpp"
#include "valo/image.hpp"

namespace valo {

struct FrameSequence {
    std::vector<Image> frames;
    double frame_rate = 0.0;  // metadata only

    int height() const { return frames.empty() ? 0 : frames.front().height; }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    std::size_t size() const { return frames.size(); }
};

// Loads all numbered .png/.ppm/.pgm files in a directory, ordered by the
// numeric value embedded in each filename (not lexically).
FrameSequence load_frame_sequence(const std::string& dir);

// Loads flow files `dir/<stem with number i>.flo` for i -> i+1 frame pairs,
// ordered numerically. Expects exactly n_frames-1 files when n_frames > 0.
std::vector<FlowField> load_flow_sequence(const std::string& dir, std::size_t expected_count);

// Overlapping spatial windows with half-size stride. Anchors lie on the
// stride lattice; the last row/column may overhang the frame and is
// zero-padded. Every pixel is covered by 1..4 regions.
struct RegionGrid {
    int frame_h = 0;
    int frame_w = 0;
    int region_h = 0;
    int region_w = 0;
    int nx = 0;  // anchors per row
    int ny = 0;  // anchors per column

    int region_count() const { return nx * ny; }
    int anchor_x(int region_index) const { return (region_index % nx) * (region_w / 2); }
    int anchor_y(int region_index) const { return (region_index / nx) * (region_h / 2); }

    bool operator==(const RegionGrid& o) const = default;
};

RegionGrid build_region_grid(int frame_h, int frame_w, int region_h, int region_w);

// h x w x 3 x t spatio-temporal RGB block on the region grid. Pixels outside
// the frame are exactly zero. Layout: frame-major, then row-major RGB.
struct VideoVolume {
    int h = 0;
    int w = 0;
    int t = 0;
    std::uint32_t region_index = 0;
    std::int64_t frame_start = 0;
    std::vector<std::uint8_t> pixels;  // t * h * w * 3

    std::uint8_t at(int frame, int y, int x, int c) const {
        return pixels[((static_cast<std::size_t>(frame) * h + y) * w + x) * 3 + c];
    }
    bool operator==(const VideoVolume& o) const = default;
};

// Number of full non-overlapping temporal windows; the trailing partial
// window is dropped.
std::size_t temporal_window_count(std::size_t n_frames, int t);

VideoVolume extract_volume(const FrameSequence& seq, const RegionGrid& grid, std::uint32_t region_index,
                           std::int64_t frame_start, int t);

// All volumes in stream order: frame_start ascending, then region ascending.
std::vector<VideoVolume> extract_volumes(const FrameSequence& seq, const RegionGrid& grid, int t);

// Crops one flow field to a region window, zero-padding outside the frame.
FlowField crop_flow(const FlowField& flow, const RegionGrid& grid, std::uint32_t region_index);

}  // namespace valo
