#pragma once

#include <string>
#include <vector>

#include "valo/image.hpp"

namespace valo {

// Dense per-pixel displacement between a consecutive frame pair, in
// pixels/frame. Image convention: x right, y down.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<float> u;  // horizontal component, row-major
    std::vector<float> v;  // vertical component, row-major

    FlowField() = default;
    FlowField(int h, int w) : height(h), width(w), u(static_cast<std::size_t>(h) * w, 0.f), v(static_cast<std::size_t>(h) * w, 0.f) {}

    std::size_t index(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
};

// Middlebury .flo: float magic 202021.25, then int32 width, int32 height,
// then row-major interleaved (u, v) float pairs. Little-endian throughout.
FlowField load_flo(const std::string& path);
void save_flo(const std::string& path, const FlowField& flow);

struct FlowEstimatorParams {
    int pyramid_levels = 4;
    int iterations = 100;  // solver iterations per warp
    int warps_per_level = 3;
    float alpha = 0.05f;  // smoothness weight for [0,1] intensities

    bool operator==(const FlowEstimatorParams&) const = default;
};

// Coarse-to-fine Horn-Schunck estimator, sufficient for smooth synthetic
// inputs. Not a TV-L1 replacement.
FlowField estimate_flow(const Image& a, const Image& b, const FlowEstimatorParams& params = {});

// Mean absolute brightness-constancy residual |b(x+flow) - a(x)| in [0,1]
// gray units; reported by the estimator tests and the CLI.
double flow_residual(const Image& a, const Image& b, const FlowField& flow);

}  // namespace valo
