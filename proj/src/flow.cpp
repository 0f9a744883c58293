#include "valo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "valo/common.hpp"

namespace valo {

namespace {

constexpr float kFloMagic = 202021.25f;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

FlowField load_flo(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open flow file: " + path);

    float magic = 0.f;
    std::int32_t w = 0, h = 0;
    if (std::fread(&magic, sizeof(magic), 1, fp.get()) != 1) throw FormatError("truncated .flo header: " + path);
    if (magic != kFloMagic) throw FormatError("bad .flo magic in " + path);
    if (std::fread(&w, sizeof(w), 1, fp.get()) != 1 || std::fread(&h, sizeof(h), 1, fp.get()) != 1)
        throw FormatError("truncated .flo header: " + path);
    if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw FormatError("implausible .flo dimensions in " + path);

    FlowField flow(h, w);
    std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<float> interleaved(n * 2);
    if (std::fread(interleaved.data(), sizeof(float), n * 2, fp.get()) != n * 2)
        throw FormatError("truncated .flo payload: " + path);
    for (std::size_t i = 0; i < n; ++i) {
        flow.u[i] = interleaved[2 * i];
        flow.v[i] = interleaved[2 * i + 1];
    }
    return flow;
}

void save_flo(const std::string& path, const FlowField& flow) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    float magic = kFloMagic;
    std::int32_t w = flow.width, h = flow.height;
    std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<float> interleaved(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        interleaved[2 * i] = flow.u[i];
        interleaved[2 * i + 1] = flow.v[i];
    }
    if (std::fwrite(&magic, sizeof(magic), 1, fp.get()) != 1 || std::fwrite(&w, sizeof(w), 1, fp.get()) != 1 ||
        std::fwrite(&h, sizeof(h), 1, fp.get()) != 1 ||
        std::fwrite(interleaved.data(), sizeof(float), n * 2, fp.get()) != n * 2)
        throw Error("short write: " + path);
}

namespace {

FloatImage downsample2(const FloatImage& img) {
    int h = std::max(1, img.height / 2);
    int w = std::max(1, img.width / 2);
    FloatImage out(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int y0 = 2 * y, x0 = 2 * x;
            int y1 = std::min(y0 + 1, img.height - 1);
            int x1 = std::min(x0 + 1, img.width - 1);
            out.at(y, x) = 0.25f * (img.at(y0, x0) + img.at(y0, x1) + img.at(y1, x0) + img.at(y1, x1));
        }
    }
    return out;
}

float sample_bilinear(const FloatImage& img, float y, float x) {
    // clamped borders
    x = std::clamp(x, 0.f, static_cast<float>(img.width - 1));
    y = std::clamp(y, 0.f, static_cast<float>(img.height - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    float fx = x - x0, fy = y - y0;
    float top = img.at(y0, x0) * (1 - fx) + img.at(y0, x1) * fx;
    float bot = img.at(y1, x0) * (1 - fx) + img.at(y1, x1) * fx;
    return top * (1 - fy) + bot * fy;
}

FloatImage warp(const FloatImage& img, const std::vector<float>& u, const std::vector<float>& v) {
    FloatImage out(img.height, img.width);
    std::size_t i = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x, ++i) out.data[i] = sample_bilinear(img, y + v[i], x + u[i]);
    return out;
}

// 4-neighbour average with replicated borders (classic Horn-Schunck kernel).
void neighbour_average(const std::vector<float>& f, int h, int w, std::vector<float>& out) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            float up = f[static_cast<std::size_t>(std::max(y - 1, 0)) * w + x];
            float dn = f[static_cast<std::size_t>(std::min(y + 1, h - 1)) * w + x];
            float lf = f[static_cast<std::size_t>(y) * w + std::max(x - 1, 0)];
            float rt = f[static_cast<std::size_t>(y) * w + std::min(x + 1, w - 1)];
            out[i] = 0.25f * (up + dn + lf + rt);
        }
    }
}

void resize_flow(const FlowField& src, FlowField& dst) {
    float sy = static_cast<float>(src.height) / dst.height;
    float sx = static_cast<float>(src.width) / dst.width;
    FloatImage su{src.height, src.width}, sv{src.height, src.width};
    su.data = src.u;
    sv.data = src.v;
    std::size_t i = 0;
    for (int y = 0; y < dst.height; ++y) {
        for (int x = 0; x < dst.width; ++x, ++i) {
            dst.u[i] = sample_bilinear(su, (y + 0.5f) * sy - 0.5f, (x + 0.5f) * sx - 0.5f) / sx;
            dst.v[i] = sample_bilinear(sv, (y + 0.5f) * sy - 0.5f, (x + 0.5f) * sx - 0.5f) / sy;
        }
    }
}

void horn_schunck_level(const FloatImage& a, const FloatImage& b, FlowField& flow, const FlowEstimatorParams& p) {
    int h = a.height, w = a.width;
    std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<float> ix(n), iy(n), it(n), ubar(n), vbar(n), u0(n), v0(n);

    for (int warp_it = 0; warp_it < p.warps_per_level; ++warp_it) {
        FloatImage bw = warp(b, flow.u, flow.v);
        // derivatives averaged over the (warped) pair
        std::size_t i = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x, ++i) {
                int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
                int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
                float ax = (a.at(y, xr) - a.at(y, xl)) / (xr - xl == 0 ? 1.f : static_cast<float>(xr - xl));
                float bx = (bw.at(y, xr) - bw.at(y, xl)) / (xr - xl == 0 ? 1.f : static_cast<float>(xr - xl));
                float ay = (a.at(yd, x) - a.at(yu, x)) / (yd - yu == 0 ? 1.f : static_cast<float>(yd - yu));
                float by = (bw.at(yd, x) - bw.at(yu, x)) / (yd - yu == 0 ? 1.f : static_cast<float>(yd - yu));
                ix[i] = 0.5f * (ax + bx);
                iy[i] = 0.5f * (ay + by);
                it[i] = bw.data[i] - a.data[i];
            }
        }
        u0 = flow.u;
        v0 = flow.v;
        float alpha2 = p.alpha * p.alpha;
        for (int iter = 0; iter < p.iterations; ++iter) {
            neighbour_average(flow.u, h, w, ubar);
            neighbour_average(flow.v, h, w, vbar);
            for (std::size_t k = 0; k < n; ++k) {
                // brightness constancy linearized at the warp base (u0, v0)
                float t = it[k] + ix[k] * (ubar[k] - u0[k]) + iy[k] * (vbar[k] - v0[k]);
                float den = alpha2 + ix[k] * ix[k] + iy[k] * iy[k];
                flow.u[k] = ubar[k] - ix[k] * t / den;
                flow.v[k] = vbar[k] - iy[k] * t / den;
            }
        }
    }
}

}  // namespace

FlowField estimate_flow(const Image& a, const Image& b, const FlowEstimatorParams& params) {
    if (a.height != b.height || a.width != b.width)
        throw IngestError("estimate_flow: frame dims differ (" + std::to_string(a.height) + "x" + std::to_string(a.width) +
                          " vs " + std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
    if (params.pyramid_levels < 1 || params.iterations < 1) throw ConfigError("estimate_flow: levels and iterations must be >= 1");

    std::vector<FloatImage> pyr_a{to_gray(a)};
    std::vector<FloatImage> pyr_b{to_gray(b)};
    while (static_cast<int>(pyr_a.size()) < params.pyramid_levels && std::min(pyr_a.back().height, pyr_a.back().width) >= 16) {
        pyr_a.push_back(downsample2(pyr_a.back()));
        pyr_b.push_back(downsample2(pyr_b.back()));
    }

    FlowField flow(pyr_a.back().height, pyr_a.back().width);
    for (int level = static_cast<int>(pyr_a.size()) - 1; level >= 0; --level) {
        if (level != static_cast<int>(pyr_a.size()) - 1) {
            FlowField up(pyr_a[level].height, pyr_a[level].width);
            resize_flow(flow, up);
            flow = std::move(up);
        }
        horn_schunck_level(pyr_a[level], pyr_b[level], flow, params);
    }
    return flow;
}

double flow_residual(const Image& a, const Image& b, const FlowField& flow) {
    FloatImage ga = to_gray(a), gb = to_gray(b);
    double acc = 0.0;
    std::size_t i = 0;
    for (int y = 0; y < ga.height; ++y)
        for (int x = 0; x < ga.width; ++x, ++i) acc += std::abs(sample_bilinear(gb, y + flow.v[i], x + flow.u[i]) - ga.data[i]);
    return acc / static_cast<double>(ga.data.size());
}

}  // namespace valo
