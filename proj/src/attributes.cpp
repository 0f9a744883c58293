#include "valo/attributes.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numbers>

#include "valo/common.hpp"

namespace valo {

int direction_bin(double u, double v, double th_mot) {
    double mag = std::hypot(u, v);
    if (mag < th_mot) return -1;
    double a = std::atan2(v, u);
    if (a < 0) a += 2.0 * std::numbers::pi;
    int bin = static_cast<int>(a / (std::numbers::pi / 6.0));
    return bin > 11 ? 11 : bin;  // guard the a ~ 2*pi rounding edge
}

MotionAttributes compute_motion_attributes(const std::vector<FlowField>& flow_volume, const FlowThresholds& th) {
    if (flow_volume.empty()) throw IngestError("compute_motion_attributes: empty flow volume");
    if (th.th_mot <= 0) throw ConfigError("th_mot must be positive");
    if (th.th_bkg <= 0 || th.th_bkg > 1) throw ConfigError("th_bkg must lie in (0, 1]");
    const int h = flow_volume.front().height;
    const int w = flow_volume.front().width;
    if (h <= 0 || w <= 0) throw IngestError("compute_motion_attributes: empty flow field");

    std::array<std::uint64_t, kDirectionBins> counts{};
    std::array<double, kDirectionBins> mag_sums{};
    std::uint64_t stationary = 0;

    for (const FlowField& field : flow_volume) {
        if (field.height != h || field.width != w)
            throw IngestError("compute_motion_attributes: flow field dims differ within the volume");
        const std::size_t n = field.u.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double u = field.u[i];
            const double v = field.v[i];
            if (!std::isfinite(u) || !std::isfinite(v))
                throw IngestError("compute_motion_attributes: non-finite flow value");
            int bin = direction_bin(u, v, th.th_mot);
            if (bin < 0) {
                ++stationary;
            } else {
                ++counts[bin];
                mag_sums[bin] += std::hypot(u, v);
            }
        }
    }

    const std::uint64_t total = static_cast<std::uint64_t>(flow_volume.size()) * h * w;
    MotionAttributes out;
    for (int i = 0; i < kDirectionBins; ++i) {
        out.ang[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
        out.mag[i] = counts[i] == 0 ? 0.0 : mag_sums[i] / static_cast<double>(counts[i]);
    }
    out.bkg = static_cast<double>(stationary) / static_cast<double>(total);
    out.cls = out.bkg >= th.th_bkg;
    return out;
}

namespace {

constexpr int kThumb = 8;
constexpr int kHistBins = 16;

// 8x8 mean-pooled gray thumbnail, L2-normalized (zero frame stays zero).
void frame_thumbnail(const VideoVolume& vol, int frame, double* out) {
    const int h = vol.h, w = vol.w;
    for (int i = 0; i < kThumb; ++i) {
        int y0 = i * h / kThumb;
        int y1 = std::max(y0 + 1, (i + 1) * h / kThumb);
        y0 = std::min(y0, h - 1);
        y1 = std::min(y1, h);
        for (int j = 0; j < kThumb; ++j) {
            int x0 = j * w / kThumb;
            int x1 = std::max(x0 + 1, (j + 1) * w / kThumb);
            x0 = std::min(x0, w - 1);
            x1 = std::min(x1, w);
            double acc = 0.0;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    acc += 0.299 * vol.at(frame, y, x, 0) + 0.587 * vol.at(frame, y, x, 1) + 0.114 * vol.at(frame, y, x, 2);
            out[i * kThumb + j] = acc / (255.0 * (y1 - y0) * (x1 - x0));
        }
    }
    double norm = 0.0;
    for (int i = 0; i < kThumb * kThumb; ++i) norm += out[i] * out[i];
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (int i = 0; i < kThumb * kThumb; ++i) out[i] /= norm;
}

}  // namespace

std::vector<float> builtin_appearance(const VideoVolume& volume) {
    if (volume.t <= 0 || volume.h <= 0 || volume.w <= 0 || volume.pixels.empty())
        throw IngestError("builtin_appearance: empty volume");

    const int hist_off = kThumb * kThumb;
    std::vector<double> acc(kBuiltinAppearanceDim, 0.0);
    std::array<double, kThumb * kThumb> thumb{};
    const double hist_norm = 3.0 * volume.h * volume.w;

    for (int f = 0; f < volume.t; ++f) {
        frame_thumbnail(volume, f, thumb.data());
        for (int i = 0; i < hist_off; ++i) acc[i] += thumb[i];
        for (int y = 0; y < volume.h; ++y) {
            for (int x = 0; x < volume.w; ++x) {
                for (int c = 0; c < 3; ++c) {
                    int bin = volume.at(f, y, x, c) >> 4;  // 0..255 -> 16 bins
                    acc[hist_off + c * kHistBins + bin] += 1.0 / hist_norm;
                }
            }
        }
    }

    std::vector<float> out(kBuiltinAppearanceDim);
    for (int i = 0; i < kBuiltinAppearanceDim; ++i) out[i] = static_cast<float>(acc[i] / volume.t);
    return out;
}

// --------------------------- EVF1 feature files ----------------------------

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr char kFeatureMagic[4] = {'E', 'V', 'F', '1'};
const char* kComponentNames[4] = {"app", "ang", "mag", "bkg"};

template <typename T>
T read_pod(std::FILE* f, const std::string& path) {
    T v{};
    if (std::fread(&v, sizeof(T), 1, f) != 1) throw FormatError("truncated feature file: " + path);
    return v;
}

template <typename T>
void write_pod(std::FILE* f, const T& v, const std::string& path) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw Error("short write: " + path);
}

std::string read_name(std::FILE* f, const std::string& path) {
    auto len = read_pod<std::uint32_t>(f, path);
    if (len > 64) throw FormatError("implausible component name length in " + path);
    std::string s(len, '\0');
    if (len && std::fread(s.data(), 1, len, f) != len) throw FormatError("truncated feature file: " + path);
    return s;
}

void write_name(std::FILE* f, const std::string& s, const std::string& path) {
    write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()), path);
    if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size()) throw Error("short write: " + path);
}

std::vector<float> read_payload(std::FILE* f, std::uint32_t dim, const std::string& path) {
    std::vector<float> v(dim);
    if (dim && std::fread(v.data(), sizeof(float), dim, f) != dim)
        throw FormatError("truncated feature record in " + path);
    for (float x : v)
        if (!std::isfinite(x)) throw FormatError("non-finite feature entry in " + path);
    return v;
}

}  // namespace

FeatureTable load_feature_file(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open feature file: " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, fp.get()) != 4 || std::memcmp(magic, kFeatureMagic, 4) != 0)
        throw FormatError("bad feature file magic in " + path);

    auto ncomp = read_pod<std::uint32_t>(fp.get(), path);
    if (ncomp != 4) throw FormatError("feature file must declare 4 components (app, ang, mag, bkg): " + path);

    FeatureTable table;
    std::uint32_t* dims[4] = {&table.dims.app, &table.dims.ang, &table.dims.mag, &table.dims.bkg};
    for (int i = 0; i < 4; ++i) {
        std::string name = read_name(fp.get(), path);
        if (name != kComponentNames[i])
            throw FormatError("unexpected component '" + name + "' (wanted '" + kComponentNames[i] + "') in " + path);
        *dims[i] = read_pod<std::uint32_t>(fp.get(), path);
        if (*dims[i] == 0) throw FormatError("zero-dimensional component '" + name + "' in " + path);
    }

    auto count = read_pod<std::uint64_t>(fp.get(), path);
    for (std::uint64_t r = 0; r < count; ++r) {
        auto region = read_pod<std::uint32_t>(fp.get(), path);
        auto frame_start = read_pod<std::uint64_t>(fp.get(), path);
        ImportedRecord rec;
        rec.app = read_payload(fp.get(), table.dims.app, path);
        rec.ang = read_payload(fp.get(), table.dims.ang, path);
        rec.mag = read_payload(fp.get(), table.dims.mag, path);
        rec.bkg = read_payload(fp.get(), table.dims.bkg, path);
        rec.cls = read_pod<std::uint8_t>(fp.get(), path);
        if (rec.cls > 1) throw FormatError("cls must be 0 or 1 in " + path);
        auto [it, inserted] = table.records.emplace(VolumeKey{region, frame_start}, std::move(rec));
        if (!inserted)
            throw FormatError("duplicate volume key (region " + std::to_string(region) + ", frame " +
                              std::to_string(frame_start) + ") in " + path);
    }
    return table;
}

void save_feature_file(const std::string& path, const FeatureTable& table) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    if (std::fwrite(kFeatureMagic, 1, 4, fp.get()) != 4) throw Error("short write: " + path);
    write_pod<std::uint32_t>(fp.get(), 4, path);
    const std::uint32_t dims[4] = {table.dims.app, table.dims.ang, table.dims.mag, table.dims.bkg};
    for (int i = 0; i < 4; ++i) {
        write_name(fp.get(), kComponentNames[i], path);
        write_pod<std::uint32_t>(fp.get(), dims[i], path);
    }
    write_pod<std::uint64_t>(fp.get(), table.records.size(), path);
    for (const auto& [key, rec] : table.records) {
        write_pod<std::uint32_t>(fp.get(), key.first, path);
        write_pod<std::uint64_t>(fp.get(), key.second, path);
        auto write_vec = [&](const std::vector<float>& v, std::uint32_t dim, const char* name) {
            if (v.size() != dim)
                throw Error(std::string("record component '") + name + "' dim mismatch while writing " + path);
            if (dim && std::fwrite(v.data(), sizeof(float), dim, fp.get()) != dim) throw Error("short write: " + path);
        };
        write_vec(rec.app, table.dims.app, "app");
        write_vec(rec.ang, table.dims.ang, "ang");
        write_vec(rec.mag, table.dims.mag, "mag");
        write_vec(rec.bkg, table.dims.bkg, "bkg");
        write_pod<std::uint8_t>(fp.get(), rec.cls, path);
    }
}

}  // namespace valo
