#include "valo/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "valo/common.hpp"

namespace valo {

bool offer_exemplar(RegionModel& rm, FeatureVector feature, const Provenance& prov, double th, const Normalizers& z) {
    for (const FeatureVector& ex : rm.exemplars) {
        if (feature_distance(feature, ex, z) <= th) return false;
    }
    rm.exemplars.push_back(std::move(feature));
    rm.provenance.push_back(prov);
    return true;
}

RegionModel select_exemplars(std::uint32_t region_index, const std::vector<FeatureVector>& stream, double th,
                             const Normalizers& z, std::uint32_t video, std::int64_t t) {
    RegionModel rm;
    rm.region_index = region_index;
    for (std::size_t i = 0; i < stream.size(); ++i)
        offer_exemplar(rm, stream[i], Provenance{video, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(t)},
                       th, z);
    return rm;
}

SceneModel make_scene_model(const RegionGrid& grid, std::uint32_t t, float th, const Normalizers& z,
                            const ComponentDims& dims, FeatureSource source, const FlowThresholds& flow_th) {
    SceneModel model;
    model.grid = grid;
    model.t = t;
    model.th = th;
    model.z = z;
    model.dims = dims;
    model.source = source;
    model.flow_th = flow_th;
    model.regions.resize(static_cast<std::size_t>(grid.region_count()));
    for (int r = 0; r < grid.region_count(); ++r) model.regions[static_cast<std::size_t>(r)].region_index = static_cast<std::uint32_t>(r);
    return model;
}

void append_video(SceneModel& model, const std::string& video_id, std::size_t window_count,
                  const std::function<FeatureVector(std::uint32_t region, std::int64_t frame_start)>& provider,
                  unsigned workers) {
    const std::size_t n_regions = model.regions.size();
    const auto video_idx = static_cast<std::uint32_t>(model.video_ids.size());
    model.video_ids.push_back(video_id);

    std::vector<FeatureVector> window_features(n_regions);
    for (std::size_t wnd = 0; wnd < window_count; ++wnd) {
        const std::int64_t frame_start = static_cast<std::int64_t>(wnd) * model.t;
        parallel_for(n_regions, workers, [&](std::size_t r) {
            window_features[r] = provider(static_cast<std::uint32_t>(r), frame_start);
        });
        for (std::size_t r = 0; r < n_regions; ++r) {
            if (!(window_features[r].dims() == model.dims))
                throw IngestError("feature dims differ from the model's declared dims (region " + std::to_string(r) + ")");
            offer_exemplar(model.regions[r], std::move(window_features[r]),
                           Provenance{video_idx, static_cast<std::uint64_t>(frame_start)}, model.th, model.z);
        }
    }
}

// ------------------------------ serialization -------------------------------

namespace {

constexpr char kModelMagic[4] = {'E', 'V', 'M', '1'};
constexpr std::uint32_t kModelVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void put(std::FILE* f, const T& v, const std::string& path) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw Error("short write: " + path);
}

template <typename T>
T get(std::FILE* f, const std::string& path) {
    T v{};
    if (std::fread(&v, sizeof(T), 1, f) != 1) throw FormatError("truncated model file: " + path);
    return v;
}

void put_string(std::FILE* f, const std::string& s, const std::string& path) {
    put<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()), path);
    if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size()) throw Error("short write: " + path);
}

std::string get_string(std::FILE* f, const std::string& path) {
    auto len = get<std::uint32_t>(f, path);
    if (len > (1u << 24)) throw FormatError("implausible string length in model file: " + path);
    std::string s(len, '\0');
    if (len && std::fread(s.data(), 1, len, f) != len) throw FormatError("truncated model file: " + path);
    return s;
}

void put_floats(std::FILE* f, const std::vector<float>& v, std::uint32_t dim, const std::string& path) {
    if (v.size() != dim) throw Error("component dim mismatch while writing model: " + path);
    if (dim && std::fwrite(v.data(), sizeof(float), dim, f) != dim) throw Error("short write: " + path);
}

std::vector<float> get_floats(std::FILE* f, std::uint32_t dim, const std::string& path) {
    std::vector<float> v(dim);
    if (dim && std::fread(v.data(), sizeof(float), dim, f) != dim) throw FormatError("truncated model file: " + path);
    return v;
}

}  // namespace

void save_model(const std::string& path, const SceneModel& model) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    std::FILE* f = fp.get();

    if (std::fwrite(kModelMagic, 1, 4, f) != 4) throw Error("short write: " + path);
    put<std::uint32_t>(f, kModelVersion, path);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.grid.frame_h), path);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.grid.frame_w), path);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.grid.region_h), path);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.grid.region_w), path);
    put<std::uint32_t>(f, model.t, path);
    put<float>(f, model.th, path);
    put<float>(f, model.z.z_app, path);
    put<float>(f, model.z.z_ang, path);
    put<float>(f, model.z.z_mag, path);
    put<float>(f, model.z.z_bkg, path);
    put<std::uint32_t>(f, model.dims.app, path);
    put<std::uint32_t>(f, model.dims.ang, path);
    put<std::uint32_t>(f, model.dims.mag, path);
    put<std::uint32_t>(f, model.dims.bkg, path);
    put<std::uint8_t>(f, static_cast<std::uint8_t>(model.source), path);
    put<double>(f, model.flow_th.th_mot, path);
    put<double>(f, model.flow_th.th_bkg, path);

    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.video_ids.size()), path);
    for (const auto& id : model.video_ids) put_string(f, id, path);
    put_string(f, model.config_echo, path);

    put<std::uint32_t>(f, static_cast<std::uint32_t>(model.regions.size()), path);
    for (const RegionModel& rm : model.regions) {
        put<std::uint32_t>(f, rm.region_index, path);
        put<std::uint32_t>(f, static_cast<std::uint32_t>(rm.exemplars.size()), path);
        for (std::size_t i = 0; i < rm.exemplars.size(); ++i) {
            const FeatureVector& ex = rm.exemplars[i];
            put<std::uint32_t>(f, rm.provenance[i].video, path);
            put<std::uint64_t>(f, rm.provenance[i].frame_start, path);
            put<std::uint8_t>(f, ex.cls, path);
            put_floats(f, ex.app, model.dims.app, path);
            put_floats(f, ex.ang, model.dims.ang, path);
            put_floats(f, ex.mag, model.dims.mag, path);
            put_floats(f, ex.bkg, model.dims.bkg, path);
        }
    }
}

SceneModel load_model(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open model file: " + path);
    std::FILE* f = fp.get();

    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kModelMagic, 4) != 0)
        throw FormatError("bad model file magic in " + path);
    auto version = get<std::uint32_t>(f, path);
    if (version != kModelVersion)
        throw FormatError("model file version " + std::to_string(version) + " unsupported (this build reads version " +
                          std::to_string(kModelVersion) + "): " + path);

    auto frame_h = get<std::uint32_t>(f, path);
    auto frame_w = get<std::uint32_t>(f, path);
    auto region_h = get<std::uint32_t>(f, path);
    auto region_w = get<std::uint32_t>(f, path);

    SceneModel model;
    model.grid = build_region_grid(static_cast<int>(frame_h), static_cast<int>(frame_w), static_cast<int>(region_h),
                                   static_cast<int>(region_w));
    model.t = get<std::uint32_t>(f, path);
    model.th = get<float>(f, path);
    model.z.z_app = get<float>(f, path);
    model.z.z_ang = get<float>(f, path);
    model.z.z_mag = get<float>(f, path);
    model.z.z_bkg = get<float>(f, path);
    model.dims.app = get<std::uint32_t>(f, path);
    model.dims.ang = get<std::uint32_t>(f, path);
    model.dims.mag = get<std::uint32_t>(f, path);
    model.dims.bkg = get<std::uint32_t>(f, path);
    auto source = get<std::uint8_t>(f, path);
    if (source > 1) throw FormatError("unknown feature source tag in " + path);
    model.source = static_cast<FeatureSource>(source);
    model.flow_th.th_mot = get<double>(f, path);
    model.flow_th.th_bkg = get<double>(f, path);

    auto n_videos = get<std::uint32_t>(f, path);
    model.video_ids.reserve(n_videos);
    for (std::uint32_t i = 0; i < n_videos; ++i) model.video_ids.push_back(get_string(f, path));
    model.config_echo = get_string(f, path);

    auto n_regions = get<std::uint32_t>(f, path);
    if (n_regions != static_cast<std::uint32_t>(model.grid.region_count()))
        throw FormatError("region count does not match the grid geometry in " + path);
    model.regions.resize(n_regions);
    for (std::uint32_t r = 0; r < n_regions; ++r) {
        RegionModel& rm = model.regions[r];
        rm.region_index = get<std::uint32_t>(f, path);
        auto n_ex = get<std::uint32_t>(f, path);
        rm.exemplars.reserve(n_ex);
        rm.provenance.reserve(n_ex);
        for (std::uint32_t e = 0; e < n_ex; ++e) {
            Provenance prov;
            prov.video = get<std::uint32_t>(f, path);
            prov.frame_start = get<std::uint64_t>(f, path);
            if (prov.video >= model.video_ids.size() && n_videos > 0)
                throw FormatError("exemplar provenance references unknown video in " + path);
            FeatureVector ex;
            ex.cls = get<std::uint8_t>(f, path);
            ex.app = get_floats(f, model.dims.app, path);
            ex.ang = get_floats(f, model.dims.ang, path);
            ex.mag = get_floats(f, model.dims.mag, path);
            ex.bkg = get_floats(f, model.dims.bkg, path);
            rm.provenance.push_back(prov);
            rm.exemplars.push_back(std::move(ex));
        }
    }
    return model;
}

}  // namespace valo
