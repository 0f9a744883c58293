#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "valo/features.hpp"
#include "valo/ingest.hpp"

namespace valo {

enum class FeatureSource : std::uint8_t { Builtin = 0, Imported = 1 };

struct Provenance {
    std::uint32_t video = 0;  // index into SceneModel::video_ids
    std::uint64_t frame_start = 0;

    bool operator==(const Provenance&) const = default;
};

// Exemplar set of one spatial region. Invariant: pairwise feature_distance
// between stored exemplars > th under the model's normalizers.
struct RegionModel {
    std::uint32_t region_index = 0;
    std::vector<FeatureVector> exemplars;  // in selection order
    std::vector<Provenance> provenance;    // parallel to exemplars

    bool operator==(const RegionModel&) const = default;
};

// Greedy selection step: keeps the candidate iff its distance to every
// stored exemplar exceeds th (the first candidate is always kept).
// Returns true when the candidate was added.
bool offer_exemplar(RegionModel& rm, FeatureVector feature, const Provenance& prov, double th, const Normalizers& z);

// Runs the greedy selection over an ordered stream. An empty stream yields a
// valid zero-exemplar region (never observed).
RegionModel select_exemplars(std::uint32_t region_index, const std::vector<FeatureVector>& stream, double th,
                             const Normalizers& z, std::uint32_t video = 0, std::int64_t t = 1);

// The learned location-dependent model of one scene.
struct SceneModel {
    RegionGrid grid;
    std::uint32_t t = 10;
    float th = 1.5f;
    Normalizers z;
    ComponentDims dims;
    FeatureSource source = FeatureSource::Builtin;
    FlowThresholds flow_th;  // attribute semantics travel with the model
    std::vector<std::string> video_ids;
    std::vector<RegionModel> regions;  // one per grid region, index order
    std::string config_echo;

    bool operator==(const SceneModel&) const = default;

    std::size_t exemplar_count() const {
        std::size_t n = 0;
        for (const auto& r : regions) n += r.exemplars.size();
        return n;
    }
};

SceneModel make_scene_model(const RegionGrid& grid, std::uint32_t t, float th, const Normalizers& z,
                            const ComponentDims& dims, FeatureSource source, const FlowThresholds& flow_th);

// Streams one video's volume features through the per-region selectors, in
// ingest order (windows ascending, regions ascending). `provider` must be
// pure; features of one window are computed in parallel, selection itself is
// sequential per region.
void append_video(SceneModel& model, const std::string& video_id, std::size_t window_count,
                  const std::function<FeatureVector(std::uint32_t region, std::int64_t frame_start)>& provider,
                  unsigned workers = 0);

// Binary model file ("EVM1", little-endian, versioned). Round-trip is
// bit-exact on all floats.
void save_model(const std::string& path, const SceneModel& model);
SceneModel load_model(const std::string& path);

}  // namespace valo
