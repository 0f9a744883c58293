#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "valo/flow.hpp"
#include "valo/ingest.hpp"

namespace valo {

// Thresholds for classifying pixels/volumes as stationary.
struct FlowThresholds {
    double th_mot = 1.0;   // px/frame; below this a pixel counts as stationary
    double th_bkg = 0.99;  // stationary fraction at/above which a volume is background

    bool operator==(const FlowThresholds&) const = default;
};

// High-level motion attributes of one spatio-temporal volume.
//
// ang[i] holds the fraction of pixels moving with orientation in
// [i*pi/6, (i+1)*pi/6), mag[i] the mean flow magnitude of those pixels,
// bkg the stationary-pixel fraction. sum(ang) + bkg == 1.
struct MotionAttributes {
    std::array<double, 12> ang{};
    std::array<double, 12> mag{};
    double bkg = 0.0;
    bool cls = false;  // true: background volume (bkg >= th_bkg)
};

inline constexpr int kDirectionBins = 12;

// Maps a flow vector to its orientation bin, or -1 when its magnitude is
// below th_mot. Angle convention: atan2(v, u) with y pointing down,
// normalized to [0, 2*pi).
int direction_bin(double u, double v, double th_mot);

// Pools all pixels of all t-1 cropped flow fields as one population.
MotionAttributes compute_motion_attributes(const std::vector<FlowField>& flow_volume, const FlowThresholds& th);

inline constexpr int kBuiltinAppearanceDim = 112;

// Baseline appearance descriptor: per frame, an L2-normalized 8x8 grayscale
// thumbnail concatenated with an L1-normalized 3x16-bin color histogram,
// averaged over the volume's frames. Stands in for a learned embedding.
std::vector<float> builtin_appearance(const VideoVolume& volume);

// ---------------------------------------------------------------------------
// Imported features ("EVF1" file): externally computed per-volume component
// vectors, keyed by (region_index, frame_start). Binary little-endian.
//
//   magic "EVF1"
//   u32 component count (4)
//   per component: u32 name length, name bytes ("app","ang","mag","bkg"),
//                  u32 dim
//   u64 record count
//   record: u32 region_index, u64 frame_start,
//           f32 payload per component in header order, u8 cls
// ---------------------------------------------------------------------------

struct ComponentDims {
    std::uint32_t app = 0;
    std::uint32_t ang = 0;
    std::uint32_t mag = 0;
    std::uint32_t bkg = 0;

    bool operator==(const ComponentDims&) const = default;
    std::uint32_t combined() const { return app + ang + mag + bkg + 1; }  // + cls
};

struct ImportedRecord {
    std::vector<float> app, ang, mag, bkg;
    std::uint8_t cls = 0;
};

using VolumeKey = std::pair<std::uint32_t, std::uint64_t>;  // (region_index, frame_start)

struct FeatureTable {
    ComponentDims dims;
    std::map<VolumeKey, ImportedRecord> records;
};

FeatureTable load_feature_file(const std::string& path);
void save_feature_file(const std::string& path, const FeatureTable& table);

}  // namespace valo
