#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "valo/attributes.hpp"

namespace valo {

// Combined per-volume descriptor F = [app; ang; mag; bkg; cls] with the
// component structure preserved. When cls == 1 the motion components are
// all-zero by construction.
struct FeatureVector {
    std::vector<float> app, ang, mag, bkg;
    std::uint8_t cls = 0;

    bool operator==(const FeatureVector&) const = default;
    ComponentDims dims() const {
        return ComponentDims{static_cast<std::uint32_t>(app.size()), static_cast<std::uint32_t>(ang.size()),
                             static_cast<std::uint32_t>(mag.size()), static_cast<std::uint32_t>(bkg.size())};
    }
};

// Per-component scale constants making each distance term approximately <= 1.
struct Normalizers {
    float z_app = 1.f;
    float z_ang = 1.f;
    float z_mag = 1.f;
    float z_bkg = 1.f;

    bool operator==(const Normalizers&) const = default;
};

// Builds a feature from the builtin analytic attributes: component dims
// (d_app=112, d_ang=12, d_mag=12, d_bkg=1).
FeatureVector assemble_feature(const std::vector<float>& appearance, const MotionAttributes& motion);

// Builds a feature from imported component vectors. Motion components are
// zeroed when cls == 1 regardless of the input values.
FeatureVector assemble_feature(const ImportedRecord& record);

// L2 distance between corresponding component vectors.
double component_distance(std::span<const float> a, std::span<const float> b);

// Normalized combined distance:
//   d(F1,F2) = d_app/Z_app + d_ang/Z_ang + d_bkg/Z_bkg + d_mag/Z_mag.
// cls participates only through the zeroing rule applied at assembly.
double feature_distance(const FeatureVector& f1, const FeatureVector& f2, const Normalizers& z);

// The four addends of the combined distance, in (app, ang, mag, bkg) order.
std::array<double, 4> feature_distance_terms(const FeatureVector& f1, const FeatureVector& f2, const Normalizers& z);

struct CalibrationParams {
    std::size_t pair_cap = 2000;  // all pairs when n <= cap, else cap^2 sampled pairs
    std::uint64_t seed = 1;
};

// Z_A = max component distance over the sampled pairs; a component whose max
// would be 0 gets Z = 1.
Normalizers calibrate_normalizers(const std::vector<FeatureVector>& features, const CalibrationParams& params = {});

}  // namespace valo
