#include "valo/features.hpp"

#include <cmath>
#include <random>

#include "valo/common.hpp"

namespace valo {

namespace {

void check_finite(const std::vector<float>& v, const char* name) {
    for (float x : v)
        if (!std::isfinite(x)) throw IngestError(std::string("non-finite entry in feature component '") + name + "'");
}

}  // namespace

FeatureVector assemble_feature(const std::vector<float>& appearance, const MotionAttributes& motion) {
    FeatureVector f;
    f.app = appearance;
    check_finite(f.app, "app");
    f.cls = motion.cls ? 1 : 0;
    f.ang.assign(kDirectionBins, 0.f);
    f.mag.assign(kDirectionBins, 0.f);
    f.bkg.assign(1, 0.f);
    if (!motion.cls) {
        for (int i = 0; i < kDirectionBins; ++i) {
            f.ang[i] = static_cast<float>(motion.ang[i]);
            f.mag[i] = static_cast<float>(motion.mag[i]);
        }
        f.bkg[0] = static_cast<float>(motion.bkg);
    }
    return f;
}

FeatureVector assemble_feature(const ImportedRecord& record) {
    FeatureVector f;
    f.app = record.app;
    f.cls = record.cls;
    check_finite(f.app, "app");
    if (record.cls) {
        f.ang.assign(record.ang.size(), 0.f);
        f.mag.assign(record.mag.size(), 0.f);
        f.bkg.assign(record.bkg.size(), 0.f);
    } else {
        f.ang = record.ang;
        f.mag = record.mag;
        f.bkg = record.bkg;
        check_finite(f.ang, "ang");
        check_finite(f.mag, "mag");
        check_finite(f.bkg, "bkg");
    }
    return f;
}

double component_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw IngestError("component dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::array<double, 4> feature_distance_terms(const FeatureVector& f1, const FeatureVector& f2, const Normalizers& z) {
    if (z.z_app <= 0 || z.z_ang <= 0 || z.z_mag <= 0 || z.z_bkg <= 0)
        throw ConfigError("normalizers must be positive");
    return {component_distance(f1.app, f2.app) / z.z_app, component_distance(f1.ang, f2.ang) / z.z_ang,
            component_distance(f1.mag, f2.mag) / z.z_mag, component_distance(f1.bkg, f2.bkg) / z.z_bkg};
}

double feature_distance(const FeatureVector& f1, const FeatureVector& f2, const Normalizers& z) {
    auto terms = feature_distance_terms(f1, f2, z);
    return terms[0] + terms[1] + terms[2] + terms[3];
}

Normalizers calibrate_normalizers(const std::vector<FeatureVector>& features, const CalibrationParams& params) {
    const std::size_t n = features.size();
    if (n < 2) throw IngestError("calibration needs at least 2 feature vectors, got " + std::to_string(n));
    const ComponentDims dims = features.front().dims();
    for (const auto& f : features)
        if (!(f.dims() == dims)) throw IngestError("calibration set has inconsistent component dims");

    double zmax[4] = {0, 0, 0, 0};
    auto consider = [&](const FeatureVector& a, const FeatureVector& b) {
        double d;
        d = component_distance(a.app, b.app);
        if (d > zmax[0]) zmax[0] = d;
        d = component_distance(a.ang, b.ang);
        if (d > zmax[1]) zmax[1] = d;
        d = component_distance(a.mag, b.mag);
        if (d > zmax[2]) zmax[2] = d;
        d = component_distance(a.bkg, b.bkg);
        if (d > zmax[3]) zmax[3] = d;
    };

    if (n <= params.pair_cap) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) consider(features[i], features[j]);
    } else {
        // fixed-seed sampling keeps calibration O(cap^2) and reproducible
        std::mt19937_64 rng(params.seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        const std::size_t samples = params.pair_cap * params.pair_cap;
        for (std::size_t s = 0; s < samples; ++s) {
            std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            while (j == i) j = pick(rng);
            consider(features[i], features[j]);
        }
    }

    Normalizers z;
    z.z_app = zmax[0] > 0 ? static_cast<float>(zmax[0]) : 1.f;
    z.z_ang = zmax[1] > 0 ? static_cast<float>(zmax[1]) : 1.f;
    z.z_mag = zmax[2] > 0 ? static_cast<float>(zmax[2]) : 1.f;
    z.z_bkg = zmax[3] > 0 ? static_cast<float>(zmax[3]) : 1.f;
    return z;
}

}  // namespace valo
