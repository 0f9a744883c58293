#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "valo/common.hpp"
#include "valo/features.hpp"

using namespace valo;

namespace {

// 1-d components make distances easy to stage by hand
FeatureVector scalar_feature(float app, float ang, float mag, float bkg, std::uint8_t cls = 0) {
    FeatureVector f;
    f.app = {app};
    f.ang = {ang};
    f.mag = {mag};
    f.bkg = {bkg};
    f.cls = cls;
    return f;
}

FeatureVector random_feature(std::mt19937_64& rng) {
    std::uniform_real_distribution<float> val(-3.f, 3.f);
    FeatureVector f;
    f.app.resize(6);
    f.ang.resize(4);
    f.mag.resize(4);
    f.bkg.resize(1);
    for (auto& v : f.app) v = val(rng);
    for (auto& v : f.ang) v = val(rng);
    for (auto& v : f.mag) v = val(rng);
    for (auto& v : f.bkg) v = val(rng);
    return f;
}

}  // namespace

TEST_CASE("assembly zeroes motion components for background volumes") {
    MotionAttributes motion;
    motion.ang[3] = 0.4;
    motion.mag[3] = 2.5;
    motion.bkg = 0.995;
    motion.cls = true;
    FeatureVector f = assemble_feature(std::vector<float>{1.f, 2.f}, motion);
    CHECK(f.cls == 1);
    for (float v : f.ang) CHECK(v == 0.f);
    for (float v : f.mag) CHECK(v == 0.f);
    CHECK(f.bkg[0] == 0.f);
}

TEST_CASE("assembly passes moving-volume components through verbatim") {
    MotionAttributes motion;
    motion.ang[0] = 0.5;
    motion.mag[0] = 2.0;
    motion.bkg = 0.5;
    motion.cls = false;
    FeatureVector f = assemble_feature(std::vector<float>{1.f}, motion);
    CHECK(f.ang[0] == 0.5f);
    CHECK(f.mag[0] == 2.0f);
    CHECK(f.bkg[0] == 0.5f);
}

TEST_CASE("non-finite appearance entries are rejected at assembly") {
    MotionAttributes motion;
    CHECK_THROWS_AS(assemble_feature(std::vector<float>{std::numeric_limits<float>::quiet_NaN()}, motion),
                    IngestError);
}

TEST_CASE("imported assembly honors the zeroing rule") {
    ImportedRecord rec;
    rec.app = {1.f};
    rec.ang = {0.7f, 0.1f};
    rec.mag = {3.f, 0.f};
    rec.bkg = {0.2f};
    rec.cls = 1;
    FeatureVector f = assemble_feature(rec);
    for (float v : f.ang) CHECK(v == 0.f);
    for (float v : f.mag) CHECK(v == 0.f);
    CHECK(f.bkg[0] == 0.f);
    rec.cls = 0;
    f = assemble_feature(rec);
    CHECK(f.ang[0] == 0.7f);
}

TEST_CASE("component distance basics") {
    std::vector<float> a{1.f, 0.f}, b{0.f, 1.f};
    CHECK(component_distance(a, a) == 0.0);
    CHECK(component_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    std::vector<float> c{3.f, 4.f}, d{0.f, 0.f};
    CHECK(component_distance(c, d) == doctest::Approx(5.0).epsilon(1e-12));
    std::vector<float> e{1.f};
    CHECK_THROWS_AS(component_distance(a, e), IngestError);
}

TEST_CASE("feature distance is zero on identical features") {
    FeatureVector f = scalar_feature(1.f, 2.f, 3.f, 4.f);
    CHECK(feature_distance(f, f, {}) == 0.0);
}

TEST_CASE("component distances equal to their normalizers sum to 4") {
    FeatureVector f1 = scalar_feature(0.f, 0.f, 0.f, 0.f);
    FeatureVector f2 = scalar_feature(2.f, 1.f, 3.f, 0.5f);
    Normalizers z{2.f, 1.f, 3.f, 0.5f};
    CHECK(feature_distance(f1, f2, z) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("doubling every normalizer halves the distance") {
    std::mt19937_64 rng(5);
    FeatureVector f1 = random_feature(rng), f2 = random_feature(rng);
    Normalizers z{1.5f, 2.f, 0.5f, 3.f};
    Normalizers z2{3.f, 4.f, 1.f, 6.f};
    CHECK(feature_distance(f1, f2, z2) == doctest::Approx(feature_distance(f1, f2, z) / 2.0).epsilon(1e-12));
}

TEST_CASE("feature distance is a pseudometric on random triples") {
    std::mt19937_64 rng(11);
    Normalizers z{1.3f, 0.7f, 2.1f, 0.4f};
    for (int trial = 0; trial < 1000; ++trial) {
        FeatureVector a = random_feature(rng), b = random_feature(rng), c = random_feature(rng);
        double ab = feature_distance(a, b, z);
        double ba = feature_distance(b, a, z);
        CHECK(ab == ba);
        CHECK(feature_distance(a, a, z) == 0.0);
        double ac = feature_distance(a, c, z);
        double cb = feature_distance(c, b, z);
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("two background features with equal appearance are at distance zero") {
    ImportedRecord rec;
    rec.app = {1.f, 2.f};
    rec.ang = {0.9f, 0.f};
    rec.mag = {5.f, 1.f};
    rec.bkg = {0.3f};
    rec.cls = 1;
    FeatureVector f1 = assemble_feature(rec);
    rec.ang = {0.1f, 0.7f};  // different motion input, same zeroing
    rec.mag = {0.f, 8.f};
    FeatureVector f2 = assemble_feature(rec);
    Normalizers z{2.f, 2.f, 2.f, 2.f};
    CHECK(feature_distance(f1, f2, z) == 0.0);
    f2.app = {1.f, 3.f};
    CHECK(feature_distance(f1, f2, z) == doctest::Approx(1.0 / 2.0).epsilon(1e-12));
}

TEST_CASE("calibration on a single pair returns that pair's distances") {
    FeatureVector f1 = scalar_feature(0.f, 0.f, 0.f, 0.f);
    FeatureVector f2 = scalar_feature(2.f, 1.f, 3.f, 0.5f);
    Normalizers z = calibrate_normalizers({f1, f2});
    CHECK(z.z_app == 2.f);
    CHECK(z.z_ang == 1.f);
    CHECK(z.z_mag == 3.f);
    CHECK(z.z_bkg == 0.5f);
}

TEST_CASE("calibration on identical features falls back to unit normalizers") {
    FeatureVector f = scalar_feature(1.f, 1.f, 1.f, 1.f);
    Normalizers z = calibrate_normalizers({f, f, f});
    CHECK(z == Normalizers{1.f, 1.f, 1.f, 1.f});
}

TEST_CASE("duplicating a feature never changes the calibration") {
    std::mt19937_64 rng(17);
    std::vector<FeatureVector> set;
    for (int i = 0; i < 8; ++i) set.push_back(random_feature(rng));
    Normalizers base = calibrate_normalizers(set);
    set.push_back(set.front());
    CHECK(calibrate_normalizers(set) == base);
}

TEST_CASE("calibration on a superset dominates the subset in the all-pairs regime") {
    std::mt19937_64 rng(23);
    std::vector<FeatureVector> subset;
    for (int i = 0; i < 10; ++i) subset.push_back(random_feature(rng));
    std::vector<FeatureVector> superset = subset;
    for (int i = 0; i < 10; ++i) superset.push_back(random_feature(rng));
    Normalizers zs = calibrate_normalizers(subset);
    Normalizers zl = calibrate_normalizers(superset);
    CHECK(zl.z_app >= zs.z_app);
    CHECK(zl.z_ang >= zs.z_ang);
    CHECK(zl.z_mag >= zs.z_mag);
    CHECK(zl.z_bkg >= zs.z_bkg);
}

TEST_CASE("calibration requires at least two features") {
    CHECK_THROWS_AS(calibrate_normalizers({}), IngestError);
    CHECK_THROWS_AS(calibrate_normalizers({scalar_feature(1, 1, 1, 1)}), IngestError);
}

TEST_CASE("sampled calibration is reproducible for a fixed seed") {
    std::mt19937_64 rng(29);
    std::vector<FeatureVector> set;
    for (int i = 0; i < 40; ++i) set.push_back(random_feature(rng));
    CalibrationParams params;
    params.pair_cap = 10;  // force the sampling path
    params.seed = 77;
    Normalizers a = calibrate_normalizers(set, params);
    Normalizers b = calibrate_normalizers(set, params);
    CHECK(a == b);
}
