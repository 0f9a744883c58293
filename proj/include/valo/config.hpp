#pragma once

#include <cstdint>
#include <string>

#include "valo/flow.hpp"

namespace valo {

// Declarative pipeline configuration. One TOML-style file holds geometry,
// thresholds and seeds; CLI flags override individual values; the effective
// config is echoed into every output for provenance.
struct Config {
    // [grid]
    int region_size = 32;     // h = w, even
    int temporal_extent = 10;  // t

    // [model]
    float exemplar_threshold = 1.5f;
    double sentinel_score = 10.0;

    // [motion]
    double th_mot = 1.0;
    double th_bkg = 0.99;

    // [detect]
    double ncc_min = 0.995;
    bool skip_unchanged = true;
    double decision_threshold = 1.8;
    double heatmap_scale = 4.0;

    // [calibration]
    std::uint64_t seed = 1;
    std::uint64_t pair_cap = 2000;

    // [eval]
    double iou_min = 0.1;
    double track_fraction = 0.1;
    std::uint64_t max_thresholds = 1000;

    // [runtime]
    unsigned workers = 0;  // 0 = available cores

    // [flow]
    FlowEstimatorParams flow;

    bool operator==(const Config&) const = default;

    void validate() const;  // throws ConfigError
};

Config load_config(const std::string& path);

// Parses TOML text (subset: [section], key = value, # comments).
Config parse_config(const std::string& text, const std::string& origin = "<config>");

// Canonical TOML rendering of the effective config.
std::string config_echo(const Config& cfg);

}  // namespace valo
