#include "valo/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "valo/common.hpp"

namespace valo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Setter {
    Config* cfg;
    std::string origin;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(origin + ": " + what); }

    double num(const std::string& key, const std::string& value) const {
        try {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) fail("not a number for '" + key + "': " + value);
            return v;
        } catch (const std::exception&) {
            fail("not a number for '" + key + "': " + value);
        }
    }

    bool boolean(const std::string& key, const std::string& value) const {
        if (value == "true") return true;
        if (value == "false") return false;
        fail("not a boolean for '" + key + "': " + value);
    }

    void apply(const std::string& section, const std::string& key, const std::string& value) const {
        Config& c = *cfg;
        if (section == "grid") {
            if (key == "region_size") c.region_size = static_cast<int>(num(key, value));
            else if (key == "temporal_extent") c.temporal_extent = static_cast<int>(num(key, value));
            else fail("unknown key '" + key + "' in [grid]");
        } else if (section == "model") {
            if (key == "exemplar_threshold") c.exemplar_threshold = static_cast<float>(num(key, value));
            else if (key == "sentinel_score") c.sentinel_score = num(key, value);
            else fail("unknown key '" + key + "' in [model]");
        } else if (section == "motion") {
            if (key == "th_mot") c.th_mot = num(key, value);
            else if (key == "th_bkg") c.th_bkg = num(key, value);
            else fail("unknown key '" + key + "' in [motion]");
        } else if (section == "detect") {
            if (key == "ncc_min") c.ncc_min = num(key, value);
            else if (key == "skip") c.skip_unchanged = boolean(key, value);
            else if (key == "decision_threshold") c.decision_threshold = num(key, value);
            else if (key == "heatmap_scale") c.heatmap_scale = num(key, value);
            else fail("unknown key '" + key + "' in [detect]");
        } else if (section == "calibration") {
            if (key == "seed") c.seed = static_cast<std::uint64_t>(num(key, value));
            else if (key == "pair_cap") c.pair_cap = static_cast<std::uint64_t>(num(key, value));
            else fail("unknown key '" + key + "' in [calibration]");
        } else if (section == "eval") {
            if (key == "iou_min") c.iou_min = num(key, value);
            else if (key == "track_fraction") c.track_fraction = num(key, value);
            else if (key == "max_thresholds") c.max_thresholds = static_cast<std::uint64_t>(num(key, value));
            else fail("unknown key '" + key + "' in [eval]");
        } else if (section == "runtime") {
            if (key == "workers") c.workers = static_cast<unsigned>(num(key, value));
            else fail("unknown key '" + key + "' in [runtime]");
        } else if (section == "flow") {
            if (key == "levels") c.flow.pyramid_levels = static_cast<int>(num(key, value));
            else if (key == "iterations") c.flow.iterations = static_cast<int>(num(key, value));
            else if (key == "warps") c.flow.warps_per_level = static_cast<int>(num(key, value));
            else if (key == "alpha") c.flow.alpha = static_cast<float>(num(key, value));
            else fail("unknown key '" + key + "' in [flow]");
        } else {
            fail("unknown section [" + section + "]");
        }
    }
};

}  // namespace

void Config::validate() const {
    if (region_size <= 0 || region_size % 2 != 0)
        throw ConfigError("region_size must be a positive even number, got " + std::to_string(region_size));
    if (temporal_extent <= 0) throw ConfigError("temporal_extent must be positive");
    if (exemplar_threshold < 0) throw ConfigError("exemplar_threshold must be non-negative");
    if (sentinel_score <= 0) throw ConfigError("sentinel_score must be positive");
    if (th_mot <= 0) throw ConfigError("th_mot must be positive");
    if (th_bkg <= 0 || th_bkg > 1) throw ConfigError("th_bkg must lie in (0, 1]");
    if (ncc_min <= 0 || ncc_min > 1) throw ConfigError("ncc_min must lie in (0, 1]");
    if (pair_cap < 2) throw ConfigError("pair_cap must be at least 2");
    if (iou_min <= 0 || iou_min > 1) throw ConfigError("iou_min must lie in (0, 1]");
    if (track_fraction <= 0 || track_fraction > 1) throw ConfigError("track_fraction must lie in (0, 1]");
    if (max_thresholds == 0) throw ConfigError("max_thresholds must be positive");
    if (heatmap_scale <= 0) throw ConfigError("heatmap_scale must be positive");
    if (flow.pyramid_levels < 1 || flow.iterations < 1 || flow.warps_per_level < 1 || flow.alpha <= 0)
        throw ConfigError("flow estimator parameters must be positive");
}

Config parse_config(const std::string& text, const std::string& origin) {
    Config cfg;
    Setter setter{&cfg, origin};
    std::istringstream in(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (section.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any [section]");
        setter.apply(section, key, value);
    }
    cfg.validate();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string config_echo(const Config& cfg) {
    char buf[2048];
    std::snprintf(buf, sizeof(buf),
                  "[grid]\n"
                  "region_size = %d\n"
                  "temporal_extent = %d\n"
                  "\n[model]\n"
                  "exemplar_threshold = %.9g\n"
                  "sentinel_score = %.9g\n"
                  "\n[motion]\n"
                  "th_mot = %.9g\n"
                  "th_bkg = %.9g\n"
                  "\n[detect]\n"
                  "ncc_min = %.9g\n"
                  "skip = %s\n"
                  "decision_threshold = %.9g\n"
                  "heatmap_scale = %.9g\n"
                  "\n[calibration]\n"
                  "seed = %llu\n"
                  "pair_cap = %llu\n"
                  "\n[eval]\n"
                  "iou_min = %.9g\n"
                  "track_fraction = %.9g\n"
                  "max_thresholds = %llu\n"
                  "\n[runtime]\n"
                  "workers = %u\n"
                  "\n[flow]\n"
                  "levels = %d\n"
                  "iterations = %d\n"
                  "warps = %d\n"
                  "alpha = %.9g\n",
                  cfg.region_size, cfg.temporal_extent, static_cast<double>(cfg.exemplar_threshold), cfg.sentinel_score,
                  cfg.th_mot, cfg.th_bkg, cfg.ncc_min, cfg.skip_unchanged ? "true" : "false", cfg.decision_threshold,
                  cfg.heatmap_scale, static_cast<unsigned long long>(cfg.seed),
                  static_cast<unsigned long long>(cfg.pair_cap), cfg.iou_min, cfg.track_fraction,
                  static_cast<unsigned long long>(cfg.max_thresholds), cfg.workers, cfg.flow.pyramid_levels,
                  cfg.flow.iterations, cfg.flow.warps_per_level, static_cast<double>(cfg.flow.alpha));
    return buf;
}

}  // namespace valo
