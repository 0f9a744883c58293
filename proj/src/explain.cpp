#include "valo/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "valo/common.hpp"

namespace valo {

std::vector<double> LinearHead::apply(const std::vector<float>& x) const {
    if (x.size() != in_dim)
        throw IngestError("attribute head expects dim " + std::to_string(in_dim) + ", feature component has " +
                          std::to_string(x.size()));
    std::vector<double> out(out_dim, 0.0);
    for (std::uint32_t o = 0; o < out_dim; ++o) {
        double acc = bias[o];
        const float* row = weights.data() + static_cast<std::size_t>(o) * in_dim;
        for (std::uint32_t i = 0; i < in_dim; ++i) acc += static_cast<double>(row[i]) * x[i];
        out[o] = acc;
    }
    return out;
}

// ------------------------------ head file I/O -------------------------------

namespace {

constexpr char kHeadMagic[4] = {'E', 'V', 'H', '1'};
constexpr std::uint32_t kHeadVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
T get(std::FILE* f, const std::string& path) {
    T v{};
    if (std::fread(&v, sizeof(T), 1, f) != 1) throw FormatError("truncated head file: " + path);
    return v;
}

template <typename T>
void put(std::FILE* f, const T& v, const std::string& path) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw Error("short write: " + path);
}

std::string get_string(std::FILE* f, const std::string& path) {
    auto len = get<std::uint32_t>(f, path);
    if (len > 256) throw FormatError("implausible string length in head file: " + path);
    std::string s(len, '\0');
    if (len && std::fread(s.data(), 1, len, f) != len) throw FormatError("truncated head file: " + path);
    return s;
}

void put_string(std::FILE* f, const std::string& s, const std::string& path) {
    put<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()), path);
    if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size()) throw Error("short write: " + path);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

AttributeHead load_attribute_head(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open attribute head file: " + path);
    std::FILE* f = fp.get();
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kHeadMagic, 4) != 0)
        throw FormatError("bad head file magic in " + path);
    auto version = get<std::uint32_t>(f, path);
    if (version != kHeadVersion)
        throw FormatError("head file version " + std::to_string(version) + " unsupported (this build reads version " +
                          std::to_string(kHeadVersion) + "): " + path);

    AttributeHead head;
    auto n_heads = get<std::uint32_t>(f, path);
    for (std::uint32_t i = 0; i < n_heads; ++i) {
        std::string name = get_string(f, path);
        LinearHead lh;
        lh.in_dim = get<std::uint32_t>(f, path);
        lh.out_dim = get<std::uint32_t>(f, path);
        if (lh.in_dim == 0 || lh.out_dim == 0 || lh.in_dim > (1u << 20) || lh.out_dim > (1u << 20))
            throw FormatError("implausible head dims in " + path);
        lh.weights.resize(static_cast<std::size_t>(lh.in_dim) * lh.out_dim);
        lh.bias.resize(lh.out_dim);
        if (std::fread(lh.weights.data(), sizeof(float), lh.weights.size(), f) != lh.weights.size() ||
            std::fread(lh.bias.data(), sizeof(float), lh.bias.size(), f) != lh.bias.size())
            throw FormatError("truncated head file: " + path);
        if (name == "app")
            head.app = std::move(lh);
        else if (name == "ang")
            head.ang = std::move(lh);
        else if (name == "mag")
            head.mag = std::move(lh);
        else if (name == "bkg")
            head.bkg = std::move(lh);
        else
            throw FormatError("unknown head component '" + name + "' in " + path);
    }
    auto n_names = get<std::uint32_t>(f, path);
    for (std::uint32_t i = 0; i < n_names; ++i) head.class_names.push_back(get_string(f, path));
    return head;
}

void save_attribute_head(const std::string& path, const AttributeHead& head) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    std::FILE* f = fp.get();
    if (std::fwrite(kHeadMagic, 1, 4, f) != 4) throw Error("short write: " + path);
    put<std::uint32_t>(f, kHeadVersion, path);

    std::vector<std::pair<std::string, const LinearHead*>> heads;
    if (head.app) heads.emplace_back("app", &*head.app);
    if (head.ang) heads.emplace_back("ang", &*head.ang);
    if (head.mag) heads.emplace_back("mag", &*head.mag);
    if (head.bkg) heads.emplace_back("bkg", &*head.bkg);
    put<std::uint32_t>(f, static_cast<std::uint32_t>(heads.size()), path);
    for (const auto& [name, lh] : heads) {
        put_string(f, name, path);
        put<std::uint32_t>(f, lh->in_dim, path);
        put<std::uint32_t>(f, lh->out_dim, path);
        if (std::fwrite(lh->weights.data(), sizeof(float), lh->weights.size(), f) != lh->weights.size() ||
            std::fwrite(lh->bias.data(), sizeof(float), lh->bias.size(), f) != lh->bias.size())
            throw Error("short write: " + path);
    }
    put<std::uint32_t>(f, static_cast<std::uint32_t>(head.class_names.size()), path);
    for (const auto& name : head.class_names) put_string(f, name, path);
}

// -------------------------------- panels ------------------------------------

namespace {

constexpr double kUnknownClassCutoff = 0.5;

void fill_class_fields(AttributePanel& panel, const FeatureVector& feature, const AttributeHead* head) {
    if (!head || !head->app) return;
    auto logits = head->app->apply(feature.app);
    panel.class_probs.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) panel.class_probs[i] = sigmoid(logits[i]);
    panel.class_names = head->class_names;
    std::size_t best = 0;
    for (std::size_t i = 1; i < panel.class_probs.size(); ++i)
        if (panel.class_probs[i] > panel.class_probs[best]) best = i;
    if (panel.class_probs.empty() || panel.class_probs[best] < kUnknownClassCutoff) {
        panel.top_class = "unknown";
    } else if (best < panel.class_names.size()) {
        panel.top_class = panel.class_names[best];
    } else {
        panel.top_class = "class " + std::to_string(best);
    }
}

}  // namespace

AttributePanel attribute_panel(const FeatureVector& feature, FeatureSource source, const AttributeHead* head) {
    AttributePanel panel;
    panel.stationary = feature.cls != 0;
    fill_class_fields(panel, feature, head);

    if (feature.cls) {
        // zeroing rule: a background volume carries all-zero motion components
        // and the panel mirrors them; `stationary` carries the information
        panel.direction_hist.assign(kDirectionBins, 0.0);
        panel.speed.assign(kDirectionBins, 0.0);
        panel.background_fraction = 0.0;
        return panel;
    }

    if (source == FeatureSource::Builtin) {
        panel.direction_hist.assign(feature.ang.begin(), feature.ang.end());
        panel.speed.assign(feature.mag.begin(), feature.mag.end());
        panel.background_fraction = feature.bkg.empty() ? 0.0 : feature.bkg[0];
        return panel;
    }

    if (!head || !head->ang || !head->mag || !head->bkg)
        throw ConfigError("imported features need ang/mag/bkg attribute heads to render a panel");
    panel.direction_hist = head->ang->apply(feature.ang);
    panel.speed = head->mag->apply(feature.mag);
    auto bkg_out = head->bkg->apply(feature.bkg);
    panel.background_fraction = bkg_out.empty() ? 0.0 : bkg_out[0];
    if (panel.direction_hist.size() != kDirectionBins || panel.speed.size() != kDirectionBins)
        throw FormatError("attribute heads must map ang/mag to 12 direction bins");
    for (auto& v : panel.direction_hist) v = std::clamp(v, 0.0, 1.0);
    return panel;
}

Explanation explain_score(const FeatureVector& feature, const RegionModel& rm, const Normalizers& z,
                          FeatureSource source, const AttributeHead* head, double decision_threshold, double sentinel) {
    Explanation e;
    e.region_index = rm.region_index;
    e.decision_threshold = decision_threshold;
    e.test_panel = attribute_panel(feature, source, head);

    if (rm.exemplars.empty()) {
        e.region_observed = false;
        e.total = sentinel;
        e.anomalous = e.total > decision_threshold;
        e.dominant = "none";
        return e;
    }

    VolumeScore vs = score_volume(feature, rm, z, sentinel);
    const FeatureVector& nearest = rm.exemplars[static_cast<std::size_t>(vs.nearest)];
    e.nearest_index = vs.nearest;
    e.nearest_provenance = rm.provenance[static_cast<std::size_t>(vs.nearest)];
    e.nearest_panel = attribute_panel(nearest, source, head);
    e.terms = feature_distance_terms(feature, nearest, z);
    e.total = e.terms[0] + e.terms[1] + e.terms[2] + e.terms[3];
    e.anomalous = e.total > decision_threshold;

    static const char* kNames[4] = {"app", "ang", "mag", "bkg"};
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (e.terms[i] > e.terms[best]) best = i;  // ties keep the earlier component
    e.dominant = e.terms[best] == 0.0 ? "none" : kNames[best];
    return e;
}

RegionSummary render_region_summary(const RegionModel& rm, FeatureSource source, const AttributeHead* head,
                                    std::size_t top_k) {
    RegionSummary s;
    s.region_index = rm.region_index;
    s.exemplar_count = rm.exemplars.size();
    const std::size_t n = std::min(top_k, rm.exemplars.size());
    for (std::size_t i = 0; i < n; ++i) {
        s.panels.push_back(attribute_panel(rm.exemplars[i], source, head));
        s.provenance.push_back(rm.provenance[i]);
    }
    return s;
}

// ------------------------------- rendering ----------------------------------

namespace {

std::string panel_text(const AttributePanel& p, const std::string& indent) {
    std::ostringstream out;
    char buf[64];
    if (!p.class_probs.empty()) {
        out << indent << "classes:";
        for (std::size_t i = 0; i < p.class_probs.size(); ++i) {
            std::string name = i < p.class_names.size() ? p.class_names[i] : "class" + std::to_string(i);
            std::snprintf(buf, sizeof(buf), " %s=%.2f", name.c_str(), p.class_probs[i]);
            out << buf;
        }
        out << "  (top: " << p.top_class << ")\n";
    }
    out << indent << "direction:";
    for (double v : p.direction_hist) {
        std::snprintf(buf, sizeof(buf), " %.3f", v);
        out << buf;
    }
    out << "\n" << indent << "speed:    ";
    for (double v : p.speed) {
        std::snprintf(buf, sizeof(buf), " %.3f", v);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.3f", p.background_fraction);
    out << "\n" << indent << "background_fraction: " << buf;
    out << "\n" << indent << "stationary: " << (p.stationary ? "yes" : "no") << "\n";
    return out.str();
}

std::string provenance_text(const Provenance& prov, const std::vector<std::string>& video_ids) {
    std::string video = prov.video < video_ids.size() ? video_ids[prov.video] : "video#" + std::to_string(prov.video);
    return video + " @ frame " + std::to_string(prov.frame_start);
}

nlohmann::json panel_json(const AttributePanel& p) {
    nlohmann::json j;
    if (!p.class_probs.empty()) {
        j["class_probs"] = p.class_probs;
        if (!p.class_names.empty()) j["class_names"] = p.class_names;
        j["top_class"] = p.top_class;
    }
    j["direction_hist"] = p.direction_hist;
    j["speed"] = p.speed;
    j["background_fraction"] = p.background_fraction;
    j["stationary"] = p.stationary;
    return j;
}

}  // namespace

std::string explanation_text(const Explanation& e, const std::vector<std::string>& video_ids) {
    std::ostringstream out;
    char buf[128];
    out << "region " << e.region_index << ": ";
    if (!e.region_observed) {
        std::snprintf(buf, sizeof(buf), "never observed in the nominal video; score %.4f (sentinel), %s\n", e.total,
                      e.anomalous ? "ANOMALOUS" : "normal");
        out << buf;
        out << "test volume attributes:\n" << panel_text(e.test_panel, "  ");
        return out.str();
    }
    std::snprintf(buf, sizeof(buf), "score %.4f vs decision threshold %.2f -> %s\n", e.total, e.decision_threshold,
                  e.anomalous ? "ANOMALOUS" : "normal");
    out << buf;
    std::snprintf(buf, sizeof(buf), "distance terms: app=%.4f ang=%.4f mag=%.4f bkg=%.4f (dominant: %s)\n", e.terms[0],
                  e.terms[1], e.terms[2], e.terms[3], e.dominant.c_str());
    out << buf;
    out << "test volume attributes:\n" << panel_text(e.test_panel, "  ");
    out << "nearest exemplar #" << e.nearest_index << " (" << provenance_text(e.nearest_provenance, video_ids)
        << "):\n";
    if (e.nearest_panel) out << panel_text(*e.nearest_panel, "  ");
    return out.str();
}

std::string explanation_json(const Explanation& e, const std::vector<std::string>& video_ids,
                             const std::string& config_echo) {
    nlohmann::json j;
    if (!config_echo.empty()) j["config"] = config_echo;
    j["region_index"] = e.region_index;
    j["region_observed"] = e.region_observed;
    j["total"] = e.total;
    j["decision_threshold"] = e.decision_threshold;
    j["anomalous"] = e.anomalous;
    j["dominant"] = e.dominant;
    j["test_panel"] = panel_json(e.test_panel);
    if (e.region_observed) {
        j["terms"] = {{"app", e.terms[0]}, {"ang", e.terms[1]}, {"mag", e.terms[2]}, {"bkg", e.terms[3]}};
        j["nearest_index"] = e.nearest_index;
        j["nearest_provenance"] = provenance_text(e.nearest_provenance, video_ids);
        if (e.nearest_panel) j["nearest_panel"] = panel_json(*e.nearest_panel);
    }
    return j.dump(2);
}

std::string region_summary_text(const RegionSummary& s, const std::vector<std::string>& video_ids) {
    std::ostringstream out;
    out << "region " << s.region_index << ": " << s.exemplar_count << " exemplar(s)\n";
    for (std::size_t i = 0; i < s.panels.size(); ++i) {
        out << "exemplar #" << i << " (" << provenance_text(s.provenance[i], video_ids) << "):\n";
        out << panel_text(s.panels[i], "  ");
    }
    return out.str();
}

// ----------------------------- panel bar chart ------------------------------

namespace {

void draw_bar(Image& img, int x0, int y_base, int bar_w, int bar_h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int y = y_base - bar_h; y < y_base; ++y) {
        if (y < 0 || y >= img.height) continue;
        for (int x = x0; x < x0 + bar_w; ++x) {
            if (x < 0 || x >= img.width) continue;
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = b;
        }
    }
}

void draw_hline(Image& img, int y, std::uint8_t v) {
    if (y < 0 || y >= img.height) return;
    for (int x = 0; x < img.width; ++x) {
        img.at(y, x, 0) = img.at(y, x, 1) = img.at(y, x, 2) = v;
    }
}

}  // namespace

void write_panel_png(const std::string& path, const AttributePanel& panel) {
    // stacked bar groups: classes (if any), direction histogram, speeds,
    // background fraction; each group normalized to its own axis
    constexpr int kBarW = 12, kGap = 4, kGroupH = 56, kPad = 8;
    int groups = (panel.class_probs.empty() ? 0 : 1) + 3;
    int max_bars = std::max<std::size_t>({panel.class_probs.size(), panel.direction_hist.size(), panel.speed.size(), 1});
    Image img(groups * (kGroupH + kPad) + kPad, kPad * 2 + max_bars * (kBarW + kGap), 255);

    double speed_max = 1.0;
    for (double v : panel.speed) speed_max = std::max(speed_max, v);

    int y_base = kPad + kGroupH;
    auto draw_group = [&](const std::vector<double>& values, double scale, std::uint8_t r, std::uint8_t g,
                          std::uint8_t b) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            int bar_h = static_cast<int>(std::lround(std::clamp(values[i] / scale, 0.0, 1.0) * (kGroupH - 2)));
            draw_bar(img, kPad + static_cast<int>(i) * (kBarW + kGap), y_base, kBarW, bar_h, r, g, b);
        }
        draw_hline(img, y_base, 64);
        y_base += kGroupH + kPad;
    };

    if (!panel.class_probs.empty()) draw_group(panel.class_probs, 1.0, 200, 80, 80);
    draw_group(panel.direction_hist, 1.0, 80, 120, 200);
    draw_group(panel.speed, speed_max, 80, 170, 90);
    draw_group({panel.background_fraction}, 1.0, 120, 120, 120);

    save_png(path, img);
}

}  // namespace valo
