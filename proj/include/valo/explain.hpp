#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "valo/model.hpp"
#include "valo/scoring.hpp"

namespace valo {

// Linear map from one feature component to its attribute space (the final
// fully connected layer of the network that produced the embedding).
struct LinearHead {
    std::uint32_t in_dim = 0;
    std::uint32_t out_dim = 0;
    std::vector<float> weights;  // out_dim x in_dim, row-major
    std::vector<float> bias;     // out_dim

    std::vector<double> apply(const std::vector<float>& x) const;
};

// Optional attribute heads for imported features ("EVH1" file). The builtin
// analytic path needs none: its components are the attributes themselves.
struct AttributeHead {
    std::optional<LinearHead> app;  // class logits -> sigmoid probabilities
    std::optional<LinearHead> ang;
    std::optional<LinearHead> mag;
    std::optional<LinearHead> bkg;
    std::vector<std::string> class_names;  // labels for app outputs, may be empty
};

AttributeHead load_attribute_head(const std::string& path);
void save_attribute_head(const std::string& path, const AttributeHead& head);

// The "instrument panel" view of one volume's feature vector.
struct AttributePanel {
    std::vector<double> class_probs;       // empty without an app head
    std::vector<std::string> class_names;  // parallel to class_probs when named
    std::string top_class;                 // "unknown" when every prob < 0.5
    std::vector<double> direction_hist;    // 12 values in [0,1]
    std::vector<double> speed;             // 12 values, px/frame
    double background_fraction = 0.0;
    bool stationary = false;
};

// Builtin features map to the panel by identity; imported features go
// through the head (required for the motion fields).
AttributePanel attribute_panel(const FeatureVector& feature, FeatureSource source,
                               const AttributeHead* head = nullptr);

// Why one volume scored the way it did.
struct Explanation {
    std::uint32_t region_index = 0;
    bool region_observed = true;
    AttributePanel test_panel;
    std::optional<AttributePanel> nearest_panel;
    std::int32_t nearest_index = -1;
    Provenance nearest_provenance;
    std::array<double, 4> terms{};  // normalized addends: app, ang, mag, bkg
    double total = 0.0;
    double decision_threshold = 0.0;
    bool anomalous = false;
    std::string dominant = "none";  // largest addend; ties break app>ang>mag>bkg
};

Explanation explain_score(const FeatureVector& feature, const RegionModel& rm, const Normalizers& z,
                          FeatureSource source, const AttributeHead* head = nullptr, double decision_threshold = 1.8,
                          double sentinel = kDefaultSentinelScore);

struct RegionSummary {
    std::uint32_t region_index = 0;
    std::size_t exemplar_count = 0;
    std::vector<AttributePanel> panels;  // up to top_k, in selection order
    std::vector<Provenance> provenance;
};

RegionSummary render_region_summary(const RegionModel& rm, FeatureSource source, const AttributeHead* head = nullptr,
                                    std::size_t top_k = 10);

std::string explanation_text(const Explanation& e, const std::vector<std::string>& video_ids);
std::string explanation_json(const Explanation& e, const std::vector<std::string>& video_ids,
                             const std::string& config_echo = "");
std::string region_summary_text(const RegionSummary& s, const std::vector<std::string>& video_ids);

// Bar-chart PNG of one panel (direction, speed, background, classes).
void write_panel_png(const std::string& path, const AttributePanel& panel);

}  // namespace valo
