#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace valo {

// 8-bit interleaved RGB image, row-major.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;  // height * width * 3

    Image() = default;
    Image(int h, int w, std::uint8_t fill = 0) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {}

    std::uint8_t& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    std::uint8_t at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool operator==(const Image& o) const { return height == o.height && width == o.width && data == o.data; }
};

// Single-channel float image (grayscale, derivatives, score planes).
struct FloatImage {
    int height = 0;
    int width = 0;
    std::vector<float> data;

    FloatImage() = default;
    FloatImage(int h, int w, float fill = 0.f) : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    float& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Loads a PNG or PPM/PGM image by file extension (.png, .ppm, .pgm).
// Grayscale inputs are expanded to RGB. Throws IngestError / FormatError.
Image load_image(const std::string& path);

void save_png(const std::string& path, const Image& img);
void save_ppm(const std::string& path, const Image& img);

// 8-bit grayscale PNG (used for score heatmaps).
void save_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int height, int width);

// Rec. 601 luma in [0,1].
FloatImage to_gray(const Image& img);

}  // namespace valo
