#include "valo/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <memory>

#include "valo/common.hpp"

namespace valo {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

Image load_png_file(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open image file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw FormatError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("libpng: out of memory");
    }
    std::vector<png_bytep> row_ptrs;
    Image img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG file: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB.
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img = Image(static_cast<int>(h), static_cast<int>(w));
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = img.data.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void skip_ppm_space(std::FILE* f) {
    int c;
    while ((c = std::fgetc(f)) != EOF) {
        if (c == '#') {
            while ((c = std::fgetc(f)) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            std::ungetc(c, f);
            return;
        }
    }
}

long read_ppm_int(std::FILE* f, const std::string& path) {
    skip_ppm_space(f);
    long v = 0;
    int c = std::fgetc(f);
    if (c == EOF || !std::isdigit(c)) throw FormatError("malformed PPM header: " + path);
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        c = std::fgetc(f);
    }
    if (c != EOF) std::ungetc(c, f);
    return v;
}

Image load_ppm_file(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestError("cannot open image file: " + path);
    char magic[3] = {0, 0, 0};
    if (std::fread(magic, 1, 2, fp.get()) != 2) throw FormatError("malformed PPM header: " + path);
    bool gray = false;
    if (magic[0] == 'P' && magic[1] == '6') {
        gray = false;
    } else if (magic[0] == 'P' && magic[1] == '5') {
        gray = true;
    } else {
        throw FormatError("unsupported PPM magic in " + path);
    }
    long w = read_ppm_int(fp.get(), path);
    long h = read_ppm_int(fp.get(), path);
    long maxval = read_ppm_int(fp.get(), path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw FormatError("unsupported PPM dimensions/maxval in " + path);
    int c = std::fgetc(fp.get());
    if (c == EOF) throw FormatError("truncated PPM file: " + path);

    Image img(static_cast<int>(h), static_cast<int>(w));
    std::size_t npix = static_cast<std::size_t>(h) * w;
    if (gray) {
        std::vector<std::uint8_t> buf(npix);
        if (std::fread(buf.data(), 1, npix, fp.get()) != npix) throw FormatError("truncated PPM payload: " + path);
        for (std::size_t i = 0; i < npix; ++i) {
            img.data[i * 3] = img.data[i * 3 + 1] = img.data[i * 3 + 2] = buf[i];
        }
    } else {
        if (std::fread(img.data.data(), 1, npix * 3, fp.get()) != npix * 3)
            throw FormatError("truncated PPM payload: " + path);
    }
    return img;
}

}  // namespace

Image load_image(const std::string& path) {
    std::string ext = lower_ext(path);
    if (ext == "png") return load_png_file(path);
    if (ext == "ppm" || ext == "pgm") return load_ppm_file(path);
    throw IngestError("unsupported image extension '" + ext + "' for " + path);
}

void save_png(const std::string& path, const Image& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(y) * img.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_ppm(const std::string& path, const Image& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    std::fprintf(fp.get(), "P6\n%d %d\n255\n", img.width, img.height);
    std::size_t n = img.data.size();
    if (std::fwrite(img.data.data(), 1, n, fp.get()) != n) throw Error("short write: " + path);
}

void save_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int height, int width) {
    if (pixels.size() != static_cast<std::size_t>(height) * width)
        throw Error("gray PNG pixel buffer size mismatch for " + path);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("libpng: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

FloatImage to_gray(const Image& img) {
    FloatImage out(img.height, img.width);
    const std::uint8_t* p = img.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i, p += 3) {
        out.data[i] = (0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2]) / 255.f;
    }
    return out;
}

}  // namespace valo
