#include "win/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <png.h>

#include "win/errors.hpp"

namespace win {
namespace {

bool has_png_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png";
}

// ---- PGM (P5, 8-bit) ----

int next_header_token(std::istream& is, const std::string& path) {
    // skips whitespace and '#' comments, returns a non-negative integer
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = is.get();
        } else if (std::isspace(c)) {
            c = is.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) throw FormatError("malformed PGM header in '" + path + "'");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 30) throw FormatError("PGM header value out of range in '" + path + "'");
        c = is.get();
    }
    if (c != EOF) is.unget();
    return static_cast<int>(value);
}

GrayImage load_pgm(std::istream& is, const std::string& path) {
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '5') {
        throw FormatError("'" + path + "' is not a binary PGM (P5) file");
    }
    const int w = next_header_token(is, path);
    const int h = next_header_token(is, path);
    const int maxval = next_header_token(is, path);
    if (w < 1 || h < 1) throw FormatError("PGM '" + path + "' has invalid dimensions");
    if (maxval != 255) {
        throw FormatError("PGM '" + path + "' has maxval " + std::to_string(maxval) +
                          "; only 8-bit (maxval 255) is supported");
    }
    is.get();  // single whitespace separator before the raster

    const std::size_t count = static_cast<std::size_t>(w) * h;
    std::vector<unsigned char> raw(count);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(is.gcount()) != count) {
        throw FormatError("PGM '" + path + "' is truncated");
    }
    GrayImage img(h, w);
    for (std::size_t i = 0; i < count; ++i) img.v[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << "P5\n" << img.w << " " << img.h << "\n255\n";
    std::vector<unsigned char> raw(static_cast<std::size_t>(img.pixels()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const float v = std::clamp(img.v[i], 0.0f, 1.0f);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!os) throw IoError("write failed for '" + path + "'");
}

// ---- PNG (8-bit gray or RGB; alpha stripped) ----

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage load_png(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw IoError("cannot open '" + path + "'");
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("libpng initialization failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("libpng initialization failed");
    if (setjmp(png_jmpbuf(ctx.png))) {
        throw FormatError("'" + path + "' is not a valid PNG file");
    }
    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 w = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 h = png_get_image_height(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color_type = png_get_color_type(ctx.png, ctx.info);

    if (bit_depth != 8) {
        throw FormatError("PNG '" + path + "' has bit depth " + std::to_string(bit_depth) +
                          "; only 8-bit is supported");
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        throw FormatError("PNG '" + path + "' is palette-based; only grayscale/RGB is supported");
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);
    const int channels = png_get_channels(ctx.png, ctx.info);
    if (channels != 1 && channels != 3) {
        throw FormatError("PNG '" + path + "' has " + std::to_string(channels) +
                          " channels after alpha strip; expected 1 or 3");
    }

    std::vector<unsigned char> raster(static_cast<std::size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raster.data() + static_cast<std::size_t>(y) * w * channels;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    GrayImage img(static_cast<int>(h), static_cast<int>(w));
    if (channels == 1) {
        for (std::size_t i = 0; i < img.v.size(); ++i) img.v[i] = static_cast<float>(raster[i]) / 255.0f;
    } else {
        for (std::size_t i = 0; i < img.v.size(); ++i) {
            const unsigned char* px = raster.data() + i * 3;
            img.v[i] = (0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2]) / 255.0f;
        }
    }
    return img;
}

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void save_png(const GrayImage& img, const std::string& path) {
    PngWriteCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw IoError("cannot open '" + path + "' for writing");
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw IoError("libpng initialization failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw IoError("libpng initialization failed");
    if (setjmp(png_jmpbuf(ctx.png))) {
        throw IoError("PNG write failed for '" + path + "'");
    }
    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(img.w), static_cast<png_uint_32>(img.h), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    std::vector<unsigned char> raw(static_cast<std::size_t>(img.pixels()));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const float v = std::clamp(img.v[i], 0.0f, 1.0f);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.h));
    for (int y = 0; y < img.h; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * img.w;
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, nullptr);
}

}  // namespace

GrayImage::GrayImage(int h_, int w_, float fill) : h(h_), w(w_) {
    if (h < 1 || w < 1) {
        throw std::invalid_argument("image dimensions must be >= 1, got " + std::to_string(h_) + "x" +
                                    std::to_string(w_));
    }
    v.assign(static_cast<std::size_t>(pixels()), fill);
}

GrayImage load_gray(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    char magic[2] = {0, 0};
    is.read(magic, 2);
    is.seekg(0);
    if (magic[0] == 'P' && magic[1] == '5') return load_pgm(is, path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        is.close();
        return load_png(path);
    }
    throw FormatError("'" + path + "' is neither a P5 PGM nor a PNG file");
}

void save_gray(const GrayImage& img, const std::string& path) {
    if (has_png_extension(path)) {
        save_png(img, path);
    } else {
        save_pgm(img, path);
    }
}

GrayImage clipped(const GrayImage& img) {
    GrayImage out = img;
    for (float& x : out.v) x = std::clamp(x, 0.0f, 1.0f);
    return out;
}

Tensor to_tensor(const GrayImage& img) {
    Tensor t(1, 1, img.h, img.w);
    std::copy(img.v.begin(), img.v.end(), t.data.begin());
    return t;
}

GrayImage to_image(const Tensor& t, int n, int c) {
    GrayImage img(t.h, t.w);
    const float* src = t.plane(n, c);
    std::copy(src, src + t.plane_size(), img.v.begin());
    return img;
}

std::vector<std::string> read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open manifest '" + path + "'");
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<std::string> out;
    std::string line;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        std::string entry = line.substr(first, last - first + 1);
        if (entry.empty() || entry[0] == '#') continue;
        std::filesystem::path p(entry);
        if (p.is_relative()) p = base / p;
        out.push_back(p.string());
    }
    return out;
}

std::string path_stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace win
