#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wiggle {

inline constexpr int kFrameWidth = 320;
inline constexpr int kFrameHeight = 240;

/// Row-major grayscale image, intensities in [0, 1].
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    Frame() = default;
    Frame(int w, int h, float fill = 0.0f) : width(w), height(h), pixels(size_t(w) * h, fill) {}

    float at(int x, int y) const { return pixels[size_t(y) * width + x]; }
    float& at(int x, int y) { return pixels[size_t(y) * width + x]; }

    bool valid() const {
        return width > 0 && height > 0 && pixels.size() == size_t(width) * height;
    }
};

/// Bilinear sample with clamp-to-edge addressing.
inline float sample_bilinear(const Frame& f, double u, double v) {
    u = std::clamp(u, 0.0, double(f.width - 1));
    v = std::clamp(v, 0.0, double(f.height - 1));
    const int x0 = std::min(int(u), f.width - 2 >= 0 ? f.width - 2 : 0);
    const int y0 = std::min(int(v), f.height - 2 >= 0 ? f.height - 2 : 0);
    const double fx = u - x0;
    const double fy = v - y0;
    const double p00 = f.at(x0, y0);
    const double p10 = f.at(x0 + 1, y0);
    const double p01 = f.at(x0, y0 + 1);
    const double p11 = f.at(x0 + 1, y0 + 1);
    return float((p00 * (1 - fx) + p10 * fx) * (1 - fy) + (p01 * (1 - fx) + p11 * fx) * fy);
}

/// Area-averaging downsample (box filter over exact fractional coverage).
inline Frame area_resize(const Frame& src, int out_w, int out_h) {
    if (!src.valid()) throw std::invalid_argument("area_resize: invalid source frame");
    if (out_w <= 0 || out_h <= 0) throw std::invalid_argument("area_resize: bad target size");
    if (src.width == out_w && src.height == out_h) return src;

    Frame dst(out_w, out_h);
    const double sx = double(src.width) / out_w;
    const double sy = double(src.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double y0 = oy * sy;
        const double y1 = (oy + 1) * sy;
        const int iy0 = int(std::floor(y0));
        const int iy1 = std::min(int(std::ceil(y1)), src.height);
        for (int ox = 0; ox < out_w; ++ox) {
            const double x0 = ox * sx;
            const double x1 = (ox + 1) * sx;
            const int ix0 = int(std::floor(x0));
            const int ix1 = std::min(int(std::ceil(x1)), src.width);
            double acc = 0.0, area = 0.0;
            for (int iy = iy0; iy < iy1; ++iy) {
                const double hy = std::min(y1, double(iy + 1)) - std::max(y0, double(iy));
                for (int ix = ix0; ix < ix1; ++ix) {
                    const double wx = std::min(x1, double(ix + 1)) - std::max(x0, double(ix));
                    acc += src.at(ix, iy) * wx * hy;
                    area += wx * hy;
                }
            }
            dst.at(ox, oy) = float(acc / area);
        }
    }
    return dst;
}

/// Resize to the tracker's 320x240 working resolution when needed.
inline Frame ingest(const Frame& src) {
    if (src.width == kFrameWidth && src.height == kFrameHeight) return src;
    return area_resize(src, kFrameWidth, kFrameHeight);
}

// --- 8-bit binary PGM (P5, maxval 255) -------------------------------------

inline void write_pgm(const std::filesystem::path& path, const Frame& f) {
    if (!f.valid()) throw std::invalid_argument("write_pgm: invalid frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
    out << "P5\n" << f.width << " " << f.height << "\n255\n";
    std::vector<unsigned char> raw(f.pixels.size());
    for (size_t i = 0; i < f.pixels.size(); ++i) {
        const float v = std::clamp(f.pixels[i], 0.0f, 1.0f);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
    if (!out) throw std::runtime_error("write_pgm: short write to " + path.string());
}

inline Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path.string());

    auto next_token = [&in, &path]() {
        std::string tok;
        while (true) {
            int c = in.get();
            if (c == EOF) throw std::runtime_error("read_pgm: truncated header in " + path.string());
            if (c == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(char(c));
        }
    };

    if (next_token() != "P5") throw std::runtime_error("read_pgm: not a binary PGM: " + path.string());
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0) throw std::runtime_error("read_pgm: bad dimensions in " + path.string());
    if (maxval != 255) throw std::runtime_error("read_pgm: expected maxval 255 in " + path.string());

    std::vector<unsigned char> raw(size_t(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (in.gcount() != std::streamsize(raw.size()))
        throw std::runtime_error("read_pgm: truncated raster in " + path.string());

    Frame f(w, h);
    for (size_t i = 0; i < raw.size(); ++i) f.pixels[i] = float(raw[i]) / 255.0f;
    return f;
}

/// Frames in a directory, ordered by the integer embedded in each *.pgm stem.
inline std::vector<std::filesystem::path> list_numbered_pgms(const std::filesystem::path& dir) {
    std::vector<std::pair<long long, std::filesystem::path>> found;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".pgm") continue;
        const std::string stem = entry.path().stem().string();
        std::string digits;
        for (char c : stem) {
            if (std::isdigit(static_cast<unsigned char>(c))) digits.push_back(c);
        }
        if (digits.empty()) continue;
        found.emplace_back(std::stoll(digits), entry.path());
    }
    std::sort(found.begin(), found.end());
    std::vector<std::filesystem::path> out;
    out.reserve(found.size());
    for (auto& [n, p] : found) out.push_back(p);
    return out;
}

}  // namespace wiggle
