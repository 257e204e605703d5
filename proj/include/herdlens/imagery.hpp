#ifndef HERDLENS_IMAGERY_HPP
#define HERDLENS_IMAGERY_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace herdlens {

/// Interleaved RGB image with channel values in [0, 1].
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<float> rgb;

    RgbImage() = default;
    RgbImage(int h, int w) : height(h), width(w), rgb(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 3, 0.0f) {}

    float r(int row, int col) const { return rgb[offset(row, col)]; }
    float g(int row, int col) const { return rgb[offset(row, col) + 1]; }
    float b(int row, int col) const { return rgb[offset(row, col) + 2]; }
    void set(int row, int col, float red, float green, float blue) {
        const auto o = offset(row, col);
        rgb[o] = red;
        rgb[o + 1] = green;
        rgb[o + 2] = blue;
    }

private:
    std::size_t offset(int row, int col) const {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)) * 3;
    }
};

/// 8-bit binary PPM (P6), values mapped to [0, 1] by /255.
RgbImage read_ppm(const std::filesystem::path& path);

/// Channels are rounded to the nearest of the 256 levels.
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// Frame index -> PPM path, resolved against the index file's directory.
using ImageryIndex = std::map<std::int64_t, std::filesystem::path>;

inline constexpr const char* kImageryDir = "imagery";
inline constexpr const char* kImageryIndexFile = "index.json";

ImageryIndex read_imagery_index(const std::filesystem::path& index_path);

/// Writes `{"<frame_index>": "<relative path>", ...}`.
void write_imagery_index(const std::filesystem::path& index_path,
                         const std::map<std::int64_t, std::string>& entries);

} // namespace herdlens

#endif
