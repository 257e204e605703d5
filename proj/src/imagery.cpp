#include "herdlens/imagery.hpp"

#include "herdlens/error.hpp"
#include "herdlens/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace herdlens {

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
    while (pos < data.size()) {
        if (data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
}

int parse_dim(const std::string& token, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used == token.size() && v > 0) {
            return v;
        }
    } catch (const std::exception&) {
    }
    fail(ErrorCode::ParseError, "bad PPM header in " + path.string());
}

} // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
    const std::string data = read_text_file(path);
    std::size_t pos = 0;
    if (next_token(data, pos) != "P6") {
        fail(ErrorCode::ParseError, path.string() + " is not a binary PPM (P6)");
    }
    const int width = parse_dim(next_token(data, pos), path);
    const int height = parse_dim(next_token(data, pos), path);
    const int maxval = parse_dim(next_token(data, pos), path);
    if (maxval != 255) {
        fail(ErrorCode::ParseError, path.string() + ": only 8-bit PPM is supported");
    }
    ++pos; // single whitespace byte before the raster
    const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    if (data.size() < pos + expected) {
        fail(ErrorCode::ParseError, path.string() + ": truncated raster");
    }
    RgbImage image(height, width);
    for (std::size_t i = 0; i < expected; ++i) {
        image.rgb[i] = static_cast<float>(static_cast<unsigned char>(data[pos + i])) / 255.0f;
    }
    return image;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.reserve(out.size() + image.rgb.size());
    for (float v : image.rgb) {
        const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
    write_file_atomic(path, out);
}

ImageryIndex read_imagery_index(const std::filesystem::path& index_path) {
    const auto text = read_text_file(index_path);
    auto value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded() || !value.is_object()) {
        fail(ErrorCode::ParseError, index_path.string() + ": expected a JSON object");
    }
    ImageryIndex index;
    const auto base = index_path.parent_path();
    for (const auto& [key, entry] : value.items()) {
        std::int64_t frame = 0;
        try {
            std::size_t used = 0;
            frame = std::stoll(key, &used);
            if (used != key.size() || frame < 0) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, index_path.string() + ": key '" + key + "' is not a frame index");
        }
        if (!entry.is_string()) {
            fail(ErrorCode::ParseError, index_path.string() + ": entry for frame " + key + " must be a path");
        }
        index[frame] = base / entry.get<std::string>();
    }
    return index;
}

void write_imagery_index(const std::filesystem::path& index_path,
                         const std::map<std::int64_t, std::string>& entries) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [frame, rel] : entries) {
        out[std::to_string(frame)] = rel;
    }
    write_file_atomic(index_path, out.dump(2) + "\n");
}

} // namespace herdlens
