#include "herdlens/interchange.hpp"

#include "herdlens/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace herdlens {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

struct FieldError {
    ErrorCode code;
    std::string field;
    std::string message;
};

[[noreturn]] void bad_field(const std::string& field, const std::string& message,
                            ErrorCode code = ErrorCode::ParseError) {
    throw FieldError{code, field, message};
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        bad_field(key, "missing key");
    }
    return *it;
}

double get_real(const json& value, const std::string& field) {
    if (!value.is_number()) {
        bad_field(field, "expected a number");
    }
    double out = value.get<double>();
    if (!std::isfinite(out)) {
        bad_field(field, "expected a finite number");
    }
    return out;
}

std::int64_t get_integer(const json& value, const std::string& field) {
    if (!value.is_number_integer()) {
        bad_field(field, "expected an integer");
    }
    return value.get<std::int64_t>();
}

std::string get_string(const json& value, const std::string& field) {
    if (!value.is_string()) {
        bad_field(field, "expected a string");
    }
    return value.get<std::string>();
}

RleMask parse_mask(const json& value) {
    if (!value.is_object()) {
        bad_field("mask_rle", "expected an object or null");
    }
    const json& size = require(value, "size");
    if (!size.is_array() || size.size() != 2) {
        bad_field("mask_rle.size", "expected [h, w]");
    }
    RleMask mask;
    auto h = get_integer(size[0], "mask_rle.size");
    auto w = get_integer(size[1], "mask_rle.size");
    if (h <= 0 || w <= 0 || h > (1 << 20) || w > (1 << 20)) {
        bad_field("mask_rle.size", "dimensions must be positive", ErrorCode::InvariantViolation);
    }
    mask.height = static_cast<int>(h);
    mask.width = static_cast<int>(w);
    const json& counts = require(value, "counts");
    if (!counts.is_array()) {
        bad_field("mask_rle.counts", "expected an array");
    }
    mask.counts.reserve(counts.size());
    for (const auto& c : counts) {
        if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<std::int64_t>() >= 0)) {
            bad_field("mask_rle.counts", "counts must be nonnegative integers");
        }
        mask.counts.push_back(c.get<std::uint64_t>());
    }
    return mask;
}

PoseSet parse_pose(const json& value) {
    if (!value.is_array()) {
        bad_field("keypoints", "expected an array or null");
    }
    if (value.size() != kNumKeypoints) {
        bad_field("keypoints", "expected exactly 17 keypoints, got " + std::to_string(value.size()),
                  ErrorCode::InvariantViolation);
    }
    PoseSet pose;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
        const json& p = value[k];
        if (!p.is_array() || p.size() != 3) {
            bad_field("keypoints", "expected [x, y, confidence] triples");
        }
        pose[k].x = get_real(p[0], "keypoints");
        pose[k].y = get_real(p[1], "keypoints");
        pose[k].confidence = get_real(p[2], "keypoints");
    }
    return pose;
}

Detection parse_detection(const json& value) {
    if (!value.is_object()) {
        bad_field("detections", "expected an object");
    }
    Detection det;
    const json& track = require(value, "track_id");
    if (!track.is_null()) {
        auto id = get_integer(track, "track_id");
        if (id < 0) {
            bad_field("track_id", "must be nonnegative", ErrorCode::InvariantViolation);
        }
        det.track_id = id;
    }
    const json& bbox = require(value, "bbox");
    if (!bbox.is_array() || bbox.size() != 4) {
        bad_field("bbox", "expected [x, y, w, h]");
    }
    det.bbox = {get_real(bbox[0], "bbox"), get_real(bbox[1], "bbox"), get_real(bbox[2], "bbox"),
                get_real(bbox[3], "bbox")};
    det.score = get_real(require(value, "score"), "score");
    const json& kp = require(value, "keypoints");
    if (!kp.is_null()) {
        det.keypoints = parse_pose(kp);
    }
    const json& mask = require(value, "mask_rle");
    if (!mask.is_null()) {
        det.mask = parse_mask(mask);
    }
    return det;
}

FrameRecord parse_frame(const json& value) {
    if (!value.is_object()) {
        bad_field("", "expected a JSON object");
    }
    FrameRecord frame;
    frame.video_id = get_string(require(value, "video_id"), "video_id");
    frame.frame_index = get_integer(require(value, "frame_index"), "frame_index");
    const json& dets = require(value, "detections");
    if (!dets.is_array()) {
        bad_field("detections", "expected an array");
    }
    frame.detections.reserve(dets.size());
    for (const auto& d : dets) {
        frame.detections.push_back(parse_detection(d));
    }
    return frame;
}

VideoManifest parse_manifest(const json& value) {
    if (!value.is_object()) {
        bad_field("", "manifest must be a JSON object");
    }
    VideoManifest m;
    m.video_id = get_string(require(value, "video_id"), "video_id");
    m.fps = get_real(require(value, "fps"), "fps");
    auto activity = parse_activity(get_string(require(value, "activity"), "activity"));
    if (!activity) {
        bad_field("activity", "expected one of grazing, running, sitting");
    }
    m.activity = *activity;
    if (auto it = value.find("view"); it != value.end() && !it->is_null()) {
        auto view = parse_view(get_string(*it, "view"));
        if (!view) {
            bad_field("view", "expected front or side");
        }
        m.view = view;
    }
    if (auto it = value.find("social"); it != value.end() && !it->is_null()) {
        auto social = parse_social(get_string(*it, "social"));
        if (!social) {
            bad_field("social", "expected single or herd");
        }
        m.social = social;
    }
    auto stride = get_integer(require(value, "frame_stride"), "frame_stride");
    auto width = get_integer(require(value, "width"), "width");
    auto height = get_integer(require(value, "height"), "height");
    constexpr std::int64_t limit = 1 << 20;
    if (stride > limit || width > limit || height > limit || stride < -limit || width < -limit ||
        height < -limit) {
        bad_field("width", "value out of range", ErrorCode::InvariantViolation);
    }
    m.frame_stride = static_cast<int>(stride);
    m.width = static_cast<int>(width);
    m.height = static_cast<int>(height);
    return m;
}

Diagnostic make_diag(ErrorCode code, const std::string& field, const std::string& message,
                     std::optional<std::int64_t> frame_index = std::nullopt) {
    Diagnostic d;
    d.code = code;
    d.field = field;
    d.message = message;
    d.frame_index = frame_index;
    return d;
}

ordered_json mask_to_json(const RleMask& mask) {
    ordered_json out = ordered_json::object();
    out["size"] = ordered_json::array({mask.height, mask.width});
    out["counts"] = mask.counts;
    return out;
}

} // namespace

std::string_view to_string(Activity value) {
    switch (value) {
    case Activity::Grazing: return "grazing";
    case Activity::Running: return "running";
    case Activity::Sitting: return "sitting";
    }
    return "running";
}

std::string_view to_string(View value) { return value == View::Front ? "front" : "side"; }

std::string_view to_string(Social value) { return value == Social::Single ? "single" : "herd"; }

std::optional<Activity> parse_activity(std::string_view text) {
    if (text == "grazing") return Activity::Grazing;
    if (text == "running") return Activity::Running;
    if (text == "sitting") return Activity::Sitting;
    return std::nullopt;
}

std::optional<View> parse_view(std::string_view text) {
    if (text == "front") return View::Front;
    if (text == "side") return View::Side;
    return std::nullopt;
}

std::optional<Social> parse_social(std::string_view text) {
    if (text == "single") return Social::Single;
    if (text == "herd") return Social::Herd;
    return std::nullopt;
}

double BBox::diagonal() const { return std::sqrt(w * w + h * h); }

std::string Diagnostic::to_string() const {
    std::ostringstream out;
    out << (file.empty() ? "<input>" : file) << ':' << line << ": " << herdlens::to_string(code);
    if (frame_index) {
        out << " (frame " << *frame_index << ')';
    }
    if (!field.empty()) {
        out << " [" << field << ']';
    }
    out << ": " << message;
    return out.str();
}

BitGrid decode_rle(const RleMask& mask) {
    if (mask.height <= 0 || mask.width <= 0) {
        fail(ErrorCode::InvalidArgument, "mask dimensions must be positive");
    }
    BitGrid grid(mask.height, mask.width);
    auto bits = grid.bits();
    const std::uint64_t total = bits.size();
    std::uint64_t pos = 0;
    bool value = false;
    for (auto run : mask.counts) {
        if (run > total - pos) {
            fail(ErrorCode::Overflow, "run of " + std::to_string(run) + " exceeds the " +
                                          std::to_string(total - pos) + " remaining cells");
        }
        if (value) {
            std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(pos), run, std::uint8_t{1});
        }
        pos += run;
        value = !value;
    }
    if (pos != total) {
        fail(ErrorCode::SumMismatch, "counts sum to " + std::to_string(pos) + " but the mask has " +
                                         std::to_string(total) + " cells");
    }
    return grid;
}

RleMask encode_rle(const BitGrid& grid) {
    RleMask mask;
    mask.height = grid.height();
    mask.width = grid.width();
    std::uint8_t current = 0;
    std::uint64_t run = 0;
    for (auto bit : grid.bits()) {
        if (bit != current) {
            mask.counts.push_back(run);
            run = 0;
            current = bit;
        }
        ++run;
    }
    mask.counts.push_back(run);
    return mask;
}

bool is_canonical(const RleMask& mask) {
    for (std::size_t i = 1; i < mask.counts.size(); ++i) {
        if (mask.counts[i] == 0) {
            return false;
        }
    }
    return true;
}

std::vector<Diagnostic> validate_manifest(const VideoManifest& m) {
    std::vector<Diagnostic> out;
    if (m.video_id.empty()) {
        out.push_back(make_diag(ErrorCode::InvariantViolation, "video_id", "must be nonempty"));
    }
    if (!(m.fps > 0.0) || !std::isfinite(m.fps)) {
        out.push_back(make_diag(ErrorCode::InvariantViolation, "fps", "must be positive"));
    }
    if (m.frame_stride < 1) {
        out.push_back(make_diag(ErrorCode::InvariantViolation, "frame_stride", "must be >= 1"));
    }
    if (m.width <= 0 || m.height <= 0) {
        out.push_back(make_diag(ErrorCode::InvariantViolation, "width",
                                "width and height must be positive"));
    }
    return out;
}

std::vector<Diagnostic> validate_frame(const FrameRecord& frame, const VideoManifest& manifest) {
    std::vector<Diagnostic> out;
    const auto fi = frame.frame_index;
    auto add = [&](ErrorCode code, std::string field, std::string message) {
        out.push_back(make_diag(code, std::move(field), std::move(message), fi));
    };

    if (frame.video_id != manifest.video_id) {
        add(ErrorCode::ManifestMismatch, "video_id",
            "frame belongs to '" + frame.video_id + "', manifest is '" + manifest.video_id + "'");
    }
    if (frame.frame_index < 0) {
        add(ErrorCode::InvariantViolation, "frame_index", "must be nonnegative");
    }
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const auto& det = frame.detections[i];
        const std::string prefix = "detections[" + std::to_string(i) + "].";
        const auto& b = det.bbox;
        if (!(b.w > 0.0) || !(b.h > 0.0)) {
            add(ErrorCode::InvariantViolation, prefix + "bbox", "width and height must be positive");
        }
        if (b.x < 0.0 || b.y < 0.0) {
            add(ErrorCode::InvariantViolation, prefix + "bbox", "origin must be nonnegative");
        }
        if (b.x + b.w > manifest.width || b.y + b.h > manifest.height) {
            add(ErrorCode::InvariantViolation, prefix + "bbox",
                "box exceeds the " + std::to_string(manifest.width) + "x" +
                    std::to_string(manifest.height) + " frame");
        }
        if (det.score < 0.0 || det.score > 1.0) {
            add(ErrorCode::InvariantViolation, prefix + "score", "must lie in [0, 1]");
        }
        if (det.keypoints) {
            for (const auto& kp : *det.keypoints) {
                if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
                    add(ErrorCode::InvariantViolation, prefix + "keypoints", "coordinates must be finite");
                    break;
                }
                if (kp.confidence < 0.0 || kp.confidence > 1.0) {
                    add(ErrorCode::InvariantViolation, prefix + "keypoints",
                        "confidence must lie in [0, 1]");
                    break;
                }
            }
        }
        if (det.mask) {
            const auto& m = *det.mask;
            if (m.height != manifest.height || m.width != manifest.width) {
                add(ErrorCode::ManifestMismatch, prefix + "mask_rle.size",
                    "mask is " + std::to_string(m.height) + "x" + std::to_string(m.width) +
                        ", frame is " + std::to_string(manifest.height) + "x" +
                        std::to_string(manifest.width));
            }
            std::uint64_t total = 0;
            bool overflow = false;
            for (auto c : m.counts) {
                if (c > std::numeric_limits<std::uint64_t>::max() - total) {
                    overflow = true;
                    break;
                }
                total += c;
            }
            const auto cells = static_cast<std::uint64_t>(m.height) * static_cast<std::uint64_t>(m.width);
            if (overflow || total != cells) {
                add(ErrorCode::InvariantViolation, prefix + "mask_rle.counts",
                    "counts must sum to h*w = " + std::to_string(cells));
            } else if (!is_canonical(m)) {
                add(ErrorCode::InvariantViolation, prefix + "mask_rle.counts",
                    "only the leading count may be zero");
            }
        }
    }
    return out;
}

ReadResult read_video(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& frames_path) {
    ReadResult result;
    const std::string manifest_name = manifest_path.string();
    const std::string frames_name = frames_path.string();

    auto push = [&](Diagnostic d, const std::string& file, std::size_t line) {
        d.file = file;
        d.line = line;
        result.diagnostics.push_back(std::move(d));
    };

    std::string manifest_text;
    try {
        manifest_text = read_text_file(manifest_path);
    } catch (const Error& e) {
        push(make_diag(ErrorCode::Io, "", e.what()), manifest_name, 0);
        return result;
    }
    json manifest_json = json::parse(manifest_text, nullptr, false);
    if (manifest_json.is_discarded()) {
        push(make_diag(ErrorCode::ParseError, "", "manifest is not valid JSON"), manifest_name, 0);
        return result;
    }
    try {
        result.video.manifest = parse_manifest(manifest_json);
    } catch (const FieldError& e) {
        push(make_diag(e.code, e.field, e.message), manifest_name, 0);
        return result;
    }
    for (auto& d : validate_manifest(result.video.manifest)) {
        push(std::move(d), manifest_name, 0);
    }
    if (!result.diagnostics.empty()) {
        return result;
    }

    std::ifstream in(frames_path, std::ios::binary);
    if (!in) {
        push(make_diag(ErrorCode::Io, "", "cannot open frames file"), frames_name, 0);
        return result;
    }
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::int64_t> last_index;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        json value = json::parse(line, nullptr, false);
        if (value.is_discarded()) {
            push(make_diag(ErrorCode::ParseError, "", "line is not valid JSON"), frames_name, line_no);
            continue;
        }
        FrameRecord frame;
        try {
            frame = parse_frame(value);
        } catch (const FieldError& e) {
            push(make_diag(e.code, e.field, e.message), frames_name, line_no);
            continue;
        }
        auto diags = validate_frame(frame, result.video.manifest);
        if (last_index && frame.frame_index <= *last_index) {
            diags.push_back(make_diag(ErrorCode::InvariantViolation, "frame_index",
                                      "frame_index must be strictly increasing (previous " +
                                          std::to_string(*last_index) + ")",
                                      frame.frame_index));
        }
        if (!diags.empty()) {
            for (auto& d : diags) {
                push(std::move(d), frames_name, line_no);
            }
            continue;
        }
        last_index = frame.frame_index;
        result.video.frames.push_back(std::move(frame));
    }
    std::stable_sort(result.video.frames.begin(), result.video.frames.end(),
                     [](const FrameRecord& a, const FrameRecord& b) { return a.frame_index < b.frame_index; });
    return result;
}

VideoData load_video(const std::filesystem::path& dir) {
    auto result = read_video(dir / kManifestFile, dir / kFramesFile);
    if (!result.ok()) {
        const auto& first = result.diagnostics.front();
        fail(first.code, first.to_string());
    }
    return std::move(result.video);
}

std::string manifest_to_json(const VideoManifest& m) {
    ordered_json out = ordered_json::object();
    out["video_id"] = m.video_id;
    out["fps"] = m.fps;
    out["activity"] = std::string(to_string(m.activity));
    out["view"] = m.view ? ordered_json(std::string(to_string(*m.view))) : ordered_json(nullptr);
    out["social"] = m.social ? ordered_json(std::string(to_string(*m.social))) : ordered_json(nullptr);
    out["frame_stride"] = m.frame_stride;
    out["width"] = m.width;
    out["height"] = m.height;
    return out.dump(2) + "\n";
}

std::string frame_to_json_line(const FrameRecord& frame) {
    ordered_json out = ordered_json::object();
    out["video_id"] = frame.video_id;
    out["frame_index"] = frame.frame_index;
    ordered_json dets = ordered_json::array();
    for (const auto& det : frame.detections) {
        ordered_json d = ordered_json::object();
        d["track_id"] = det.track_id ? ordered_json(*det.track_id) : ordered_json(nullptr);
        d["bbox"] = ordered_json::array({det.bbox.x, det.bbox.y, det.bbox.w, det.bbox.h});
        d["score"] = det.score;
        if (det.keypoints) {
            ordered_json kps = ordered_json::array();
            for (const auto& kp : *det.keypoints) {
                kps.push_back(ordered_json::array({kp.x, kp.y, kp.confidence}));
            }
            d["keypoints"] = std::move(kps);
        } else {
            d["keypoints"] = nullptr;
        }
        d["mask_rle"] = det.mask ? mask_to_json(*det.mask) : ordered_json(nullptr);
        dets.push_back(std::move(d));
    }
    out["detections"] = std::move(dets);
    return out.dump() + "\n";
}

void write_video(const VideoData& video, const std::filesystem::path& manifest_path,
                 const std::filesystem::path& frames_path) {
    std::string frames;
    for (const auto& frame : video.frames) {
        frames += frame_to_json_line(frame);
    }
    write_file_atomic(manifest_path, manifest_to_json(video.manifest));
    write_file_atomic(frames_path, frames);
}

void write_video_dir(const VideoData& video, const std::filesystem::path& dir) {
    write_video(video, dir / kManifestFile, dir / kFramesFile);
}

} // namespace herdlens
