#include "herdlens/io.hpp"

#include "herdlens/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace herdlens {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            fail(ErrorCode::Io, "cannot create directory " + path.parent_path().string());
        }
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::Io, "cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            fail(ErrorCode::Io, "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::Io, "cannot rename into " + path.string());
    }
}

std::string format_real(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
    std::string out(buf, res.ptr);
    if (out == "-0" || out.rfind("-0.", 0) == 0) {
        // Avoid "-0.00" in deterministic text output.
        bool all_zero = out.find_first_not_of("-0.") == std::string::npos;
        if (all_zero) {
            out.erase(0, 1);
        }
    }
    return out;
}

} // namespace herdlens
