#ifndef HERDLENS_BITGRID_HPP
#define HERDLENS_BITGRID_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace herdlens {

/// Binary h x w image stored row-major, one byte per pixel (0 or 1).
class BitGrid {
public:
    BitGrid() = default;
    BitGrid(int height, int width, bool fill = false);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }

    bool operator()(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    bool operator==(const BitGrid&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> bits_;
};

} // namespace herdlens

#endif
