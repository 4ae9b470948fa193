#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace skinprob {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit interleaved RGB raster, row-major.
class ImageRGB {
public:
    ImageRGB() = default;
    ImageRGB(int width, int height, Rgb fill = {0, 0, 0});
    ImageRGB(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    Rgb at(int x, int y) const noexcept {
        const std::size_t o = offset(x, y);
        return {data_[o], data_[o + 1], data_[o + 2]};
    }
    void set(int x, int y, Rgb v) noexcept {
        const std::size_t o = offset(x, y);
        data_[o] = v[0];
        data_[o + 1] = v[1];
        data_[o + 2] = v[2];
    }

    std::span<const std::uint8_t> bytes() const noexcept { return data_; }
    std::span<std::uint8_t> bytes() noexcept { return data_; }

    friend bool operator==(const ImageRGB&, const ImageRGB&) = default;

private:
    std::size_t offset(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel skin/non-skin decisions. Values are strictly 0 or 1.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, std::uint8_t fill = 0);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    std::uint8_t at(int x, int y) const noexcept {
        return bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)];
    }
    void set(int x, int y, std::uint8_t v) noexcept {
        bits_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
              static_cast<std::size_t>(x)] = v ? 1 : 0;
    }
    bool inside(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::size_t count() const noexcept;
    BinaryMask complement() const;

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Netpbm I/O. Images are P6 with maxval 255; masks are written as P4 when the
// path ends in ".pbm" and as black/white P6 otherwise.
ImageRGB load_image(const std::filesystem::path& path);
void save_image(const ImageRGB& img, const std::filesystem::path& path);

ImageRGB decode_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const ImageRGB& img);

void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Reads P4 (bit 1 = set) or P6 (any nonzero channel = set).
BinaryMask load_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pbm(const BinaryMask& mask);
BinaryMask decode_mask(std::span<const std::uint8_t> bytes);

ImageRGB mask_to_image(const BinaryMask& mask);

/// Per-channel cumulative-histogram equalization:
/// h(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255), with h = 0 when the
/// channel is constant.
ImageRGB equalize_histogram(const ImageRGB& img);

/// The 256-entry lookup table used by `equalize_histogram` for one channel.
std::array<std::uint8_t, 256> equalization_map(const std::array<std::size_t, 256>& histogram);

}  // namespace skinprob
