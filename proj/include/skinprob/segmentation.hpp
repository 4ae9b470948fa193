#pragma once

#include "skinprob/imaging.hpp"
#include "skinprob/skin_model.hpp"

#include <vector>

namespace skinprob {

inline constexpr int kDefaultDarkThreshold = 80;
/// Minimum dark-block area, as a fraction of the image area.
inline constexpr double kDefaultMinBlockFraction = 0.0002;

/// Square, odd-sized, all-ones neighbourhood centred on its middle pixel.
class StructuringElement {
public:
    explicit StructuringElement(int side = 3);
    int side() const noexcept { return side_; }
    int radius() const noexcept { return side_ / 2; }

private:
    int side_;
};

struct PixelRect {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;  // inclusive
    int y_max = 0;  // inclusive

    int width() const noexcept { return x_max - x_min + 1; }
    int height() const noexcept { return y_max - y_min + 1; }
    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct FeatureBlock {
    double cx = 0.0;  // centroid, mean of member pixel centres
    double cy = 0.0;
    std::size_t area = 0;
    PixelRect bbox;
    int label = 0;
};

/// Optionally equalizes, then marks pixels whose likelihood reaches the
/// model threshold (inclusive).
BinaryMask classify_skin(const ImageRGB& img, const SkinModel& model, bool equalize = false);

// Dilation treats out-of-image pixels as 0; erosion ignores them (treats them
// as 1). This pair is an adjunction, so opening/closing are idempotent and
// exactly dual under complement.
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});
BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se = StructuringElement{});

/// Labels maximal 4- or 8-connected regions of set pixels. Result is sorted by
/// descending area, ties broken by (bbox.y_min, bbox.x_min). Labels are the
/// 1-based positions in that order.
std::vector<FeatureBlock> connected_components(const BinaryMask& mask, int connectivity = 8);

struct DarkBlockOptions {
    int dark_threshold = kDefaultDarkThreshold;
    double min_block_fraction = kDefaultMinBlockFraction;
    StructuringElement se{};
};

/// Non-skin pixels with mean intensity below the dark threshold, restricted to
/// the bounding box of the largest 8-connected skin component, opened and
/// labelled. Blocks smaller than min_block_fraction of the image are dropped.
/// Throws no-skin-region when the skin mask is empty.
std::vector<FeatureBlock> extract_dark_blocks(const ImageRGB& img, const BinaryMask& skin_mask,
                                              const DarkBlockOptions& options = {});

}  // namespace skinprob
