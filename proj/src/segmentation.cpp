#include "skinprob/segmentation.hpp"

#include "skinprob/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace skinprob {

StructuringElement::StructuringElement(int side) : side_(side) {
    if (side < 1 || side % 2 == 0) {
        throw Error(ErrorKind::invalid_argument, "structuring element side must be odd and >= 1");
    }
}

BinaryMask classify_skin(const ImageRGB& img, const SkinModel& model, bool equalize) {
    const ImageRGB source = equalize ? equalize_histogram(img) : img;
    BinaryMask mask(source.width(), source.height());
    const auto src = source.bytes();
    auto dst = mask.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = model.is_skin({src[3 * i], src[3 * i + 1], src[3 * i + 2]}) ? 1 : 0;
    }
    return mask;
}

namespace {

// Square SE is separable: a horizontal pass then a vertical pass over the
// in-bounds window. `keep_if_any` selects dilation (any) versus erosion (all).
BinaryMask square_pass(const BinaryMask& mask, int radius, bool keep_if_any) {
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool any = false;
            bool all = true;
            for (int dx = std::max(0, x - radius); dx <= std::min(w - 1, x + radius); ++dx) {
                const bool v = mask.at(dx, y) != 0;
                any |= v;
                all &= v;
            }
            tmp.set(x, y, keep_if_any ? any : all);
        }
    }
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool any = false;
            bool all = true;
            for (int dy = std::max(0, y - radius); dy <= std::min(h - 1, y + radius); ++dy) {
                const bool v = tmp.at(x, dy) != 0;
                any |= v;
                all &= v;
            }
            out.set(x, y, keep_if_any ? any : all);
        }
    }
    return out;
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    return square_pass(mask, se.radius(), true);
}

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    return square_pass(mask, se.radius(), false);
}

BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) {
    return dilate(erode(mask, se), se);
}

BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se) {
    return erode(dilate(mask, se), se);
}

std::vector<FeatureBlock> connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8) {
        throw Error(ErrorKind::invalid_argument, "connectivity must be 4 or 8");
    }
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<std::pair<int, int>> stack;
    std::vector<FeatureBlock> blocks;

    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t idx0 = static_cast<std::size_t>(y0) * w + x0;
            if (!mask.at(x0, y0) || seen[idx0]) continue;
            seen[idx0] = 1;
            stack.assign(1, {x0, y0});
            FeatureBlock block;
            block.bbox = {x0, y0, x0, y0};
            double sx = 0.0;
            double sy = 0.0;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                ++block.area;
                sx += x;
                sy += y;
                block.bbox.x_min = std::min(block.bbox.x_min, x);
                block.bbox.x_max = std::max(block.bbox.x_max, x);
                block.bbox.y_min = std::min(block.bbox.y_min, y);
                block.bbox.y_max = std::max(block.bbox.y_max, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (!mask.inside(nx, ny) || !mask.at(nx, ny)) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                        if (seen[nidx]) continue;
                        seen[nidx] = 1;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            block.cx = sx / static_cast<double>(block.area);
            block.cy = sy / static_cast<double>(block.area);
            blocks.push_back(block);
        }
    }

    std::stable_sort(blocks.begin(), blocks.end(), [](const FeatureBlock& a, const FeatureBlock& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
        return a.bbox.x_min < b.bbox.x_min;
    });
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].label = static_cast<int>(i) + 1;
    return blocks;
}

std::vector<FeatureBlock> extract_dark_blocks(const ImageRGB& img, const BinaryMask& skin_mask,
                                              const DarkBlockOptions& options) {
    if (img.width() != skin_mask.width() || img.height() != skin_mask.height()) {
        throw Error(ErrorKind::invalid_argument, "image and mask dimensions differ");
    }
    if (options.dark_threshold < 0 || options.dark_threshold > 255) {
        throw Error(ErrorKind::invalid_argument, "dark threshold must lie in [0,255]");
    }
    const auto skin = connected_components(skin_mask, 8);
    if (skin.empty()) throw Error(ErrorKind::no_skin_region, "skin mask is empty");
    const PixelRect region = skin.front().bbox;

    BinaryMask candidates(img.width(), img.height());
    const int dark_sum = 3 * options.dark_threshold;
    for (int y = region.y_min; y <= region.y_max; ++y) {
        for (int x = region.x_min; x <= region.x_max; ++x) {
            if (skin_mask.at(x, y)) continue;
            const Rgb p = img.at(x, y);
            if (p[0] + p[1] + p[2] < dark_sum) candidates.set(x, y, 1);
        }
    }

    auto blocks = connected_components(morph_open(candidates, options.se), 8);
    const double min_area = options.min_block_fraction * static_cast<double>(img.pixel_count());
    std::erase_if(blocks, [&](const FeatureBlock& b) { return static_cast<double>(b.area) < min_area; });
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].label = static_cast<int>(i) + 1;
    return blocks;
}

}  // namespace skinprob
