#include "skinprob/baselines.hpp"

#include "skinprob/error.hpp"

#include <algorithm>
#include <cmath>

namespace skinprob {

void BaselineConfig::validate() const {
    auto chroma_ok = [](int lo, int hi) { return lo >= 16 && hi <= 240 && lo <= hi; };
    if (!chroma_ok(cb_min, cb_max) || !chroma_ok(cr_min, cr_max)) {
        throw Error(ErrorKind::invalid_argument, "Cb/Cr ranges must satisfy 16 <= lo <= hi <= 240");
    }
    if (!(h_min >= 0.0 && h_min < 360.0 && h_max >= 0.0 && h_max < 360.0)) {
        throw Error(ErrorKind::invalid_argument, "hue bounds must lie in [0,360)");
    }
    if (!(s_min >= 0.0 && s_max <= 1.0 && s_min <= s_max)) {
        throw Error(ErrorKind::invalid_argument, "saturation range must satisfy 0 <= lo <= hi <= 1");
    }
    if (rg_bins < 2) throw Error(ErrorKind::invalid_argument, "rg_bins must be >= 2");
    if (!(rg_hist_threshold >= 0.0)) {
        throw Error(ErrorKind::invalid_argument, "rg_hist_threshold must be >= 0");
    }
}

YCbCr rgb_to_ycbcr(Rgb pixel) {
    const double r = pixel[0] / 255.0;
    const double g = pixel[1] / 255.0;
    const double b = pixel[2] / 255.0;
    const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
    return {static_cast<int>(std::round(16.0 + 219.0 * luma)),
            static_cast<int>(std::round(128.0 + 224.0 * (b - luma) / 1.772)),
            static_cast<int>(std::round(128.0 + 224.0 * (r - luma) / 1.402))};
}

Hsv rgb_to_hsv(Rgb pixel) {
    const int r = pixel[0];
    const int g = pixel[1];
    const int b = pixel[2];
    const int hi = std::max({r, g, b});
    const int lo = std::min({r, g, b});
    const int chroma = hi - lo;
    Hsv out;
    out.v = hi / 255.0;
    if (chroma == 0) {
        out.achromatic = true;
        return out;
    }
    out.s = static_cast<double>(chroma) / hi;
    double h = 0.0;
    if (hi == r) {
        h = 60.0 * static_cast<double>(g - b) / chroma;
    } else if (hi == g) {
        h = 60.0 * (2.0 + static_cast<double>(b - r) / chroma);
    } else {
        h = 60.0 * (4.0 + static_cast<double>(r - g) / chroma);
    }
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

Chromaticity rgb_to_chromaticity(Rgb pixel) {
    const int sum = pixel[0] + pixel[1] + pixel[2];
    if (sum == 0) return {1.0 / 3.0, 1.0 / 3.0};
    return {static_cast<double>(pixel[0]) / sum, static_cast<double>(pixel[1]) / sum};
}

namespace {

template <typename Pred>
BinaryMask classify_pixels(const ImageRGB& img, Pred&& pred) {
    BinaryMask mask(img.width(), img.height());
    const auto src = img.bytes();
    auto dst = mask.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = pred(Rgb{src[3 * i], src[3 * i + 1], src[3 * i + 2]}) ? 1 : 0;
    }
    return mask;
}

}  // namespace

BinaryMask classify_ycbcr(const ImageRGB& img, const BaselineConfig& cfg) {
    cfg.validate();
    return classify_pixels(img, [&](Rgb p) {
        const YCbCr c = rgb_to_ycbcr(p);
        return c.cb >= cfg.cb_min && c.cb <= cfg.cb_max && c.cr >= cfg.cr_min && c.cr <= cfg.cr_max;
    });
}

BinaryMask classify_hsv(const ImageRGB& img, const BaselineConfig& cfg) {
    cfg.validate();
    const bool wraps = cfg.h_min > cfg.h_max;
    return classify_pixels(img, [&](Rgb p) {
        const Hsv c = rgb_to_hsv(p);
        if (c.achromatic) return false;
        const bool hue_ok = wraps ? (c.h >= cfg.h_min || c.h <= cfg.h_max)
                                  : (c.h >= cfg.h_min && c.h <= cfg.h_max);
        return hue_ok && c.s >= cfg.s_min && c.s <= cfg.s_max;
    });
}

RgHistogram::RgHistogram(int bins, std::vector<double> cells) : bins_(bins), cells_(std::move(cells)) {
    if (bins < 2) throw Error(ErrorKind::invalid_argument, "rg histogram needs at least 2 bins");
    if (cells_.size() != static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins)) {
        throw Error(ErrorKind::invalid_argument, "rg histogram cell count must be bins^2");
    }
}

int RgHistogram::bin_of(double value) const noexcept {
    return std::clamp(static_cast<int>(value * bins_), 0, bins_ - 1);
}

double RgHistogram::lookup(Rgb pixel) const noexcept {
    const Chromaticity c = rgb_to_chromaticity(pixel);
    return at(bin_of(c.r), bin_of(c.g));
}

RgHistogram train_rg_histogram(std::span<const ImageRGB> patches, int bins) {
    if (bins < 2) throw Error(ErrorKind::invalid_argument, "rg histogram needs at least 2 bins");
    std::vector<double> counts(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0);
    RgHistogram shape(bins, counts);
    std::size_t total = 0;
    for (const auto& patch : patches) {
        const auto src = patch.bytes();
        for (std::size_t i = 0; i < src.size(); i += 3) {
            const Chromaticity c = rgb_to_chromaticity({src[i], src[i + 1], src[i + 2]});
            counts[static_cast<std::size_t>(shape.bin_of(c.r)) * bins +
                   static_cast<std::size_t>(shape.bin_of(c.g))] += 1.0;
            ++total;
        }
    }
    if (total == 0) throw Error(ErrorKind::empty_training_set, "no training pixels supplied");
    const double peak = *std::max_element(counts.begin(), counts.end());
    for (auto& v : counts) v /= peak;
    return RgHistogram(bins, std::move(counts));
}

BinaryMask classify_rg(const ImageRGB& img, const RgHistogram& hist, double threshold) {
    return classify_pixels(img, [&](Rgb p) { return hist.lookup(p) >= threshold; });
}

}  // namespace skinprob
