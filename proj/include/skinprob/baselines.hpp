#pragma once

#include "skinprob/imaging.hpp"

#include <span>
#include <vector>

namespace skinprob {

// Reference colour-space classifiers. The default ranges below are
// implementation defaults, not values taken from any published evaluation.
struct BaselineConfig {
    int cb_min = 77;
    int cb_max = 127;
    int cr_min = 133;
    int cr_max = 173;
    double h_min = 0.0;   // degrees; h_min > h_max wraps through 0
    double h_max = 50.0;
    double s_min = 0.23;
    double s_max = 0.68;
    int rg_bins = 32;
    double rg_hist_threshold = 0.05;

    /// Throws invalid-argument when a range is inverted or out of bounds.
    void validate() const;
};

struct YCbCr {
    int y = 0;
    int cb = 0;
    int cr = 0;
    friend bool operator==(const YCbCr&, const YCbCr&) = default;
};

/// Rec. 601 studio range: Y in [16,235], Cb/Cr in [16,240], rounded half away
/// from zero.
YCbCr rgb_to_ycbcr(Rgb pixel);

struct Hsv {
    double h = 0.0;  // degrees in [0,360)
    double s = 0.0;  // [0,1]
    double v = 0.0;  // [0,1]
    bool achromatic = false;  // S == 0, hue undefined and reported as 0
};

Hsv rgb_to_hsv(Rgb pixel);

struct Chromaticity {
    double r = 0.0;
    double g = 0.0;
};

/// (R, G) / (R + G + B); a black pixel maps to (1/3, 1/3).
Chromaticity rgb_to_chromaticity(Rgb pixel);

BinaryMask classify_ycbcr(const ImageRGB& img, const BaselineConfig& cfg);
BinaryMask classify_hsv(const ImageRGB& img, const BaselineConfig& cfg);

/// bins x bins chromaticity histogram over [0,1]^2, normalised to peak 1.
class RgHistogram {
public:
    RgHistogram(int bins, std::vector<double> cells);

    int bins() const noexcept { return bins_; }
    double at(int r_bin, int g_bin) const noexcept {
        return cells_[static_cast<std::size_t>(r_bin) * static_cast<std::size_t>(bins_) +
                      static_cast<std::size_t>(g_bin)];
    }
    double lookup(Rgb pixel) const noexcept;
    int bin_of(double value) const noexcept;
    const std::vector<double>& cells() const noexcept { return cells_; }

private:
    int bins_;
    std::vector<double> cells_;
};

/// Throws empty-training-set when the patches hold no pixels.
RgHistogram train_rg_histogram(std::span<const ImageRGB> patches, int bins);
BinaryMask classify_rg(const ImageRGB& img, const RgHistogram& hist, double threshold);

}  // namespace skinprob
