#pragma once

#include "skinprob/imaging.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skinprob {

/// Floor applied to every trained standard deviation, in gray levels.
inline constexpr double kStdEpsilon = 0.5;
inline constexpr int kModelFormatVersion = 1;

enum class Kernel {
    /// (1 / (std * sqrt(2 pi))) * exp(-(x - mean)^2 / (2 std^2))
    standard_gaussian,
    /// exp(-0.5 * (x - mean)^2 / std): no normalising factor, std not squared.
    paper_literal,
};

std::string_view to_string(Kernel kernel);
Kernel parse_kernel(std::string_view name);

struct ChannelStats {
    double mean = 0.0;
    double std = kStdEpsilon;

    friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

struct TrainedStats {
    std::array<ChannelStats, 3> channels;  // R, G, B
    std::uint64_t pixel_count = 0;
    std::uint64_t digest = 0;  // FNV-1a over the pooled training bytes

    const ChannelStats& red() const noexcept { return channels[0]; }
    const ChannelStats& green() const noexcept { return channels[1]; }
    const ChannelStats& blue() const noexcept { return channels[2]; }
};

/// Pooled population mean and standard deviation (divisor N) per channel over
/// every pixel of every patch. Throws empty-training-set when there are no pixels.
TrainedStats train_skin_model(std::span<const ImageRGB> patches);

double gaussian_pdf(double x, const ChannelStats& stats, Kernel kernel);
double log_gaussian_pdf(double x, const ChannelStats& stats, Kernel kernel);

/// Trained per-channel statistics plus the tuned decision threshold.
///
/// Decisions are made in log space: a pixel is skin iff its summed per-channel
/// log density is >= log_threshold(). The linear accessors exist for reporting.
class SkinModel {
public:
    SkinModel() = default;
    SkinModel(std::array<ChannelStats, 3> channels, Kernel kernel, double log_threshold,
              std::uint64_t train_pixel_count = 0, std::uint64_t train_digest = 0);

    /// Trains statistics and tunes the threshold over the same patches.
    static SkinModel fit(std::span<const ImageRGB> patches, Kernel kernel = Kernel::standard_gaussian);

    const ChannelStats& channel(int c) const noexcept { return channels_[static_cast<std::size_t>(c)]; }
    const std::array<ChannelStats, 3>& channels() const noexcept { return channels_; }
    Kernel kernel() const noexcept { return kernel_; }
    double log_threshold() const noexcept { return log_threshold_; }
    double threshold() const noexcept;
    std::uint64_t train_pixel_count() const noexcept { return train_pixel_count_; }
    std::uint64_t train_digest() const noexcept { return train_digest_; }
    int format_version() const noexcept { return kModelFormatVersion; }

    /// Log-likelihood of an integer pixel via the precomputed per-channel tables.
    double log_likelihood(Rgb p) const noexcept {
        return tables_[0][p[0]] + tables_[1][p[1]] + tables_[2][p[2]];
    }
    bool is_skin(Rgb p) const noexcept { return log_likelihood(p) >= log_threshold_; }

    friend bool operator==(const SkinModel& a, const SkinModel& b) {
        return a.channels_ == b.channels_ && a.kernel_ == b.kernel_ &&
               a.log_threshold_ == b.log_threshold_ &&
               a.train_pixel_count_ == b.train_pixel_count_ && a.train_digest_ == b.train_digest_;
    }

private:
    void build_tables();

    std::array<ChannelStats, 3> channels_{};
    Kernel kernel_ = Kernel::standard_gaussian;
    double log_threshold_ = 0.0;
    std::uint64_t train_pixel_count_ = 0;
    std::uint64_t train_digest_ = 0;
    std::array<std::array<double, 256>, 3> tables_{};
};

/// Product of the three per-channel densities, evaluated as exp of the summed
/// log densities. Computed directly, without the model's tables.
double pixel_likelihood(Rgb pixel, const SkinModel& model);
double pixel_log_likelihood(Rgb pixel, const std::array<ChannelStats, 3>& channels, Kernel kernel);

/// Minimum log-likelihood over all training pixels. Throws empty-training-set.
double tune_log_threshold(const std::array<ChannelStats, 3>& channels, Kernel kernel,
                          std::span<const ImageRGB> train_patches);
/// Linear form of `tune_log_threshold`.
double tune_threshold(const std::array<ChannelStats, 3>& channels, Kernel kernel,
                      std::span<const ImageRGB> train_patches);

// Model file: UTF-8 JSON, numbers printed with 17 significant digits.
std::string serialize_model(const SkinModel& model);
SkinModel parse_model(std::string_view json);
void save_model(const SkinModel& model, const std::filesystem::path& path);
SkinModel load_model(const std::filesystem::path& path);

}  // namespace skinprob
