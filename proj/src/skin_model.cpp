#include "skinprob/skin_model.hpp"

#include "skinprob/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace skinprob {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(Kernel kernel) {
    return kernel == Kernel::paper_literal ? "paper-literal" : "standard-gaussian";
}

Kernel parse_kernel(std::string_view name) {
    if (name == "standard-gaussian" || name == "standard") return Kernel::standard_gaussian;
    if (name == "paper-literal" || name == "literal") return Kernel::paper_literal;
    throw Error(ErrorKind::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

TrainedStats train_skin_model(std::span<const ImageRGB> patches) {
    std::array<std::uint64_t, 3> sums{};
    std::uint64_t n = 0;
    std::uint64_t digest = kFnvOffset;
    for (const auto& patch : patches) {
        const auto bytes = patch.bytes();
        for (std::size_t i = 0; i < bytes.size(); i += 3) {
            for (int c = 0; c < 3; ++c) {
                sums[c] += bytes[i + c];
                digest = (digest ^ bytes[i + c]) * kFnvPrime;
            }
        }
        n += patch.pixel_count();
    }
    if (n == 0) throw Error(ErrorKind::empty_training_set, "no training pixels supplied");

    TrainedStats out;
    out.pixel_count = n;
    out.digest = digest;
    const double count = static_cast<double>(n);
    std::array<double, 3> means{};
    for (int c = 0; c < 3; ++c) means[c] = static_cast<double>(sums[c]) / count;

    std::array<double, 3> sq{};
    for (const auto& patch : patches) {
        const auto bytes = patch.bytes();
        for (std::size_t i = 0; i < bytes.size(); i += 3) {
            for (int c = 0; c < 3; ++c) {
                const double d = static_cast<double>(bytes[i + c]) - means[c];
                sq[c] += d * d;
            }
        }
    }
    for (int c = 0; c < 3; ++c) {
        out.channels[c].mean = means[c];
        out.channels[c].std = std::max(std::sqrt(sq[c] / count), kStdEpsilon);
    }
    return out;
}

double gaussian_pdf(double x, const ChannelStats& stats, Kernel kernel) {
    const double d = x - stats.mean;
    if (kernel == Kernel::paper_literal) return std::exp(-0.5 * d * d / stats.std);
    return std::exp(-d * d / (2.0 * stats.std * stats.std)) /
           (stats.std * std::sqrt(2.0 * std::numbers::pi));
}

double log_gaussian_pdf(double x, const ChannelStats& stats, Kernel kernel) {
    const double d = x - stats.mean;
    if (kernel == Kernel::paper_literal) return -0.5 * d * d / stats.std;
    return -d * d / (2.0 * stats.std * stats.std) - std::log(stats.std) -
           0.5 * std::log(2.0 * std::numbers::pi);
}

double pixel_log_likelihood(Rgb pixel, const std::array<ChannelStats, 3>& channels, Kernel kernel) {
    return log_gaussian_pdf(pixel[0], channels[0], kernel) +
           log_gaussian_pdf(pixel[1], channels[1], kernel) +
           log_gaussian_pdf(pixel[2], channels[2], kernel);
}

double pixel_likelihood(Rgb pixel, const SkinModel& model) {
    return std::exp(pixel_log_likelihood(pixel, model.channels(), model.kernel()));
}

double tune_log_threshold(const std::array<ChannelStats, 3>& channels, Kernel kernel,
                          std::span<const ImageRGB> train_patches) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& patch : train_patches) {
        const auto bytes = patch.bytes();
        for (std::size_t i = 0; i < bytes.size(); i += 3) {
            best = std::min(best, pixel_log_likelihood({bytes[i], bytes[i + 1], bytes[i + 2]},
                                                       channels, kernel));
            any = true;
        }
    }
    if (!any) throw Error(ErrorKind::empty_training_set, "no training pixels supplied");
    return best;
}

double tune_threshold(const std::array<ChannelStats, 3>& channels, Kernel kernel,
                      std::span<const ImageRGB> train_patches) {
    return std::exp(tune_log_threshold(channels, kernel, train_patches));
}

SkinModel::SkinModel(std::array<ChannelStats, 3> channels, Kernel kernel, double log_threshold,
                     std::uint64_t train_pixel_count, std::uint64_t train_digest)
    : channels_(channels), kernel_(kernel), log_threshold_(log_threshold),
      train_pixel_count_(train_pixel_count), train_digest_(train_digest) {
    for (const auto& ch : channels_) {
        if (!(ch.std >= kStdEpsilon) || !std::isfinite(ch.std)) {
            throw Error(ErrorKind::invalid_argument, "channel std must be >= 0.5");
        }
        if (!(ch.mean >= 0.0 && ch.mean <= 255.0)) {
            throw Error(ErrorKind::invalid_argument, "channel mean must lie in [0,255]");
        }
    }
    if (!std::isfinite(log_threshold_)) {
        throw Error(ErrorKind::invalid_argument, "threshold must be positive and finite");
    }
    build_tables();
}

SkinModel SkinModel::fit(std::span<const ImageRGB> patches, Kernel kernel) {
    const TrainedStats stats = train_skin_model(patches);
    return SkinModel(stats.channels, kernel, tune_log_threshold(stats.channels, kernel, patches),
                     stats.pixel_count, stats.digest);
}

double SkinModel::threshold() const noexcept { return std::exp(log_threshold_); }

void SkinModel::build_tables() {
    // Same function as the direct path, so table lookups are bit-identical.
    for (int c = 0; c < 3; ++c) {
        for (int v = 0; v < 256; ++v) {
            tables_[c][v] = log_gaussian_pdf(v, channels_[c], kernel_);
        }
    }
}

std::string serialize_model(const SkinModel& model) {
    const auto& ch = model.channels();
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016" PRIx64, model.train_digest());
    std::ostringstream os;
    os << "{\n"
       << "  \"format_version\": " << model.format_version() << ",\n"
       << "  \"kernel\": \"" << to_string(model.kernel()) << "\",\n"
       << "  \"mean_r\": " << format_double(ch[0].mean) << ",\n"
       << "  \"mean_g\": " << format_double(ch[1].mean) << ",\n"
       << "  \"mean_b\": " << format_double(ch[2].mean) << ",\n"
       << "  \"std_r\": " << format_double(ch[0].std) << ",\n"
       << "  \"std_g\": " << format_double(ch[1].std) << ",\n"
       << "  \"std_b\": " << format_double(ch[2].std) << ",\n"
       << "  \"threshold\": " << format_double(model.threshold()) << ",\n"
       << "  \"log_threshold\": " << format_double(model.log_threshold()) << ",\n"
       << "  \"train_pixel_count\": " << model.train_pixel_count() << ",\n"
       << "  \"train_digest\": \"" << digest << "\",\n"
       << "  \"std_divisor\": \"population (N)\"\n"
       << "}\n";
    return os.str();
}

SkinModel parse_model(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw Error(ErrorKind::format, "unsupported model format_version");
        }
        const Kernel kernel = parse_kernel(j.at("kernel").get<std::string>());
        std::array<ChannelStats, 3> ch{};
        ch[0] = {j.at("mean_r").get<double>(), j.at("std_r").get<double>()};
        ch[1] = {j.at("mean_g").get<double>(), j.at("std_g").get<double>()};
        ch[2] = {j.at("mean_b").get<double>(), j.at("std_b").get<double>()};
        double log_threshold = 0.0;
        if (j.contains("log_threshold")) {
            log_threshold = j.at("log_threshold").get<double>();
        } else {
            const double t = j.at("threshold").get<double>();
            if (!(t > 0.0)) throw Error(ErrorKind::format, "threshold must be > 0");
            log_threshold = std::log(t);
        }
        std::uint64_t digest = 0;
        if (j.contains("train_digest")) {
            digest = std::stoull(j.at("train_digest").get<std::string>(), nullptr, 16);
        }
        return SkinModel(ch, kernel, log_threshold, j.value("train_pixel_count", std::uint64_t{0}),
                         digest);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::format, std::string("malformed model file: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::format) throw;
        throw Error(ErrorKind::format, std::string("invalid model: ") + e.what());
    } catch (const std::logic_error& e) {
        throw Error(ErrorKind::format, std::string("malformed model file: ") + e.what());
    }
}

void save_model(const SkinModel& model, const std::filesystem::path& path) {
    if (path.empty()) throw Error(ErrorKind::io, "empty path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out << serialize_model(model);
    if (!out) throw Error(ErrorKind::io, "write failed on '" + path.string() + "'");
}

SkinModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace skinprob
