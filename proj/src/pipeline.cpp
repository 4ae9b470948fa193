#include "skinprob/pipeline.hpp"

#include "skinprob/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace skinprob {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw Error(ErrorKind::invalid_argument,
                "bad value '" + std::string(value) + "' for config key '" + std::string(key) + "'");
}

int to_int(std::string_view key, std::string_view value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
    return out;
}

double to_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        bad_value(key, value);
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    bad_value(key, value);
}

}  // namespace

void PipelineConfig::validate() const {
    StructuringElement{se_size};
    if (dark_threshold < 0 || dark_threshold > 255) {
        throw Error(ErrorKind::invalid_argument, "dark_threshold must lie in [0,255]");
    }
    if (!(min_block_fraction >= 0.0 && min_block_fraction < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "min_block_area must lie in [0,1)");
    }
    if (!(eye_level_frac >= 0.0)) throw Error(ErrorKind::invalid_argument, "eye_level_frac must be >= 0");
    if (!(side_tolerance >= 0.0 && side_tolerance < 1.0)) {
        throw Error(ErrorKind::invalid_argument, "side_tolerance must lie in [0,1)");
    }
    if (!(iou_success > 0.0 && iou_success <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "iou_success must lie in (0,1]");
    }
    baseline.validate();
}

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "equalize") cfg.equalize = to_bool(key, value);
    else if (key == "equalize_training") cfg.equalize_training = to_bool(key, value);
    else if (key == "kernel") cfg.kernel = parse_kernel(value);
    else if (key == "se_size") cfg.se_size = to_int(key, value);
    else if (key == "dark_threshold") cfg.dark_threshold = to_int(key, value);
    else if (key == "min_block_area") cfg.min_block_fraction = to_double(key, value);
    else if (key == "eye_level_frac") cfg.eye_level_frac = to_double(key, value);
    else if (key == "eye_ratio_mode") {
        if (value == "midpoint") cfg.eye_ratio_mode = EyeRatioMode::midpoint;
        else if (value == "per-eye") cfg.eye_ratio_mode = EyeRatioMode::per_eye;
        else bad_value(key, value);
    }
    else if (key == "side_tolerance") cfg.side_tolerance = to_double(key, value);
    else if (key == "side_views") cfg.try_side_views = to_bool(key, value);
    else if (key == "iou_success") cfg.iou_success = to_double(key, value);
    else if (key == "axis_mode") cfg.axis = parse_axis_mode(value);
    else if (key == "cb_min") cfg.baseline.cb_min = to_int(key, value);
    else if (key == "cb_max") cfg.baseline.cb_max = to_int(key, value);
    else if (key == "cr_min") cfg.baseline.cr_min = to_int(key, value);
    else if (key == "cr_max") cfg.baseline.cr_max = to_int(key, value);
    else if (key == "h_min") cfg.baseline.h_min = to_double(key, value);
    else if (key == "h_max") cfg.baseline.h_max = to_double(key, value);
    else if (key == "s_min") cfg.baseline.s_min = to_double(key, value);
    else if (key == "s_max") cfg.baseline.s_max = to_double(key, value);
    else if (key == "rg_bins") cfg.baseline.rg_bins = to_int(key, value);
    else if (key == "rg_hist_threshold") cfg.baseline.rg_hist_threshold = to_double(key, value);
    else throw Error(ErrorKind::invalid_argument, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::string_view text, PipelineConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::invalid_argument,
                        "config line " + std::to_string(line_no) + " is not key=value");
        }
        apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

SkinModel train_model(std::span<const ImageRGB> patches, const PipelineConfig& cfg) {
    if (!cfg.equalize_training) return SkinModel::fit(patches, cfg.kernel);
    std::vector<ImageRGB> equalized;
    equalized.reserve(patches.size());
    for (const auto& p : patches) equalized.push_back(equalize_histogram(p));
    return SkinModel::fit(equalized, cfg.kernel);
}

BinaryMask detect_skin(const ImageRGB& img, const SkinModel& model, const PipelineConfig& cfg) {
    return classify_skin(img, model, cfg.equalize);
}

FaceDetectionResult detect_faces(const ImageRGB& img, const SkinModel& model, const PipelineConfig& cfg) {
    const StructuringElement se(cfg.se_size);
    FaceDetectionResult result;
    result.skin_mask = morph_close(morph_open(classify_skin(img, model, cfg.equalize), se), se);
    if (result.skin_mask.count() == 0) return result;

    result.blocks = extract_dark_blocks(img, result.skin_mask,
                                        {cfg.dark_threshold, cfg.min_block_fraction, se});
    if (result.blocks.size() < 3) return result;

    auto candidates = match_frontal_triangle(
        result.blocks, {cfg.eye_level_frac, 0.9, 1.1, cfg.eye_ratio_mode});
    if (candidates.empty() && cfg.try_side_views) {
        candidates = match_side_triangle(result.blocks, {cfg.side_tolerance});
    }
    if (!candidates.empty()) {
        const TriangleCandidate& best = candidates.front();
        result.faces.push_back({best, face_box(best, cfg.axis)});
    }
    return result;
}

std::string format_detection(const Detection& d) {
    const FaceBox& b = d.box;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g",
                  std::string(to_string(b.pose)).c_str(), b.x1, b.y1, b.x2, b.y2, b.x3, b.y3, b.x4,
                  b.y4, d.triangle.score);
    return buf;
}

ImageRGB draw_overlay(const ImageRGB& img, std::span<const Detection> faces, Rgb colour) {
    ImageRGB out = img;
    const int w = img.width();
    const int h = img.height();
    for (const auto& face : faces) {
        const Rect r = face.box.extents();
        const int x0 = static_cast<int>(std::floor(r.x_min));
        const int y0 = static_cast<int>(std::floor(r.y_min));
        const int x1 = static_cast<int>(std::ceil(r.x_max));
        const int y1 = static_cast<int>(std::ceil(r.y_max));
        auto plot = [&](int x, int y) {
            if (x >= 0 && y >= 0 && x < w && y < h) out.set(x, y, colour);
        };
        for (int t = 0; t < 2; ++t) {
            for (int x = x0; x <= x1; ++x) {
                plot(x, y0 + t);
                plot(x, y1 - t);
            }
            for (int y = y0; y <= y1; ++y) {
                plot(x0 + t, y);
                plot(x1 - t, y);
            }
        }
    }
    return out;
}

}  // namespace skinprob
