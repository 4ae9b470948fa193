#pragma once

#include "skinprob/baselines.hpp"
#include "skinprob/face_geometry.hpp"
#include "skinprob/segmentation.hpp"
#include "skinprob/skin_model.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skinprob {

/// Every tunable of the detection pipeline. Built-in defaults, optionally
/// overridden by a key=value config file, then by command-line flags.
struct PipelineConfig {
    bool equalize = false;           // equalize test images before classification
    bool equalize_training = false;  // equalize training patches before fitting
    Kernel kernel = Kernel::standard_gaussian;
    int se_size = 3;
    int dark_threshold = kDefaultDarkThreshold;
    double min_block_fraction = kDefaultMinBlockFraction;
    double eye_level_frac = 0.3;
    EyeRatioMode eye_ratio_mode = EyeRatioMode::midpoint;
    double side_tolerance = 0.15;
    bool try_side_views = true;
    double iou_success = 0.5;
    AxisMode axis = AxisMode::literal;
    BaselineConfig baseline;

    void validate() const;
};

/// Applies one `key = value` setting. Throws invalid-argument on unknown keys
/// or unparsable values.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);
/// Parses key=value lines; blank lines and lines starting with '#' are skipped.
/// Ranges are not checked here so later overrides can still fix a value; call
/// validate() on the final result.
PipelineConfig parse_config(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

SkinModel train_model(std::span<const ImageRGB> patches, const PipelineConfig& cfg);

struct Detection {
    TriangleCandidate triangle;
    FaceBox box;
};

struct FaceDetectionResult {
    BinaryMask skin_mask;  // after opening and closing
    std::vector<FeatureBlock> blocks;
    std::vector<Detection> faces;
};

/// Skin classification, morphological cleanup, dark-block extraction and
/// triangle matching. Frontal matches are preferred; side views are tried only
/// when no frontal triangle exists. At most the single best candidate of the
/// dominant skin region is reported.
FaceDetectionResult detect_faces(const ImageRGB& img, const SkinModel& model, const PipelineConfig& cfg);

BinaryMask detect_skin(const ImageRGB& img, const SkinModel& model, const PipelineConfig& cfg);

/// "pose x1 y1 x2 y2 x3 y3 x4 y4 score"
std::string format_detection(const Detection& d);

/// Copy of `img` with every face box outlined (2-pixel border, clipped).
ImageRGB draw_overlay(const ImageRGB& img, std::span<const Detection> faces, Rgb colour = {255, 0, 0});

}  // namespace skinprob
