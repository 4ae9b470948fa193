#pragma once

#include "skinprob/face_geometry.hpp"
#include "skinprob/imaging.hpp"
#include "skinprob/pipeline.hpp"
#include "skinprob/skin_model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skinprob {

/// Intersection over union of two rectangles; 0 when the union is empty.
double iou(const Rect& a, const Rect& b);

struct ManifestEntry {
    std::filesystem::path image;
    std::string name;  // path as written in the manifest; reports use this
    std::vector<Rect> boxes;                  // box mode; empty means "no face"
    std::optional<std::filesystem::path> mask;  // pixel mode
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    bool pixel_mode = false;
};

/// Lines are "path x_min y_min x_max y_max [...]" (box mode) or
/// "path maskpath" (pixel mode). Relative paths resolve against `base_dir`.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

struct ImageRecord {
    std::string path;
    bool matched = false;
    double best_iou = 0.0;  // pixel mode: Jaccard index of the skin masks
    std::size_t boxes_emitted = 0;
    std::string error;  // non-empty when the entry failed to load
};

struct PixelMetrics {
    std::uint64_t true_positive = 0;
    std::uint64_t false_positive = 0;
    std::uint64_t true_negative = 0;
    std::uint64_t false_negative = 0;

    double precision() const noexcept;
    double recall() const noexcept;
    double accuracy() const noexcept;
};

struct EvaluationReport {
    bool pixel_mode = false;
    std::size_t total_images = 0;
    std::size_t successful = 0;
    double rate = 0.0;  // 100 * successful / total_images
    std::vector<ImageRecord> per_image;
    std::optional<PixelMetrics> pixels;
};

/// Box mode: an image succeeds when some emitted box reaches IoU >= iou_success
/// against some ground-truth box, or when it has no ground-truth boxes and no
/// box is emitted. Pixel mode: an image succeeds when it loads; pixel counts
/// are pooled across images. Unloadable entries are recorded as failures.
/// `threads` = 0 evaluates sequentially; the report is identical either way.
EvaluationReport evaluate(const DatasetManifest& manifest, const SkinModel& model,
                          const PipelineConfig& cfg, unsigned threads = 0);

/// Aligned text table in the layout of a detection-rate comparison table.
std::string format_report_table(const EvaluationReport& report, std::string_view method = "Proposed Method");
std::string report_to_json(const EvaluationReport& report);

/// Parameters of the synthetic frontal-face scene generator.
struct SceneParams {
    int width = 240;
    int height = 240;
    bool face = true;           // plant eyes and mouth
    bool skin = true;           // draw the face ellipse
    Rgb skin_colour{205, 150, 120};
    int skin_noise = 10;
    Rgb background_colour{60, 110, 190};
    int background_noise = 12;
    Rgb feature_colour{25, 20, 20};
    int feature_noise = 8;
    double eye_distance_min = 40.0;
    double eye_distance_max = 70.0;
    double planted_ratio = 1.0;  // D(eyes) / D(eye midpoint, mouth)
    int clutter_blobs = 3;       // dark discs placed outside the face
    AxisMode axis = AxisMode::literal;
};

struct SyntheticScene {
    ImageRGB image;
    std::optional<Rect> truth;  // face-box extents for the planted features
    Point eye_left;
    Point eye_right;
    Point mouth;
};

/// Deterministic per seed. Throws infeasible-params when the features would
/// overlap or the face would not fit in the frame.
SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SceneParams& params = {});

/// Pure-skin training patch drawn from the same colour distribution as the
/// generator's face region.
ImageRGB generate_skin_patch(std::uint64_t seed, const SceneParams& params = {}, int size = 64);

/// Number of evaluation workers from SKINPROB_THREADS (unset: hardware
/// concurrency; 0: sequential).
unsigned threads_from_environment();

}  // namespace skinprob
