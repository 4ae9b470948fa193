#include "skinprob/evaluation.hpp"

#include "skinprob/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace skinprob {

double iou(const Rect& a, const Rect& b) {
    const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
    DatasetManifest manifest;
    std::set<std::string> seen;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool any_pixel = false;
    bool any_box = false;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    while (std::getline(lines, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string tok; fields >> tok;) tokens.push_back(tok);
        if (tokens.empty() || tokens.front().starts_with('#')) continue;
        const std::string where = "manifest line " + std::to_string(line_no);
        if (!seen.insert(tokens.front()).second) {
            throw Error(ErrorKind::format, where + ": duplicate path '" + tokens.front() + "'");
        }
        ManifestEntry entry;
        entry.image = resolve(tokens.front());
        entry.name = tokens.front();
        if (tokens.size() == 2) {
            entry.mask = resolve(tokens[1]);
            any_pixel = true;
        } else {
            if ((tokens.size() - 1) % 4 != 0) {
                throw Error(ErrorKind::format, where + ": boxes need four coordinates each");
            }
            for (std::size_t t = 1; t < tokens.size(); t += 4) {
                Rect r;
                try {
                    r = {std::stod(tokens[t]), std::stod(tokens[t + 1]), std::stod(tokens[t + 2]),
                         std::stod(tokens[t + 3])};
                } catch (const std::exception&) {
                    throw Error(ErrorKind::format, where + ": non-numeric box coordinate");
                }
                if (!(r.x_max > r.x_min && r.y_max > r.y_min)) {
                    throw Error(ErrorKind::format, where + ": box must have positive area");
                }
                entry.boxes.push_back(r);
            }
            any_box = true;
        }
        manifest.entries.push_back(std::move(entry));
    }
    if (any_pixel && any_box) {
        throw Error(ErrorKind::format, "manifest mixes box-mode and pixel-mode lines");
    }
    manifest.pixel_mode = any_pixel;
    return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open manifest '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

double PixelMetrics::precision() const noexcept {
    const auto d = true_positive + false_positive;
    return d ? static_cast<double>(true_positive) / static_cast<double>(d) : 0.0;
}

double PixelMetrics::recall() const noexcept {
    const auto d = true_positive + false_negative;
    return d ? static_cast<double>(true_positive) / static_cast<double>(d) : 0.0;
}

double PixelMetrics::accuracy() const noexcept {
    const auto d = true_positive + false_positive + true_negative + false_negative;
    return d ? static_cast<double>(true_positive + true_negative) / static_cast<double>(d) : 0.0;
}

namespace {

struct EntryOutcome {
    ImageRecord record;
    PixelMetrics pixels;
};

EntryOutcome evaluate_entry(const ManifestEntry& entry, const SkinModel& model, const PipelineConfig& cfg) {
    EntryOutcome out;
    out.record.path = entry.name.empty() ? entry.image.string() : entry.name;
    try {
        const ImageRGB img = load_image(entry.image);
        if (entry.mask) {
            const BinaryMask truth = load_mask(*entry.mask);
            const BinaryMask got = detect_skin(img, model, cfg);
            if (truth.width() != got.width() || truth.height() != got.height()) {
                throw Error(ErrorKind::format, "ground-truth mask size differs from image");
            }
            const auto t = truth.bits();
            const auto g = got.bits();
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (g[i] && t[i]) ++out.pixels.true_positive;
                else if (g[i]) ++out.pixels.false_positive;
                else if (t[i]) ++out.pixels.false_negative;
                else ++out.pixels.true_negative;
            }
            const auto uni = out.pixels.true_positive + out.pixels.false_positive + out.pixels.false_negative;
            out.record.best_iou = uni ? static_cast<double>(out.pixels.true_positive) / uni : 1.0;
            out.record.matched = true;
            return out;
        }
        const FaceDetectionResult result = detect_faces(img, model, cfg);
        out.record.boxes_emitted = result.faces.size();
        for (const auto& face : result.faces) {
            const Rect found = face.box.extents();
            for (const auto& truth : entry.boxes) {
                out.record.best_iou = std::max(out.record.best_iou, iou(found, truth));
            }
        }
        out.record.matched = entry.boxes.empty() ? result.faces.empty()
                                                 : out.record.best_iou >= cfg.iou_success;
    } catch (const Error& e) {
        out.record.error = e.what();
        out.record.matched = false;
        out.record.best_iou = 0.0;
    }
    return out;
}

}  // namespace

EvaluationReport evaluate(const DatasetManifest& manifest, const SkinModel& model,
                          const PipelineConfig& cfg, unsigned threads) {
    const std::size_t n = manifest.entries.size();
    std::vector<EntryOutcome> outcomes(n);
    const unsigned workers = std::min<std::size_t>(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) outcomes[i] = evaluate_entry(manifest.entries[i], model, cfg);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    outcomes[i] = evaluate_entry(manifest.entries[i], model, cfg);
                }
            });
        }
    }

    EvaluationReport report;
    report.pixel_mode = manifest.pixel_mode;
    report.total_images = n;
    PixelMetrics pooled;
    for (auto& o : outcomes) {
        if (o.record.matched) ++report.successful;
        pooled.true_positive += o.pixels.true_positive;
        pooled.false_positive += o.pixels.false_positive;
        pooled.true_negative += o.pixels.true_negative;
        pooled.false_negative += o.pixels.false_negative;
        report.per_image.push_back(std::move(o.record));
    }
    report.rate = n ? 100.0 * static_cast<double>(report.successful) / static_cast<double>(n) : 0.0;
    if (report.pixel_mode) report.pixels = pooled;
    return report;
}

std::string format_report_table(const EvaluationReport& report, std::string_view method) {
    const bool pixel = report.pixel_mode;
    const char* success_col = "Successful Localization";
    const char* rate_col = pixel ? "Skin Detection Rate" : "Face Localization Rate";
    const double rate = pixel && report.pixels ? 100.0 * report.pixels->accuracy() : report.rate;
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-18s %-18s %-25s %s\n", "Number of Images", "Method", success_col,
                  rate_col);
    out += buf;
    char rate_text[32];
    std::snprintf(rate_text, sizeof rate_text, "%.2f%%", rate);
    std::snprintf(buf, sizeof buf, "%-18zu %-18s %-25zu %s\n", report.total_images,
                  std::string(method).c_str(), report.successful, rate_text);
    out += buf;
    return out;
}

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json j;
    j["mode"] = report.pixel_mode ? "pixel" : "box";
    j["total_images"] = report.total_images;
    j["successful"] = report.successful;
    j["rate"] = report.rate;
    if (report.pixels) {
        j["pixel_metrics"] = {
            {"true_positive", report.pixels->true_positive},
            {"false_positive", report.pixels->false_positive},
            {"true_negative", report.pixels->true_negative},
            {"false_negative", report.pixels->false_negative},
            {"precision", report.pixels->precision()},
            {"recall", report.pixels->recall()},
            {"accuracy", report.pixels->accuracy()},
        };
    }
    auto& rows = j["per_image"] = nlohmann::ordered_json::array();
    for (const auto& r : report.per_image) {
        nlohmann::ordered_json row;
        row["path"] = r.path;
        row["matched"] = r.matched;
        row["best_iou"] = r.best_iou;
        row["boxes_emitted"] = r.boxes_emitted;
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

namespace {

// mt19937_64 output is fully specified by the standard; the distributions
// are not, so sampling is done by hand to keep scenes identical everywhere.
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) {  // inclusive
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(engine_() % span);
    }
    Rgb jitter(Rgb base, int amplitude) {
        Rgb out{};
        for (int c = 0; c < 3; ++c) {
            const int v = base[c] + (amplitude > 0 ? uniform_int(-amplitude, amplitude) : 0);
            out[c] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

struct Disc {
    Point centre;
    double radius;
    bool contains(int x, int y) const {
        const double dx = x - centre.x;
        const double dy = y - centre.y;
        return dx * dx + dy * dy <= radius * radius;
    }
};

}  // namespace

SyntheticScene generate_synthetic_scene(std::uint64_t seed, const SceneParams& params) {
    if (params.width < 16 || params.height < 16) {
        throw Error(ErrorKind::infeasible_params, "scene must be at least 16x16");
    }
    if (!(params.planted_ratio > 0.0) || !(params.eye_distance_min > 0.0) ||
        params.eye_distance_max < params.eye_distance_min) {
        throw Error(ErrorKind::infeasible_params, "invalid eye distance or ratio");
    }
    SceneRng rng(seed);
    SyntheticScene scene;
    scene.image = ImageRGB(params.width, params.height);

    const double eye_dist = rng.uniform(params.eye_distance_min, params.eye_distance_max);
    const double eye_r = std::max(3.0, std::round(eye_dist * 0.1));
    const double mouth_r = std::max(3.0, std::round(eye_dist * 0.12));
    const double drop = eye_dist / params.planted_ratio;  // eye midpoint to mouth
    const double semi_x = 0.5 * eye_dist + eye_r + 0.35 * eye_dist;
    const double semi_y = 0.5 * drop + 0.55 * eye_dist;

    if (params.face) {
        if (eye_dist < 2.0 * eye_r + 2.0) {
            throw Error(ErrorKind::infeasible_params, "eye discs would overlap");
        }
        if (std::hypot(0.5 * eye_dist, drop) < eye_r + mouth_r + 2.0) {
            throw Error(ErrorKind::infeasible_params, "mouth disc would overlap an eye");
        }
    }
    const double margin = 2.0;
    if (2.0 * (semi_x + margin) >= params.width || 2.0 * (semi_y + margin) >= params.height) {
        throw Error(ErrorKind::infeasible_params, "face does not fit in the frame");
    }
    const Point face{rng.uniform(semi_x + margin, params.width - 1 - semi_x - margin),
                     rng.uniform(semi_y + margin, params.height - 1 - semi_y - margin)};
    const double eye_y = face.y - 0.5 * drop;
    scene.eye_left = {face.x - 0.5 * eye_dist, eye_y};
    scene.eye_right = {face.x + 0.5 * eye_dist, eye_y};
    scene.mouth = {face.x, eye_y + drop};
    const Disc features[3] = {{scene.eye_left, eye_r}, {scene.eye_right, eye_r}, {scene.mouth, mouth_r}};

    auto in_face = [&](int x, int y) {
        const double dx = (x - face.x) / semi_x;
        const double dy = (y - face.y) / semi_y;
        return dx * dx + dy * dy <= 1.0;
    };
    if (params.face && params.skin) {
        for (const auto& f : features) {
            for (int y = static_cast<int>(f.centre.y - f.radius); y <= f.centre.y + f.radius; ++y) {
                for (int x = static_cast<int>(f.centre.x - f.radius); x <= f.centre.x + f.radius; ++x) {
                    if (f.contains(x, y) && !in_face(x, y)) {
                        throw Error(ErrorKind::infeasible_params, "feature leaves the face region");
                    }
                }
            }
        }
    }

    // Dark clutter, kept clear of the face's bounding box.
    const double fx0 = face.x - semi_x - 4.0;
    const double fx1 = face.x + semi_x + 4.0;
    const double fy0 = face.y - semi_y - 4.0;
    const double fy1 = face.y + semi_y + 4.0;
    std::vector<Disc> clutter;
    for (int b = 0, attempts = 0; b < params.clutter_blobs && attempts < 200; ++attempts) {
        const double r = rng.uniform(4.0, 8.0);
        const Point c{rng.uniform(r, params.width - 1 - r), rng.uniform(r, params.height - 1 - r)};
        const bool overlaps = params.skin && c.x + r >= fx0 && c.x - r <= fx1 && c.y + r >= fy0 &&
                              c.y - r <= fy1;
        if (overlaps) continue;
        clutter.push_back({c, r});
        ++b;
    }

    for (int y = 0; y < params.height; ++y) {
        for (int x = 0; x < params.width; ++x) {
            Rgb base = params.background_colour;
            int noise = params.background_noise;
            if (params.skin && in_face(x, y)) {
                base = params.skin_colour;
                noise = params.skin_noise;
                if (params.face) {
                    for (const auto& f : features) {
                        if (f.contains(x, y)) {
                            base = params.feature_colour;
                            noise = params.feature_noise;
                        }
                    }
                }
            }
            for (const auto& c : clutter) {
                if (c.contains(x, y)) {
                    base = params.feature_colour;
                    noise = params.feature_noise;
                }
            }
            scene.image.set(x, y, rng.jitter(base, noise));
        }
    }

    if (params.face && params.skin) {
        TriangleCandidate t;
        t.i = scene.eye_left;
        t.k = scene.eye_right;
        t.j = scene.mouth;
        scene.truth = face_box_frontal(t, params.axis).extents();
    }
    return scene;
}

ImageRGB generate_skin_patch(std::uint64_t seed, const SceneParams& params, int size) {
    SceneRng rng(seed ^ 0x5EEDu);
    ImageRGB patch(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) patch.set(x, y, rng.jitter(params.skin_colour, params.skin_noise));
    }
    return patch;
}

unsigned threads_from_environment() {
    if (const char* env = std::getenv("SKINPROB_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0') return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace skinprob
