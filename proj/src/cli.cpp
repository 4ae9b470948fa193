#include "skinprob/cli.hpp"

#include "skinprob/baselines.hpp"
#include "skinprob/error.hpp"
#include "skinprob/evaluation.hpp"
#include "skinprob/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>

namespace skinprob {

namespace {

// Flags that override config-file values; unset optionals leave the file value.
struct TuningFlags {
    std::string config_path;
    bool equalize = false;
    bool no_equalize = false;
    std::optional<int> se_size;
    std::optional<int> dark_threshold;
    std::optional<double> min_block_area;
    std::optional<double> eye_level_frac;
    std::optional<double> side_tolerance;
    std::optional<double> iou_success;
    std::optional<std::string> axis_mode;
    std::optional<std::string> eye_ratio_mode;

    void attach(CLI::App* cmd, bool detection) {
        cmd->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
        cmd->add_flag("--equalize", equalize, "Histogram-equalize the input first");
        cmd->add_flag("--no-equalize", no_equalize, "Disable equalization");
        if (!detection) return;
        cmd->add_option("--se-size", se_size, "Structuring element side (odd)");
        cmd->add_option("--dark-threshold", dark_threshold, "Dark feature intensity threshold 0-255");
        cmd->add_option("--min-block-area", min_block_area, "Minimum block area, fraction of image");
        cmd->add_option("--eye-level-frac", eye_level_frac, "Allowed eye height difference / D(eyes)");
        cmd->add_option("--side-tolerance", side_tolerance, "Relative tolerance of side-view ratios");
        cmd->add_option("--iou", iou_success, "IoU needed for a successful localization");
        cmd->add_option("--axis-mode", axis_mode, "literal|flipped");
        cmd->add_option("--eye-ratio-mode", eye_ratio_mode, "midpoint|per-eye");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config_file(config_path);
        if (equalize) cfg.equalize = true;
        if (no_equalize) cfg.equalize = false;
        if (se_size) cfg.se_size = *se_size;
        if (dark_threshold) cfg.dark_threshold = *dark_threshold;
        if (min_block_area) cfg.min_block_fraction = *min_block_area;
        if (eye_level_frac) cfg.eye_level_frac = *eye_level_frac;
        if (side_tolerance) cfg.side_tolerance = *side_tolerance;
        if (iou_success) cfg.iou_success = *iou_success;
        if (axis_mode) apply_config_entry(cfg, "axis_mode", *axis_mode);
        if (eye_ratio_mode) apply_config_entry(cfg, "eye_ratio_mode", *eye_ratio_mode);
        cfg.validate();
        return cfg;
    }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw Error(ErrorKind::io, "write failed on '" + path.string() + "'");
}

std::vector<ImageRGB> load_images(const std::vector<std::string>& paths) {
    std::vector<ImageRGB> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(load_image(p));
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trainable Gaussian skin detection and triangle-based face localization", "skinprob"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "Fit a skin model to pure-skin patches");
    std::vector<std::string> train_patches;
    std::string train_out;
    std::string train_kernel = "standard-gaussian";
    std::string train_config;
    bool train_equalize = false;
    train->add_option("patches", train_patches, "Pure-skin training patches (P6)")->required();
    train->add_option("-o,--output", train_out, "Model file (default: standard output)");
    train->add_option("--kernel", train_kernel, "standard-gaussian|paper-literal");
    train->add_option("--config", train_config, "key=value config file")->check(CLI::ExistingFile);
    train->add_flag("--equalize-training", train_equalize, "Equalize patches before fitting");

    // detect-skin
    auto* skin = app.add_subcommand("detect-skin", "Classify skin pixels");
    std::string skin_img;
    std::string skin_model;
    std::string skin_out;
    TuningFlags skin_flags;
    skin->add_option("image", skin_img, "Input image (P6)")->required();
    skin->add_option("-m,--model", skin_model, "Model file")->required();
    skin->add_option("-o,--output", skin_out, "Mask output (.pbm -> P4, otherwise P6)")->required();
    skin_flags.attach(skin, false);

    // detect-face
    auto* face = app.add_subcommand("detect-face", "Localize faces");
    std::string face_img;
    std::string face_model;
    std::string face_out;
    std::string face_overlay;
    TuningFlags face_flags;
    face->add_option("image", face_img, "Input image (P6)")->required();
    face->add_option("-m,--model", face_model, "Model file")->required();
    face->add_option("-o,--output", face_out, "Box file (default: standard output)");
    face->add_option("--overlay", face_overlay, "Write a copy of the input with boxes drawn");
    face_flags.attach(face, true);

    // baseline
    auto* base = app.add_subcommand("baseline", "Run a colour-space reference classifier");
    std::string base_img;
    std::string base_space;
    std::string base_out;
    std::vector<std::string> base_train;
    TuningFlags base_flags;
    base->add_option("image", base_img, "Input image (P6)")->required();
    base->add_option("--space", base_space, "rg|ycbcr|hsv")
        ->required()
        ->check(CLI::IsMember({"rg", "ycbcr", "hsv"}));
    base->add_option("-o,--output", base_out, "Mask output")->required();
    base->add_option("--train", base_train, "Skin patches for the rg histogram");
    base_flags.attach(base, false);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score face localization over a manifest");
    std::string eval_manifest;
    std::string eval_model;
    std::string eval_out;
    TuningFlags eval_flags;
    eval->add_option("manifest", eval_manifest, "Manifest file")->required();
    eval->add_option("-m,--model", eval_model, "Model file")->required();
    eval->add_option("-o,--output", eval_out, "Report table; JSON is written to <output>.json");
    eval_flags.attach(eval, true);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic scenes with ground truth");
    std::uint64_t synth_seed = 1;
    int synth_count = 1;
    std::string synth_dir;
    bool synth_faceless = false;
    int synth_patch = 64;
    synth->add_option("--seed", synth_seed, "First seed")->required();
    synth->add_option("--count", synth_count, "Number of scenes")->check(CLI::PositiveNumber);
    synth->add_option("-o,--output", synth_dir, "Output directory")->required();
    synth->add_flag("--faceless", synth_faceless, "Skin region without facial features");
    synth->add_option("--patch-size", synth_patch, "Side of the training patches")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*train) {
            PipelineConfig cfg = train_config.empty() ? PipelineConfig{} : load_config_file(train_config);
            if (train->count("--kernel")) cfg.kernel = parse_kernel(train_kernel);
            cfg.validate();
            if (train_equalize) cfg.equalize_training = true;
            const auto patches = load_images(train_patches);
            const SkinModel model = train_model(patches, cfg);
            if (train_out.empty()) {
                out << serialize_model(model);
            } else {
                save_model(model, train_out);
            }
            err << "trained on " << model.train_pixel_count() << " pixels, threshold "
                << model.threshold() << "\n";
        } else if (*skin) {
            const PipelineConfig cfg = skin_flags.resolve();
            const SkinModel model = load_model(skin_model);
            const BinaryMask mask = detect_skin(load_image(skin_img), model, cfg);
            save_mask(mask, skin_out);
            err << mask.count() << " of " << mask.size() << " pixels classified as skin\n";
        } else if (*face) {
            const PipelineConfig cfg = face_flags.resolve();
            const SkinModel model = load_model(face_model);
            const ImageRGB img = load_image(face_img);
            const FaceDetectionResult result = detect_faces(img, model, cfg);
            std::string lines;
            for (const auto& d : result.faces) lines += format_detection(d) + "\n";
            if (face_out.empty()) {
                out << lines;
            } else {
                write_text(face_out, lines);
            }
            if (!face_overlay.empty()) save_image(draw_overlay(img, result.faces), face_overlay);
            err << result.blocks.size() << " dark blocks, " << result.faces.size() << " face(s)\n";
        } else if (*base) {
            const PipelineConfig cfg = base_flags.resolve();
            ImageRGB img = load_image(base_img);
            if (cfg.equalize) img = equalize_histogram(img);
            BinaryMask mask;
            if (base_space == "ycbcr") {
                mask = classify_ycbcr(img, cfg.baseline);
            } else if (base_space == "hsv") {
                mask = classify_hsv(img, cfg.baseline);
            } else {
                if (base_train.empty()) {
                    err << "error: --space rg needs --train patches\n";
                    return kExitUsage;
                }
                const auto patches = load_images(base_train);
                mask = classify_rg(img, train_rg_histogram(patches, cfg.baseline.rg_bins),
                                   cfg.baseline.rg_hist_threshold);
            }
            save_mask(mask, base_out);
        } else if (*eval) {
            const PipelineConfig cfg = eval_flags.resolve();
            const SkinModel model = load_model(eval_model);
            const DatasetManifest manifest = load_manifest(eval_manifest);
            const EvaluationReport report = evaluate(manifest, model, cfg, threads_from_environment());
            const std::string json = report_to_json(report);
            if (!eval_out.empty()) {
                write_text(eval_out, format_report_table(report));
                write_text(eval_out + ".json", json);
            }
            err << format_report_table(report);
            out << json;
        } else if (*synth) {
            const std::filesystem::path dir(synth_dir);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());
            SceneParams params;
            params.face = !synth_faceless;
            std::string manifest;
            for (int n = 0; n < synth_count; ++n) {
                const std::uint64_t seed = synth_seed + static_cast<std::uint64_t>(n);
                const SyntheticScene scene = generate_synthetic_scene(seed, params);
                const std::string name = "scene_" + std::to_string(seed) + ".ppm";
                save_image(scene.image, dir / name);
                save_image(generate_skin_patch(seed, params, synth_patch),
                           dir / ("skin_patch_" + std::to_string(seed) + ".ppm"));
                manifest += name;
                if (scene.truth) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, " %.17g %.17g %.17g %.17g", scene.truth->x_min,
                                  scene.truth->y_min, scene.truth->x_max, scene.truth->y_max);
                    manifest += buf;
                }
                manifest += "\n";
            }
            write_text(dir / "manifest.txt", manifest);
            out << (dir / "manifest.txt").string() << "\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::io || e.kind() == ErrorKind::format ? kExitIo : kExitUsage;
    }
    return kExitOk;
}

}  // namespace skinprob
