// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any hard criterion fails; the latency target is reported but soft.

#include "skinprob/baselines.hpp"
#include "skinprob/cli.hpp"
#include "skinprob/evaluation.hpp"
#include "skinprob/face_geometry.hpp"
#include "skinprob/pipeline.hpp"
#include "skinprob/segmentation.hpp"
#include "skinprob/skin_model.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace skinprob;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int hard_failures = 0;

void report(int id, bool pass, const std::string& detail, bool soft = false) {
    std::printf("[%d] %s  %s%s\n", id, pass ? "PASS" : "FAIL", detail.c_str(), soft ? " (soft target)" : "");
    std::fflush(stdout);
    if (!pass && !soft) ++hard_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<ImageRGB> training_patches() {
    std::vector<ImageRGB> patches;
    for (std::uint64_t s = 0; s < 4; ++s) patches.push_back(generate_skin_patch(1000 + s));
    return patches;
}

void criterion_1() {
    std::mt19937_64 rng(1);
    std::vector<std::vector<ImageRGB>> sets = {training_patches()};
    for (int n = 0; n < 3; ++n)
        sets.push_back({testing::random_image_near(rng, 40, 30, {190, 130, 100}, 40),
                        testing::random_image(rng, 17, 9)});
    std::size_t pixels = 0, skin = 0;
    for (const auto& set : sets) {
        for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
            // round-trip through the serialized form, as the CLI does
            const SkinModel m = parse_model(serialize_model(SkinModel::fit(set, k)));
            for (const auto& p : set) {
                const BinaryMask mask = classify_skin(p, m);
                pixels += mask.size();
                skin += mask.count();
            }
        }
    }
    report(1, pixels == skin && pixels > 0,
           fmt("training patches classified as skin: %zu / %zu (%.3f%%)", skin, pixels, 100.0 * skin / pixels));
}

void criterion_2() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2);
    const BaselineConfig cfg;
    const std::vector<ImageRGB> patches = training_patches();
    const SkinModel models[] = {SkinModel::fit(patches), SkinModel::fit(patches, Kernel::paper_literal)};
    const RgHistogram hist = train_rg_histogram(patches, cfg.rg_bins);
    const auto naive_hist = testing::naive_rg_histogram(patches, cfg.rg_bins);
    std::size_t mismatches[4] = {0, 0, 0, 0};
    std::size_t positives[4] = {0, 0, 0, 0};
    for (int n = 0; n < 50; ++n) {
        // half uniform noise, half clustered near skin so both labels occur
        auto make = [&] {
            return n % 2 ? testing::random_image(rng, 64, 64)
                         : testing::random_image_near(rng, 64, 64, {200, 145, 115}, 40);
        };
        const ImageRGB a = make(), b = make(), c = make(), d = make();
        const BinaryMask ma = classify_skin(a, models[n % 2]);
        const BinaryMask oa = testing::naive_classify_skin(a, models[n % 2]);
        const BinaryMask mb = classify_ycbcr(b, cfg);
        const BinaryMask mc = classify_hsv(c, cfg);
        const BinaryMask md = classify_rg(d, hist, cfg.rg_hist_threshold);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                mismatches[0] += ma.at(x, y) != oa.at(x, y);
                mismatches[1] += mb.at(x, y) != testing::naive_ycbcr_skin(b.at(x, y), cfg);
                mismatches[2] += mc.at(x, y) != testing::naive_hsv_skin(c.at(x, y), cfg);
                mismatches[3] += md.at(x, y) !=
                                 testing::naive_rg_skin(d.at(x, y), naive_hist, cfg.rg_bins, cfg.rg_hist_threshold);
            }
        positives[0] += ma.count();
        positives[1] += mb.count();
        positives[2] += mc.count();
        positives[3] += md.count();
    }
    const double secs = seconds_since(t0);
    const bool exact = !mismatches[0] && !mismatches[1] && !mismatches[2] && !mismatches[3];
    const bool nontrivial = positives[0] && positives[1] && positives[2] && positives[3];
    report(2, exact && nontrivial && secs < 60.0,
           fmt("mismatches skin/ycbcr/hsv/rg = %zu/%zu/%zu/%zu, positives %zu/%zu/%zu/%zu, %.2f s", mismatches[0],
               mismatches[1], mismatches[2], mismatches[3], positives[0], positives[1], positives[2], positives[3],
               secs));
}

void criterion_3() {
    double worst = 0.0;
    for (double sd : {0.5, 1.0, 7.3, 25.0, 80.0}) {
        const ChannelStats st{128.0, sd};
        // composite Simpson over [-8 sd, 8 sd]
        const int n = 20000;
        const double a = st.mean - 8 * sd, h = 16 * sd / n;
        double sum = gaussian_pdf(a, st, Kernel::standard_gaussian) +
                     gaussian_pdf(a + n * h, st, Kernel::standard_gaussian);
        for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * gaussian_pdf(a + i * h, st, Kernel::standard_gaussian);
        worst = std::max(worst, std::abs(sum * h / 3.0 - 1.0));
    }
    bool literal_one = true;
    for (double mean : {0.0, 101.25, 255.0})
        for (double sd : {0.5, 3.0, 40.0})
            literal_one = literal_one && gaussian_pdf(mean, {mean, sd}, Kernel::paper_literal) == 1.0;
    report(3, worst <= 1e-6 && literal_one,
           fmt("max |integral - 1| = %.3e; literal kernel at mean == 1.0: %s", worst, literal_one ? "yes" : "no"));
}

void criterion_4() {
    std::mt19937_64 rng(4);
    int violations = 0;
    for (int n = 0; n < 200; ++n) {
        const BinaryMask m = testing::random_mask(rng, 16, 16, 0.2 + 0.6 * (n % 5) / 4.0);
        const StructuringElement se(n % 3 == 2 ? 5 : 3);
        const BinaryMask o = morph_open(m, se), c = morph_close(m, se);
        violations += !(morph_open(o, se) == o);
        violations += !(morph_close(c, se) == c);
        violations += !testing::subset(o, m);
        violations += !testing::subset(m, c);
        violations += !(morph_open(m.complement(), se).complement() == c);
        violations += !(morph_close(m.complement(), se).complement() == o);
    }
    report(4, violations == 0, fmt("law violations over 200 masks: %d", violations));
}

TriangleCandidate tri(Point i, Point k, Point j, Pose pose) {
    TriangleCandidate t;
    t.i = i;
    t.k = k;
    t.j = j;
    t.pose = pose;
    return t;
}

double corner_error(const FaceBox& b, std::array<double, 8> want) {
    const double got[8] = {b.x1, b.y1, b.x2, b.y2, b.x3, b.y3, b.x4, b.y4};
    double worst = 0.0;
    for (int n = 0; n < 8; ++n) worst = std::max(worst, std::abs(got[n] - want[n]));
    return worst;
}

void criterion_5() {
    double worst = 0.0;
    worst = std::max(worst, corner_error(face_box_frontal(tri({100, 100}, {160, 100}, {130, 160}, Pose::frontal)),
                                         {80, 120, 180, 120, 180, 140, 80, 140}));
    worst = std::max(worst, corner_error(face_box_right(tri({100, 100}, {150, 40}, {100, 40}, Pose::right_side)),
                                         {90, 115, 172, 115, 172, 40, 90, 40}));
    worst = std::max(worst, corner_error(face_box_left(tri({0, 0}, {160, 100}, {100, 100}, Pose::left_side)),
                                         {90, 115, 172, 115, 172, 40, 90, 40}));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(0.0, 200.0), jitter(-6.0, 6.0);
    int disagreements = 0, accepted = 0;
    auto blocks = [](const std::vector<Point>& pts, double s, double dx, double dy) {
        std::vector<FeatureBlock> out;
        int label = 1;
        for (Point p : pts) {
            FeatureBlock b;
            b.cx = p.x * s + dx;
            b.cy = p.y * s + dy;
            b.area = 9;
            b.label = label++;
            out.push_back(b);
        }
        return out;
    };
    for (int n = 0; n < 100; ++n) {
        std::vector<Point> pts;
        if (n % 2 == 0) {
            const double x = coord(rng), y = coord(rng), d = 30 + coord(rng) / 4;
            pts = {{x + jitter(rng), y + jitter(rng)}, {x + d + jitter(rng), y + jitter(rng)},
                   {x + d / 2 + jitter(rng), y + d + jitter(rng)}};
        } else if (n % 4 == 1) {
            const double x = coord(rng), y = coord(rng), d = 20 + coord(rng) / 4;
            pts = {{x + jitter(rng) / 4, y + d * std::sqrt(3.0)}, {x, y}, {x + d + jitter(rng) / 4, y}};
        } else {
            pts = {{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
        }
        const auto base = blocks(pts, 1.0, 0.0, 0.0);
        const bool f0 = !match_frontal_triangle(base).empty();
        const bool s0 = !match_side_triangle(base).empty();
        accepted += f0 || s0;
        for (auto [s, dx, dy] : {std::tuple{1.0, 37.0, -12.0}, std::tuple{3.0, 0.0, 0.0}, std::tuple{0.5, 11.0, 4.0}}) {
            const auto moved = blocks(pts, s, dx, dy);
            disagreements += (!match_frontal_triangle(moved).empty()) != f0;
            disagreements += (!match_side_triangle(moved).empty()) != s0;
        }
    }
    report(5, worst <= 1e-9 && disagreements == 0 && accepted > 0 && accepted < 100,
           fmt("max corner error %.3e; invariance disagreements %d over 100 triples (%d accepted)", worst,
               disagreements, accepted));
}

void criterion_6() {
    const YCbCr white = rgb_to_ycbcr({255, 255, 255});
    const YCbCr black = rgb_to_ycbcr({0, 0, 0});
    report(6, white.y == 235 && black.y == 16, fmt("white Y=%d, black Y=%d", white.y, black.y));
}

void criterion_7() {
    const auto t0 = Clock::now();
    const SkinModel model = SkinModel::fit(training_patches());
    const PipelineConfig cfg;
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SyntheticScene s = generate_synthetic_scene(seed);
        const auto r = detect_faces(s.image, model, cfg);
        bool hit = false;
        for (const auto& f : r.faces) hit = hit || iou(f.box.extents(), *s.truth) >= cfg.iou_success;
        hits += hit;
    }
    std::size_t faceless_boxes = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SceneParams p;
        p.face = false;
        p.skin = seed % 2 == 0;  // alternate background-only and bare skin ellipses
        faceless_boxes += detect_faces(generate_synthetic_scene(seed, p).image, model, cfg).faces.size();
    }
    const double secs = seconds_since(t0);
    report(7, hits >= 95 && faceless_boxes == 0 && secs < 120.0,
           fmt("detection rate %d/100 at IoU >= 0.5; boxes on faceless scenes %zu; %.2f s", hits, faceless_boxes,
               secs));
}

void criterion_8() {
    const SkinModel model = SkinModel::fit(training_patches());
    SceneParams p;
    p.width = 640;
    p.height = 480;
    const ImageRGB img = generate_synthetic_scene(8, p).image;
    const PipelineConfig cfg;
    double best = 1e9;
    std::size_t sink = 0;
    for (int n = 0; n < 7; ++n) {
        const auto t0 = Clock::now();
        sink += detect_skin(img, model, cfg).count();
        best = std::min(best, seconds_since(t0) * 1000.0);
    }
    report(8, best < 50.0 && sink > 0, fmt("640x480 detect-skin best of 7: %.2f ms", best), true);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void criterion_9() {
    const fs::path root = fs::temp_directory_path() / "skinprob_acceptance";
    fs::remove_all(root);
    const char* files[] = {"model.json", "mask.pbm", "overlay.ppm", "report.txt", "report.txt.json", "face.txt"};
    bool ok = true;
    std::string outputs[2][6];
    for (int run = 0; run < 2; ++run) {
        const fs::path d = root / std::to_string(run);
        fs::create_directories(d);
        std::ostringstream out, err, face;
        auto call = [&](std::vector<std::string> args, std::ostream& o) { ok = ok && run_cli(args, o, err) == 0; };
        call({"synth", "--seed", "21", "--count", "5", "-o", d.string()}, out);
        call({"train", (d / "skin_patch_21.ppm").string(), (d / "skin_patch_22.ppm").string(), "-o",
              (d / "model.json").string()},
             out);
        call({"detect-skin", (d / "scene_23.ppm").string(), "-m", (d / "model.json").string(), "-o",
              (d / "mask.pbm").string()},
             out);
        call({"detect-face", (d / "scene_24.ppm").string(), "-m", (d / "model.json").string(), "--overlay",
              (d / "overlay.ppm").string()},
             face);
        std::ofstream(d / "face.txt") << face.str();
        call({"evaluate", (d / "manifest.txt").string(), "-m", (d / "model.json").string(), "-o",
              (d / "report.txt").string()},
             out);
        for (int f = 0; f < 6; ++f) outputs[run][f] = slurp(d / files[f]);
    }
    int differing = 0;
    for (int f = 0; f < 6; ++f) differing += outputs[0][f] != outputs[1][f] || outputs[0][f].empty();
    report(9, ok && differing == 0,
           fmt("CLI runs %s; differing or empty artifacts: %d of 6", ok ? "succeeded" : "failed", differing));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%s (%d hard failure%s)\n", hard_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", hard_failures,
                hard_failures == 1 ? "" : "s");
    return hard_failures ? 1 : 0;
}
