#include "skinprob/baselines.hpp"
#include "skinprob/error.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace skinprob;

TEST_CASE("Rec. 601 anchors") {
    CHECK(rgb_to_ycbcr({255, 255, 255}) == YCbCr{235, 128, 128});
    CHECK(rgb_to_ycbcr({0, 0, 0}) == YCbCr{16, 128, 128});
    for (int v = 0; v < 256; ++v) {
        const YCbCr c = rgb_to_ycbcr({std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)});
        CHECK(c.cb == 128);
        CHECK(c.cr == 128);
    }
    // saturated primaries reach the chroma extremes
    CHECK(rgb_to_ycbcr({0, 0, 255}).cb == 240);
    CHECK(rgb_to_ycbcr({255, 0, 0}).cr == 240);
}

TEST_CASE("YCbCr stays in studio range over a 32^3 lattice") {
    for (int r = 0; r < 256; r += 8)
        for (int g = 0; g < 256; g += 8)
            for (int b = 0; b < 256; b += 8) {
                for (const Rgb p : {Rgb{std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)},
                                    Rgb{std::uint8_t(r + 7), std::uint8_t(g + 7), std::uint8_t(b + 7)}}) {
                    const YCbCr c = rgb_to_ycbcr(p);
                    CHECK((c.y >= 16 && c.y <= 235));
                    CHECK((c.cb >= 16 && c.cb <= 240));
                    CHECK((c.cr >= 16 && c.cr <= 240));
                }
            }
}

TEST_CASE("HSV conversion anchors") {
    const Hsv red = rgb_to_hsv({255, 0, 0});
    CHECK(red.h == 0.0);
    CHECK(red.s == 1.0);
    CHECK(red.v == 1.0);
    const Hsv green = rgb_to_hsv({0, 255, 0});
    CHECK(green.h == 120.0);
    CHECK(green.s == 1.0);
    CHECK(rgb_to_hsv({0, 0, 255}).h == 240.0);
    const Hsv gray = rgb_to_hsv({128, 128, 128});
    CHECK(gray.s == 0.0);
    CHECK(gray.achromatic);
    CHECK(rgb_to_hsv({0, 0, 0}).achromatic);
    CHECK(rgb_to_hsv({255, 0, 1}).h < 360.0);
}

TEST_CASE("YCbCr box is inclusive and conjunctive") {
    const Rgb skin{200, 140, 110};
    const YCbCr c = rgb_to_ycbcr(skin);
    BaselineConfig cfg;
    cfg.cb_min = c.cb;
    cfg.cb_max = c.cb + 5;
    cfg.cr_min = c.cr;
    cfg.cr_max = c.cr + 5;
    CHECK(classify_ycbcr(ImageRGB(1, 1, skin), cfg).at(0, 0) == 1);
    cfg.cb_min = c.cb + 1;
    CHECK(classify_ycbcr(ImageRGB(1, 1, skin), cfg).at(0, 0) == 0);
}

TEST_CASE("HSV box: achromatic pixels and hue wraparound") {
    BaselineConfig cfg;
    cfg.h_min = 350.0;
    cfg.h_max = 10.0;
    cfg.s_min = 0.0;
    cfg.s_max = 1.0;
    CHECK(classify_hsv(ImageRGB(1, 1, Rgb{120, 120, 120}), cfg).at(0, 0) == 0);
    CHECK(classify_hsv(ImageRGB(1, 1, Rgb{200, 0, 0}), cfg).at(0, 0) == 1);    // H = 0
    CHECK(classify_hsv(ImageRGB(1, 1, Rgb{200, 0, 20}), cfg).at(0, 0) == 1);   // H = 354
    CHECK(classify_hsv(ImageRGB(1, 1, Rgb{200, 100, 0}), cfg).at(0, 0) == 0);  // H = 30
}

TEST_CASE("chromaticity normalization") {
    const Chromaticity gray = rgb_to_chromaticity({90, 90, 90});
    CHECK(gray.r == doctest::Approx(1.0 / 3.0));
    CHECK(gray.g == doctest::Approx(1.0 / 3.0));
    const Chromaticity black = rgb_to_chromaticity({0, 0, 0});
    CHECK(black.r == 1.0 / 3.0);
    const Chromaticity red = rgb_to_chromaticity({255, 0, 0});
    CHECK(red.r == 1.0);
    CHECK(red.g == 0.0);
    std::mt19937_64 rng(6);
    for (int n = 0; n < 1000; ++n) {
        const Rgb p{std::uint8_t(1 + rng() % 255), std::uint8_t(rng()), std::uint8_t(rng())};
        const Chromaticity c = rgb_to_chromaticity(p);
        CHECK(c.r + c.g + double(p[2]) / (p[0] + p[1] + p[2]) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("rg histogram: self-consistency and errors") {
    const ImageRGB red(8, 8, Rgb{255, 0, 0});
    const RgHistogram h = train_rg_histogram(std::span(&red, 1), 32);
    CHECK(classify_rg(red, h, 0.05).count() == 64);
    CHECK(classify_rg(ImageRGB(2, 2, Rgb{0, 255, 0}), h, 0.05).count() == 0);
    const std::vector<ImageRGB> none;
    CHECK_THROWS_AS(train_rg_histogram(none, 32), Error);
    CHECK_THROWS_AS(train_rg_histogram(std::span(&red, 1), 1), Error);
}

TEST_CASE("baseline classifiers match per-pixel oracles") {
    std::mt19937_64 rng(909);
    const BaselineConfig cfg;
    std::vector<ImageRGB> patches = {testing::random_image_near(rng, 16, 16, {200, 140, 110}, 30)};
    const RgHistogram hist = train_rg_histogram(patches, cfg.rg_bins);
    const auto naive_hist = testing::naive_rg_histogram(patches, cfg.rg_bins);
    CHECK(hist.cells() == naive_hist);
    for (int n = 0; n < 5; ++n) {
        const ImageRGB img = testing::random_image_near(rng, 64, 64, {190, 130, 100}, 90);
        const BinaryMask y = classify_ycbcr(img, cfg);
        const BinaryMask h = classify_hsv(img, cfg);
        const BinaryMask g = classify_rg(img, hist, cfg.rg_hist_threshold);
        for (int yy = 0; yy < 64; ++yy)
            for (int x = 0; x < 64; ++x) {
                const Rgb p = img.at(x, yy);
                REQUIRE(y.at(x, yy) == testing::naive_ycbcr_skin(p, cfg));
                REQUIRE(h.at(x, yy) == testing::naive_hsv_skin(p, cfg));
                REQUIRE(g.at(x, yy) == testing::naive_rg_skin(p, naive_hist, cfg.rg_bins, cfg.rg_hist_threshold));
            }
    }
}

TEST_CASE("config validation") {
    BaselineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.cb_min = 10;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.s_min = 0.9;
    cfg.s_max = 0.1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.h_max = 360.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
