#include "skinprob/error.hpp"
#include "skinprob/segmentation.hpp"
#include "skinprob/skin_model.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace skinprob;

namespace {

ImageRGB one_pixel(Rgb p) { return ImageRGB(1, 1, p); }

std::array<ChannelStats, 3> stats_of(double m0, double m1, double m2, double s) {
    return {ChannelStats{m0, s}, ChannelStats{m1, s}, ChannelStats{m2, s}};
}

}  // namespace

TEST_CASE("single pixel training clamps every std to the floor") {
    const ImageRGB patch = one_pixel({128, 64, 32});
    const TrainedStats s = train_skin_model(std::span(&patch, 1));
    CHECK(s.red().mean == 128.0);
    CHECK(s.green().mean == 64.0);
    CHECK(s.blue().mean == 32.0);
    for (const auto& ch : s.channels) CHECK(ch.std == kStdEpsilon);
    CHECK(s.pixel_count == 1);
}

TEST_CASE("two-pixel training statistics use the population divisor") {
    ImageRGB patch(2, 1);
    patch.set(0, 0, {100, 50, 0});
    patch.set(1, 0, {200, 50, 255});
    const TrainedStats s = train_skin_model(std::span(&patch, 1));
    CHECK(s.red().mean == 150.0);
    CHECK(s.red().std == 50.0);
    CHECK(s.green().mean == 50.0);
    CHECK(s.green().std == kStdEpsilon);
    CHECK(s.blue().mean == 127.5);
    CHECK(s.blue().std == 127.5);
}

TEST_CASE("pooling is invariant to how pixels are split across patches") {
    std::mt19937_64 rng(5);
    const ImageRGB a = testing::random_image(rng, 8, 4);
    const ImageRGB b = testing::random_image(rng, 8, 4);
    std::vector<std::uint8_t> joined(a.bytes().begin(), a.bytes().end());
    joined.insert(joined.end(), b.bytes().begin(), b.bytes().end());
    const ImageRGB both(8, 8, joined);

    const std::vector<ImageRGB> split = {a, b};
    const TrainedStats s1 = train_skin_model(split);
    const TrainedStats s2 = train_skin_model(std::span(&both, 1));
    for (int c = 0; c < 3; ++c) {
        CHECK(s1.channels[c].mean == doctest::Approx(s2.channels[c].mean).epsilon(1e-15));
        CHECK(s1.channels[c].std == doctest::Approx(s2.channels[c].std).epsilon(1e-12));
    }
}

TEST_CASE("empty training set is rejected") {
    const std::vector<ImageRGB> none;
    CHECK_THROWS_AS(train_skin_model(none), Error);
    try {
        tune_threshold(stats_of(1, 1, 1, 1), Kernel::standard_gaussian, none);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_training_set);
    }
}

TEST_CASE("gaussian_pdf closed forms") {
    CHECK(gaussian_pdf(42.0, {42.0, 3.7}, Kernel::paper_literal) == 1.0);
    CHECK(gaussian_pdf(0.0, {0.0, 1.0}, Kernel::standard_gaussian) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-15));
    for (double d : {0.5, 3.0, 17.25}) {
        for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
            CHECK(gaussian_pdf(100.0 + d, {100.0, 6.0}, k) == gaussian_pdf(100.0 - d, {100.0, 6.0}, k));
        }
    }
    // log form agrees with the linear form
    CHECK(std::exp(log_gaussian_pdf(103.0, {100.0, 6.0}, Kernel::standard_gaussian)) ==
          doctest::Approx(gaussian_pdf(103.0, {100.0, 6.0}, Kernel::standard_gaussian)).epsilon(1e-14));
}

TEST_CASE("standard kernel integrates to one over eight sigma") {
    for (double sd : {0.5, 1.0, 13.0, 80.0}) {
        const ChannelStats s{120.0, sd};
        const double h = sd / 1000.0;
        double sum = 0.0;
        for (int i = -8000; i <= 8000; ++i) {
            const double w = (i == -8000 || i == 8000) ? 0.5 : 1.0;
            sum += w * gaussian_pdf(s.mean + i * h, s, Kernel::standard_gaussian);
        }
        CHECK(std::abs(sum * h - 1.0) <= 1e-6);
    }
}

TEST_CASE("pixel likelihood examples") {
    const SkinModel model(stats_of(150, 100, 80, 10), Kernel::standard_gaussian, -100.0);
    CHECK(pixel_likelihood({150, 100, 80}, model) == doctest::Approx(6.3493635934241e-05).epsilon(1e-12));
    const double ratio = pixel_likelihood({160, 100, 80}, model) / pixel_likelihood({150, 100, 80}, model);
    CHECK(ratio == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));

    const SkinModel literal(stats_of(150, 100, 80, 10), Kernel::paper_literal, -100.0);
    CHECK(pixel_likelihood({150, 100, 80}, literal) == 1.0);
}

TEST_CASE("likelihood decreases away from the mean in each channel") {
    for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
        const SkinModel model({ChannelStats{120, 7}, ChannelStats{90, 11}, ChannelStats{60, 4}}, k, -500.0);
        for (int c = 0; c < 3; ++c) {
            const int mean = static_cast<int>(model.channel(c).mean);
            double prev = std::numeric_limits<double>::infinity();
            for (int d = 0; mean + d <= 255; ++d) {
                Rgb p{120, 90, 60};
                p[c] = static_cast<std::uint8_t>(mean + d);
                const double v = model.log_likelihood(p);
                CHECK(v < prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("table lookups are bit-identical to direct evaluation") {
    std::mt19937_64 rng(99);
    for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
        const SkinModel model({ChannelStats{181.3, 17.9}, ChannelStats{122.0, 0.5}, ChannelStats{99.9, 40.1}}, k,
                              -20.0);
        for (int n = 0; n < 20000; ++n) {
            const Rgb p{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                        static_cast<std::uint8_t>(rng())};
            REQUIRE(model.log_likelihood(p) == pixel_log_likelihood(p, model.channels(), k));
        }
    }
}

TEST_CASE("threshold is the brute-force minimum and every training pixel passes") {
    std::mt19937_64 rng(1234);
    for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
        std::vector<ImageRGB> patches;
        for (int n = 0; n < 3; ++n) patches.push_back(testing::random_image_near(rng, 12, 9, {190, 140, 110}, 30));
        const SkinModel model = SkinModel::fit(patches, k);

        double brute = std::numeric_limits<double>::infinity();
        for (const auto& p : patches)
            for (int y = 0; y < p.height(); ++y)
                for (int x = 0; x < p.width(); ++x) {
                    double ll = 0.0;
                    for (int c = 0; c < 3; ++c)
                        ll += testing::naive_log_density(p.at(x, y)[c], model.channel(c).mean, model.channel(c).std, k);
                    brute = std::min(brute, ll);
                }
        CHECK(model.log_threshold() == brute);
        CHECK(model.threshold() > 0.0);
        for (const auto& p : patches) CHECK(classify_skin(p, model).count() == p.pixel_count());
    }
}

TEST_CASE("single training pixel: threshold is its own likelihood") {
    const ImageRGB patch = one_pixel({200, 120, 90});
    const SkinModel model = SkinModel::fit(std::span(&patch, 1));
    CHECK(model.threshold() == pixel_likelihood({200, 120, 90}, model));
    CHECK(model.is_skin({200, 120, 90}));
    CHECK_FALSE(model.is_skin({201, 120, 90}));
}

TEST_CASE("duplicating a training pixel leaves the threshold unchanged") {
    std::mt19937_64 rng(8);
    const ImageRGB base = testing::random_image_near(rng, 6, 6, {180, 130, 100}, 25);
    const auto ch = train_skin_model(std::span(&base, 1)).channels;
    std::vector<std::uint8_t> bytes(base.bytes().begin(), base.bytes().end());
    bytes.insert(bytes.end(), base.bytes().begin(), base.bytes().begin() + 3 * 6);  // first row again
    const ImageRGB dup(6, 7, bytes);
    CHECK(tune_threshold(ch, Kernel::standard_gaussian, std::span(&base, 1)) ==
          tune_threshold(ch, Kernel::standard_gaussian, std::span(&dup, 1)));
}

TEST_CASE("kernels agree on the hardest training pixel when stds are equal") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ch = stats_of(150 + trial, 110, 90, 5.0 + trial);
        const ImageRGB patch = testing::random_image_near(rng, 10, 10, {150, 110, 90}, 40);
        double worst_sq = -1.0;
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 10; ++x) {
                double sq = 0.0;
                for (int c = 0; c < 3; ++c) sq += std::pow(patch.at(x, y)[c] - ch[c].mean, 2);
                worst_sq = std::max(worst_sq, sq);
            }
        for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
            const double t = tune_log_threshold(ch, k, std::span(&patch, 1));
            // argmin pixel of each kernel is a pixel of maximal squared distance
            bool found = false;
            for (int y = 0; y < 10 && !found; ++y)
                for (int x = 0; x < 10 && !found; ++x) {
                    if (pixel_log_likelihood(patch.at(x, y), ch, k) != t) continue;
                    double sq = 0.0;
                    for (int c = 0; c < 3; ++c) sq += std::pow(patch.at(x, y)[c] - ch[c].mean, 2);
                    found = sq == worst_sq;
                }
            CHECK(found);
        }
    }
}

TEST_CASE("model JSON round-trip reproduces decisions bit-exactly") {
    std::mt19937_64 rng(77);
    const ImageRGB patch = testing::random_image_near(rng, 20, 20, {170, 120, 95}, 35);
    for (Kernel k : {Kernel::standard_gaussian, Kernel::paper_literal}) {
        const SkinModel model = SkinModel::fit(std::span(&patch, 1), k);
        const std::string text = serialize_model(model);
        for (const char* key : {"format_version", "kernel", "mean_r", "mean_g", "mean_b", "std_r", "std_g",
                                "std_b", "threshold", "train_pixel_count"}) {
            CHECK(text.find(std::string("\"") + key + "\"") != std::string::npos);
        }
        const SkinModel back = parse_model(text);
        CHECK(back == model);
        CHECK(serialize_model(back) == text);
        const ImageRGB probe = testing::random_image_near(rng, 32, 32, {170, 120, 95}, 60);
        CHECK(classify_skin(probe, back) == classify_skin(probe, model));
    }
}

TEST_CASE("model parse errors are format errors") {
    for (const char* bad : {"not json", "{}", R"({"format_version": 1, "kernel": "odd"})"}) {
        try {
            parse_model(bad);
            FAIL("expected an exception");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::format);
        }
    }
}
