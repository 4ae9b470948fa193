#include "skinprob/baselines.hpp"
#include "skinprob/error.hpp"
#include "skinprob/evaluation.hpp"
#include "skinprob/face_geometry.hpp"
#include "skinprob/imaging.hpp"
#include "skinprob/pipeline.hpp"
#include "skinprob/segmentation.hpp"
#include "skinprob/skin_model.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

namespace py = pybind11;
using namespace skinprob;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ImageRGB to_image(const U8Array& arr) {
    if (arr.ndim() != 3 || arr.shape(2) != 3) {
        throw py::value_error("expected an (height, width, 3) uint8 array");
    }
    const auto h = static_cast<int>(arr.shape(0));
    const auto w = static_cast<int>(arr.shape(1));
    std::vector<std::uint8_t> data(arr.data(), arr.data() + arr.size());
    return ImageRGB(w, h, std::move(data));
}

U8Array from_image(const ImageRGB& img) {
    U8Array arr({img.height(), img.width(), 3});
    std::memcpy(arr.mutable_data(), img.bytes().data(), img.bytes().size());
    return arr;
}

BinaryMask to_mask(const U8Array& arr) {
    if (arr.ndim() != 2) throw py::value_error("expected a (height, width) uint8 array");
    std::vector<std::uint8_t> bits(arr.data(), arr.data() + arr.size());
    for (auto& b : bits) b = b ? 1 : 0;
    return BinaryMask(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)), std::move(bits));
}

U8Array from_mask(const BinaryMask& mask) {
    U8Array arr({mask.height(), mask.width()});
    std::memcpy(arr.mutable_data(), mask.bits().data(), mask.bits().size());
    return arr;
}

std::vector<ImageRGB> to_images(const std::vector<U8Array>& arrays) {
    std::vector<ImageRGB> out;
    out.reserve(arrays.size());
    for (const auto& a : arrays) out.push_back(to_image(a));
    return out;
}

Rgb to_rgb(const std::array<int, 3>& p) {
    Rgb out{};
    for (int c = 0; c < 3; ++c) {
        if (p[c] < 0 || p[c] > 255) throw py::value_error("channel values must lie in [0,255]");
        out[c] = static_cast<std::uint8_t>(p[c]);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Gaussian skin detection and triangle-based face localization.

        Images are (height, width, 3) uint8 arrays; masks are (height, width)
        uint8 arrays holding 0 or 1.
    )pbdoc";

    static py::exception<Error> error_type(m, "SkinprobError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
            if (e.kind() == ErrorKind::io) {
                PyErr_SetString(PyExc_OSError, msg.c_str());
            } else {
                py::set_error(error_type, msg.c_str());
            }
        }
    });

    // imaging
    m.def("load_image", [](const std::filesystem::path& p) { return from_image(load_image(p)); });
    m.def("save_image", [](const U8Array& a, const std::filesystem::path& p) { save_image(to_image(a), p); });
    m.def("load_mask", [](const std::filesystem::path& p) { return from_mask(load_mask(p)); });
    m.def("save_mask", [](const U8Array& a, const std::filesystem::path& p) { save_mask(to_mask(a), p); });
    m.def("equalize_histogram", [](const U8Array& a) { return from_image(equalize_histogram(to_image(a))); },
          "Per-channel cumulative-histogram equalization.");

    // skin model
    py::enum_<Kernel>(m, "Kernel")
        .value("STANDARD_GAUSSIAN", Kernel::standard_gaussian)
        .value("PAPER_LITERAL", Kernel::paper_literal);

    py::class_<ChannelStats>(m, "ChannelStats")
        .def(py::init<double, double>(), py::arg("mean"), py::arg("std"))
        .def_readwrite("mean", &ChannelStats::mean)
        .def_readwrite("std", &ChannelStats::std)
        .def("__repr__", [](const ChannelStats& s) {
            return "ChannelStats(mean=" + std::to_string(s.mean) + ", std=" + std::to_string(s.std) + ")";
        });

    m.def("train_skin_model", [](const std::vector<U8Array>& patches) {
        const auto stats = train_skin_model(to_images(patches));
        return std::make_tuple(stats.red(), stats.green(), stats.blue());
    }, "Pooled per-channel (red, green, blue) statistics.");
    m.def("gaussian_pdf", &gaussian_pdf, py::arg("x"), py::arg("stats"),
          py::arg("kernel") = Kernel::standard_gaussian);

    py::class_<SkinModel>(m, "SkinModel")
        .def_static("fit", [](const std::vector<U8Array>& patches, Kernel kernel) {
            return SkinModel::fit(to_images(patches), kernel);
        }, py::arg("patches"), py::arg("kernel") = Kernel::standard_gaussian)
        .def_static("from_json", [](const std::string& s) { return parse_model(s); })
        .def_static("load", [](const std::filesystem::path& p) { return load_model(p); })
        .def("to_json", &serialize_model)
        .def("save", [](const SkinModel& model, const std::filesystem::path& p) { save_model(model, p); })
        .def_property_readonly("channels", [](const SkinModel& model) {
            return std::vector<ChannelStats>(model.channels().begin(), model.channels().end());
        })
        .def_property_readonly("kernel", &SkinModel::kernel)
        .def_property_readonly("threshold", &SkinModel::threshold)
        .def_property_readonly("log_threshold", &SkinModel::log_threshold)
        .def_property_readonly("train_pixel_count", &SkinModel::train_pixel_count)
        .def("likelihood", [](const SkinModel& model, const std::array<int, 3>& p) {
            return pixel_likelihood(to_rgb(p), model);
        })
        .def("is_skin", [](const SkinModel& model, const std::array<int, 3>& p) {
            return model.is_skin(to_rgb(p));
        });

    // segmentation
    m.def("classify_skin", [](const U8Array& a, const SkinModel& model, bool equalize) {
        return from_mask(classify_skin(to_image(a), model, equalize));
    }, py::arg("image"), py::arg("model"), py::arg("equalize") = false);
    m.def("morph_open", [](const U8Array& a, int se) { return from_mask(morph_open(to_mask(a), StructuringElement(se))); },
          py::arg("mask"), py::arg("se_size") = 3);
    m.def("morph_close", [](const U8Array& a, int se) { return from_mask(morph_close(to_mask(a), StructuringElement(se))); },
          py::arg("mask"), py::arg("se_size") = 3);
    m.def("erode", [](const U8Array& a, int se) { return from_mask(erode(to_mask(a), StructuringElement(se))); },
          py::arg("mask"), py::arg("se_size") = 3);
    m.def("dilate", [](const U8Array& a, int se) { return from_mask(dilate(to_mask(a), StructuringElement(se))); },
          py::arg("mask"), py::arg("se_size") = 3);

    py::class_<FeatureBlock>(m, "FeatureBlock")
        .def_readonly("cx", &FeatureBlock::cx)
        .def_readonly("cy", &FeatureBlock::cy)
        .def_readonly("area", &FeatureBlock::area)
        .def_readonly("label", &FeatureBlock::label)
        .def_property_readonly("bbox", [](const FeatureBlock& b) {
            return std::make_tuple(b.bbox.x_min, b.bbox.y_min, b.bbox.x_max, b.bbox.y_max);
        });
    m.def("connected_components", [](const U8Array& a, int connectivity) {
        return connected_components(to_mask(a), connectivity);
    }, py::arg("mask"), py::arg("connectivity") = 8);
    m.def("extract_dark_blocks", [](const U8Array& img, const U8Array& mask, int dark, double min_frac) {
        return extract_dark_blocks(to_image(img), to_mask(mask), {dark, min_frac, StructuringElement{}});
    }, py::arg("image"), py::arg("skin_mask"), py::arg("dark_threshold") = kDefaultDarkThreshold,
       py::arg("min_block_fraction") = kDefaultMinBlockFraction);

    // geometry
    py::enum_<Pose>(m, "Pose")
        .value("FRONTAL", Pose::frontal)
        .value("RIGHT_SIDE", Pose::right_side)
        .value("LEFT_SIDE", Pose::left_side);
    py::enum_<AxisMode>(m, "AxisMode").value("LITERAL", AxisMode::literal).value("FLIPPED", AxisMode::flipped);

    py::class_<Rect>(m, "Rect")
        .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("y_min"),
             py::arg("x_max"), py::arg("y_max"))
        .def_readwrite("x_min", &Rect::x_min)
        .def_readwrite("y_min", &Rect::y_min)
        .def_readwrite("x_max", &Rect::x_max)
        .def_readwrite("y_max", &Rect::y_max)
        .def("as_tuple", [](const Rect& r) { return std::make_tuple(r.x_min, r.y_min, r.x_max, r.y_max); });

    py::class_<TriangleCandidate>(m, "TriangleCandidate")
        .def(py::init([](std::pair<double, double> i, std::pair<double, double> k,
                         std::pair<double, double> j, Pose pose) {
                 TriangleCandidate t;
                 t.i = {i.first, i.second};
                 t.k = {k.first, k.second};
                 t.j = {j.first, j.second};
                 t.pose = pose;
                 return t;
             }),
             py::arg("i"), py::arg("k"), py::arg("j"), py::arg("pose") = Pose::frontal)
        .def_property_readonly("i", [](const TriangleCandidate& t) { return std::make_pair(t.i.x, t.i.y); })
        .def_property_readonly("k", [](const TriangleCandidate& t) { return std::make_pair(t.k.x, t.k.y); })
        .def_property_readonly("j", [](const TriangleCandidate& t) { return std::make_pair(t.j.x, t.j.y); })
        .def_readonly("pose", &TriangleCandidate::pose)
        .def_readonly("score", &TriangleCandidate::score)
        .def_readonly("ratio", &TriangleCandidate::ratio);

    py::class_<FaceBox>(m, "FaceBox")
        .def_readonly("pose", &FaceBox::pose)
        .def_property_readonly("corners", [](const FaceBox& b) {
            return std::vector<std::pair<double, double>>{{b.x1, b.y1}, {b.x2, b.y2}, {b.x3, b.y3}, {b.x4, b.y4}};
        })
        .def("extents", &FaceBox::extents);

    m.def("match_frontal_triangle", [](const std::vector<FeatureBlock>& blocks, double eye_level_frac) {
        FrontalMatchOptions opts;
        opts.eye_level_frac = eye_level_frac;
        return match_frontal_triangle(blocks, opts);
    }, py::arg("blocks"), py::arg("eye_level_frac") = 0.3);
    m.def("match_side_triangle", [](const std::vector<FeatureBlock>& blocks, double tolerance) {
        return match_side_triangle(blocks, {tolerance});
    }, py::arg("blocks"), py::arg("tolerance") = 0.15);
    m.def("face_box", &face_box, py::arg("triangle"), py::arg("axis") = AxisMode::literal);

    // baselines
    py::class_<BaselineConfig>(m, "BaselineConfig")
        .def(py::init<>())
        .def_readwrite("cb_min", &BaselineConfig::cb_min)
        .def_readwrite("cb_max", &BaselineConfig::cb_max)
        .def_readwrite("cr_min", &BaselineConfig::cr_min)
        .def_readwrite("cr_max", &BaselineConfig::cr_max)
        .def_readwrite("h_min", &BaselineConfig::h_min)
        .def_readwrite("h_max", &BaselineConfig::h_max)
        .def_readwrite("s_min", &BaselineConfig::s_min)
        .def_readwrite("s_max", &BaselineConfig::s_max)
        .def_readwrite("rg_bins", &BaselineConfig::rg_bins)
        .def_readwrite("rg_hist_threshold", &BaselineConfig::rg_hist_threshold);
    m.def("rgb_to_ycbcr", [](const std::array<int, 3>& p) {
        const YCbCr c = rgb_to_ycbcr(to_rgb(p));
        return std::make_tuple(c.y, c.cb, c.cr);
    });
    m.def("rgb_to_hsv", [](const std::array<int, 3>& p) {
        const Hsv c = rgb_to_hsv(to_rgb(p));
        return std::make_tuple(c.h, c.s, c.v, c.achromatic);
    }, "Returns (hue_degrees, saturation, value, achromatic).");
    m.def("classify_ycbcr", [](const U8Array& a, const BaselineConfig& cfg) {
        return from_mask(classify_ycbcr(to_image(a), cfg));
    }, py::arg("image"), py::arg("config") = BaselineConfig{});
    m.def("classify_hsv", [](const U8Array& a, const BaselineConfig& cfg) {
        return from_mask(classify_hsv(to_image(a), cfg));
    }, py::arg("image"), py::arg("config") = BaselineConfig{});
    m.def("classify_rg", [](const U8Array& a, const std::vector<U8Array>& patches, int bins, double threshold) {
        return from_mask(classify_rg(to_image(a), train_rg_histogram(to_images(patches), bins), threshold));
    }, py::arg("image"), py::arg("train_patches"), py::arg("bins") = 32, py::arg("threshold") = 0.05);

    // pipeline and evaluation
    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_static("from_text", [](const std::string& text) {
            PipelineConfig cfg = parse_config(text);
            cfg.validate();
            return cfg;
        })
        .def_readwrite("equalize", &PipelineConfig::equalize)
        .def_readwrite("se_size", &PipelineConfig::se_size)
        .def_readwrite("dark_threshold", &PipelineConfig::dark_threshold)
        .def_readwrite("min_block_fraction", &PipelineConfig::min_block_fraction)
        .def_readwrite("eye_level_frac", &PipelineConfig::eye_level_frac)
        .def_readwrite("side_tolerance", &PipelineConfig::side_tolerance)
        .def_readwrite("iou_success", &PipelineConfig::iou_success)
        .def_readwrite("axis", &PipelineConfig::axis);

    m.def("detect_faces", [](const U8Array& a, const SkinModel& model, const PipelineConfig& cfg) {
        const auto result = detect_faces(to_image(a), model, cfg);
        py::list faces;
        for (const auto& d : result.faces) {
            faces.append(py::make_tuple(d.box, d.triangle));
        }
        return faces;
    }, py::arg("image"), py::arg("model"), py::arg("config") = PipelineConfig{},
       "List of (FaceBox, TriangleCandidate) pairs.");
    m.def("iou", &iou);
    m.def("generate_synthetic_scene", [](std::uint64_t seed, bool face, bool skin) {
        SceneParams params;
        params.face = face;
        params.skin = skin;
        const auto scene = generate_synthetic_scene(seed, params);
        return std::make_tuple(from_image(scene.image), scene.truth);
    }, py::arg("seed"), py::arg("face") = true, py::arg("skin") = true,
       "Returns (image, truth_rect_or_None).");
    m.def("generate_skin_patch", [](std::uint64_t seed, int size) {
        return from_image(generate_skin_patch(seed, SceneParams{}, size));
    }, py::arg("seed"), py::arg("size") = 64);

    m.attr("__version__") = "0.1.0";
}
