#include "skinprob/face_geometry.hpp"

#include "skinprob/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace skinprob {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Pose pose) {
    switch (pose) {
    case Pose::frontal: return "frontal";
    case Pose::right_side: return "right-side";
    case Pose::left_side: return "left-side";
    }
    return "frontal";
}

Pose parse_pose(std::string_view name) {
    if (name == "frontal") return Pose::frontal;
    if (name == "right-side") return Pose::right_side;
    if (name == "left-side") return Pose::left_side;
    throw Error(ErrorKind::format, "unknown pose '" + std::string(name) + "'");
}

std::string_view to_string(AxisMode mode) {
    return mode == AxisMode::flipped ? "flipped" : "literal";
}

AxisMode parse_axis_mode(std::string_view name) {
    if (name == "literal") return AxisMode::literal;
    if (name == "flipped") return AxisMode::flipped;
    throw Error(ErrorKind::invalid_argument, "unknown axis mode '" + std::string(name) + "'");
}

namespace {

Point centre(const FeatureBlock& b) { return {b.cx, b.cy}; }

bool in_window(double value, double lo, double hi) { return value >= lo && value <= hi; }

void sort_candidates(std::vector<TriangleCandidate>& out) {
    std::sort(out.begin(), out.end(), [](const TriangleCandidate& a, const TriangleCandidate& b) {
        return std::tie(a.score, a.label_i, a.label_k, a.label_j) <
               std::tie(b.score, b.label_i, b.label_k, b.label_j);
    });
}

}  // namespace

std::vector<TriangleCandidate> match_frontal_triangle(const std::vector<FeatureBlock>& blocks,
                                                      const FrontalMatchOptions& options) {
    std::vector<TriangleCandidate> out;
    const std::size_t n = blocks.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const FeatureBlock* left = &blocks[a];
            const FeatureBlock* right = &blocks[b];
            if (std::tie(right->cx, right->cy) < std::tie(left->cx, left->cy)) std::swap(left, right);
            const Point i = centre(*left);
            const Point k = centre(*right);
            const double eyes = distance(i, k);
            if (!(eyes > 0.0)) continue;
            if (std::abs(i.y - k.y) > options.eye_level_frac * eyes) continue;

            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                const Point j = centre(blocks[c]);
                if (!(j.y > i.y && j.y > k.y)) continue;
                if (!(distance(i, j) > 0.0 && distance(k, j) > 0.0)) continue;

                double ratio = 0.0;
                double score = 0.0;
                if (options.mode == EyeRatioMode::midpoint) {
                    const Point mid{(i.x + k.x) / 2.0, (i.y + k.y) / 2.0};
                    ratio = eyes / distance(mid, j);
                    if (!in_window(ratio, options.ratio_min, options.ratio_max)) continue;
                    score = std::abs(ratio - 1.0);
                } else {
                    const double ri = eyes / distance(i, j);
                    const double rk = eyes / distance(k, j);
                    if (!in_window(ri, options.ratio_min, options.ratio_max) ||
                        !in_window(rk, options.ratio_min, options.ratio_max)) {
                        continue;
                    }
                    ratio = ri;
                    score = std::max(std::abs(ri - 1.0), std::abs(rk - 1.0));
                }
                out.push_back({i, k, j, Pose::frontal, score, ratio, left->label, right->label,
                               blocks[c].label});
            }
        }
    }
    sort_candidates(out);
    return out;
}

std::vector<TriangleCandidate> match_side_triangle(const std::vector<FeatureBlock>& blocks,
                                                   const SideMatchOptions& options) {
    std::vector<TriangleCandidate> out;
    const std::size_t n = blocks.size();
    const double lo = 1.0 - options.tolerance;
    const double hi = 1.0 + options.tolerance;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                if (a == b || b == c || a == c) continue;
                const Point i = centre(blocks[a]);
                const Point j = centre(blocks[b]);
                const Point k = centre(blocks[c]);
                const double ik = distance(i, k);
                const double ij = distance(i, j);
                const double jk = distance(j, k);
                if (!(ik > 0.0 && ij > 0.0 && jk > 0.0)) continue;
                const double hyp = kSideHypotenuseRatio * jk;
                const double leg = kSideLongLegRatio * jk;
                if (!in_window(ik, lo * hyp, hi * hyp) || !in_window(ij, lo * leg, hi * leg)) continue;
                const double score = std::max(std::abs(ik / hyp - 1.0), std::abs(ij / leg - 1.0));
                const Pose pose = k.x > i.x ? Pose::right_side : Pose::left_side;
                out.push_back({i, k, j, pose, score, ik / jk, blocks[a].label, blocks[c].label,
                               blocks[b].label});
            }
        }
    }
    sort_candidates(out);
    return out;
}

Rect FaceBox::extents() const noexcept {
    return {std::min({x1, x2, x3, x4}), std::min({y1, y2, y3, y4}), std::max({x1, x2, x3, x4}),
            std::max({y1, y2, y3, y4})};
}

namespace {

void require_pose(const TriangleCandidate& t, Pose expected) {
    if (t.pose != expected) {
        throw Error(ErrorKind::invalid_pose, "expected a " + std::string(to_string(expected)) +
                                                 " candidate, got " + std::string(to_string(t.pose)));
    }
}

// Corners from an anchor: X1=X4=left, X2=X3=right, Y1=Y2=top, Y3=Y4=bottom,
// where "top"/"bottom" are the first/second y equation as written.
FaceBox corners(double left, double right, double y12, double y34, Pose pose) {
    return {left, y12, right, y12, right, y34, left, y34, pose};
}

}  // namespace

FaceBox face_box_frontal(const TriangleCandidate& t, AxisMode axis) {
    require_pose(t, Pose::frontal);
    const double d = distance(t.i, t.k);
    const double s = axis == AxisMode::literal ? 1.0 : -1.0;
    return corners(t.i.x - d / 3.0, t.k.x + d / 3.0, t.i.y + s * d / 3.0, t.j.y - s * d / 3.0,
                   Pose::frontal);
}

FaceBox face_box_right(const TriangleCandidate& t, AxisMode axis) {
    require_pose(t, Pose::right_side);
    const double d = distance(t.i, t.j);
    const double s = axis == AxisMode::literal ? 1.0 : -1.0;
    return corners(t.i.x - d / 6.0, t.i.x + 1.2 * d, t.i.y + s * d / 4.0, t.i.y - s * 1.0 * d,
                   Pose::right_side);
}

FaceBox face_box_left(const TriangleCandidate& t, AxisMode axis) {
    require_pose(t, Pose::left_side);
    const double d = distance(t.j, t.k);
    const double s = axis == AxisMode::literal ? 1.0 : -1.0;
    return corners(t.j.x - d / 6.0, t.j.x + 1.2 * d, t.j.y + s * d / 4.0, t.j.y - s * 1.0 * d,
                   Pose::left_side);
}

FaceBox face_box(const TriangleCandidate& t, AxisMode axis) {
    switch (t.pose) {
    case Pose::frontal: return face_box_frontal(t, axis);
    case Pose::right_side: return face_box_right(t, axis);
    case Pose::left_side: return face_box_left(t, axis);
    }
    throw Error(ErrorKind::invalid_pose, "unknown pose");
}

}  // namespace skinprob
