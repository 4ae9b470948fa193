#pragma once

#include "skinprob/segmentation.hpp"

#include <string_view>
#include <vector>

namespace skinprob {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

/// Axis-aligned rectangle in continuous pixel coordinates, min/max normalised.
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Pose { frontal, right_side, left_side };
std::string_view to_string(Pose pose);
Pose parse_pose(std::string_view name);

/// How the y offsets of the box equations are read. `literal` applies the
/// signs as written in image coordinates (y down), which yields a band between
/// the eyes and the mouth; `flipped` negates every y offset so the box runs
/// from above the eyes to below the mouth.
enum class AxisMode { literal, flipped };
std::string_view to_string(AxisMode mode);
AxisMode parse_axis_mode(std::string_view name);

/// Frontal ratio: eye distance over the distance from the mouth to the eye
/// midpoint, or (per_eye) to each eye separately.
enum class EyeRatioMode { midpoint, per_eye };

struct TriangleCandidate {
    Point i;  // frontal: smaller-x eye
    Point k;  // frontal: larger-x eye
    Point j;  // frontal: mouth
    Pose pose = Pose::frontal;
    double score = 0.0;  // deviation from the ideal ratios, lower is better
    double ratio = 0.0;  // frontal: D(i,k) / D(mid(i,k), j); side: D(i,k) / D(j,k)
    int label_i = 0;
    int label_k = 0;
    int label_j = 0;
};

struct FrontalMatchOptions {
    double eye_level_frac = 0.3;
    double ratio_min = 0.9;
    double ratio_max = 1.1;
    EyeRatioMode mode = EyeRatioMode::midpoint;
};

struct SideMatchOptions {
    double tolerance = 0.15;
};

inline constexpr double kSideHypotenuseRatio = 2.0;
inline constexpr double kSideLongLegRatio = 1.732;

/// Every eye pair plus mouth that satisfies the isosceles rule, sorted by
/// score. The mouth must lie strictly below both eyes and the eyes must be
/// level to within eye_level_frac * D(i,k). The ratio window is closed.
std::vector<TriangleCandidate> match_frontal_triangle(const std::vector<FeatureBlock>& blocks,
                                                      const FrontalMatchOptions& options = {});

/// Labelled triples with D(i,k) ~ 2 D(j,k) and D(i,j) ~ 1.732 D(j,k), each
/// within relative tolerance. Pose is right-side when k lies at larger x than
/// i, left-side otherwise.
std::vector<TriangleCandidate> match_side_triangle(const std::vector<FeatureBlock>& blocks,
                                                   const SideMatchOptions& options = {});

/// Four corners (X1,Y1)..(X4,Y4) with X1 = X4, X2 = X3, Y1 = Y2, Y3 = Y4.
struct FaceBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0, x3 = 0, y3 = 0, x4 = 0, y4 = 0;
    Pose pose = Pose::frontal;

    Rect extents() const noexcept;
};

FaceBox face_box_frontal(const TriangleCandidate& t, AxisMode axis = AxisMode::literal);
FaceBox face_box_right(const TriangleCandidate& t, AxisMode axis = AxisMode::literal);
FaceBox face_box_left(const TriangleCandidate& t, AxisMode axis = AxisMode::literal);
/// Dispatches on `t.pose`.
FaceBox face_box(const TriangleCandidate& t, AxisMode axis = AxisMode::literal);

}  // namespace skinprob
