#pragma once

#include "emistrip/annotations.hpp"
#include "emistrip/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emistrip {

// ---------------------------------------------------------------------------
// SSIM
// ---------------------------------------------------------------------------

struct SsimParams {
    Index window = 8;
    double k1 = 0.01;
    double k2 = 0.03;
    /// 0 means "use the image's max_value"; the bare-plane overload has no
    /// image context and requires a positive value.
    double dynamic_range = 0.0;
};

/// Mean SSIM over all fully-inside window x window patches at stride 1.
/// Per-window statistics use the unbiased (n - 1) normalization. Both planes
/// must have identical shape and be at least window x window.
double ssim(const Plane<double>& x, const Plane<double>& y, const SsimParams& params);

/// Raw sensor planes compared directly.
double ssim(const RawImage& x, const RawImage& y, const SsimParams& params = {});

/// RGB images: SSIM per channel, averaged.
double ssim(const RgbImage& x, const RgbImage& y, const SsimParams& params = {});

// ---------------------------------------------------------------------------
// Detection quality
// ---------------------------------------------------------------------------

/// Intersection over union of two center-convention boxes. Zero when either
/// box is empty or they do not overlap.
double iou(const BoundingBox& a, const BoundingBox& b);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points; // one per detection, descending score order
    Index true_positives = 0;
    Index false_positives = 0;
    Index false_negatives = 0;
    Index truth_count = 0;
};

/// Greedy matching at one IoU threshold: detections in descending score
/// order (stable for ties) each claim the highest-IoU unmatched truth box of
/// their class with IoU >= threshold.
PrCurve pr_curve(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
                 int class_id, double iou_threshold);

/// All-point interpolated AP: area under the precision envelope.
double average_precision(const PrCurve& curve);

struct ApResult {
    std::vector<int> class_ids;
    std::vector<double> per_class;
    double mean = 0.0;
};

/// AP per class (classes drawn from the truth sets) and their mean.
ApResult dataset_ap(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
                    double iou_threshold);

enum class MapVariant : std::uint8_t {
    Map50,
    Map75,
    Map50To95, // thresholds 0.50, 0.55, ..., 0.95
};

double mean_ap(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
               MapVariant variant);

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 0.0; // two-sided
};

/// Unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
/// Throws TooFewSamples (< 2 per side) or ZeroVariance (both samples constant).
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// I_x(a, b), exposed for verification. Relative error <= 1e-10 on the
/// parameter ranges the t-test produces.
double regularized_incomplete_beta(double a, double b, double x);

} // namespace emistrip
