#include "emistrip/metrics.hpp"

#include "emistrip/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace emistrip {

// ---------------------------------------------------------------------------
// SSIM
// ---------------------------------------------------------------------------

namespace {

/// Inclusive-prefix summed-area table, one row/col of zeros in front.
/// Integer-valued inputs keep every entry exact in double up to 2^53.
Plane<double> summed_area(const Plane<double>& p) {
    const Index h = p.rows();
    const Index w = p.cols();
    Plane<double> sat = Plane<double>::Zero(h + 1, w + 1);
    for (Index r = 0; r < h; ++r) {
        double row_sum = 0.0;
        for (Index c = 0; c < w; ++c) {
            row_sum += p(r, c);
            sat(r + 1, c + 1) = sat(r, c + 1) + row_sum;
        }
    }
    return sat;
}

inline double rect_sum(const Plane<double>& sat, Index r, Index c, Index n) {
    return sat(r + n, c + n) - sat(r, c + n) - sat(r + n, c) + sat(r, c);
}

} // namespace

double ssim(const Plane<double>& x, const Plane<double>& y, const SsimParams& params) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "ssim inputs have differing shapes");
    }
    if (params.window < 2) {
        throw Error(ErrorCode::InvalidArgument, "ssim window must be at least 2");
    }
    if (params.window > x.rows() || params.window > x.cols()) {
        throw Error(ErrorCode::InvalidArgument,
                    "ssim window " + std::to_string(params.window) + " exceeds image size " +
                        std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    if (params.k1 <= 0.0 || params.k2 <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "ssim stabilizers must be positive");
    }
    if (params.dynamic_range <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "ssim needs a positive dynamic_range");
    }

    const double c1 = params.k1 * params.dynamic_range * params.k1 * params.dynamic_range;
    const double c2 = params.k2 * params.dynamic_range * params.k2 * params.dynamic_range;
    const Index win = params.window;
    const double n = static_cast<double>(win * win);

    const Plane<double> sx = summed_area(x);
    const Plane<double> sy = summed_area(y);
    const Plane<double> sxx = summed_area((x * x).eval());
    const Plane<double> syy = summed_area((y * y).eval());
    const Plane<double> sxy = summed_area((x * y).eval());

    double total = 0.0;
    Index windows = 0;
    for (Index r = 0; r + win <= x.rows(); ++r) {
        for (Index c = 0; c + win <= x.cols(); ++c) {
            const double ux = rect_sum(sx, r, c, win) / n;
            const double uy = rect_sum(sy, r, c, win) / n;
            const double vx = (rect_sum(sxx, r, c, win) - rect_sum(sx, r, c, win) * ux) / (n - 1);
            const double vy = (rect_sum(syy, r, c, win) - rect_sum(sy, r, c, win) * uy) / (n - 1);
            const double cov = (rect_sum(sxy, r, c, win) - rect_sum(sx, r, c, win) * uy) / (n - 1);
            total += ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) /
                     ((ux * ux + uy * uy + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

double ssim(const RawImage& x, const RawImage& y, const SsimParams& params) {
    if (x.max_value != y.max_value) {
        throw Error(ErrorCode::DimensionMismatch, "ssim inputs have differing dynamic ranges");
    }
    SsimParams p = params;
    if (p.dynamic_range <= 0.0) {
        p.dynamic_range = static_cast<double>(x.max_value);
    }
    return ssim(x.samples.cast<double>().eval(), y.samples.cast<double>().eval(), p);
}

double ssim(const RgbImage& x, const RgbImage& y, const SsimParams& params) {
    if (x.max_value != y.max_value) {
        throw Error(ErrorCode::DimensionMismatch, "ssim inputs have differing dynamic ranges");
    }
    SsimParams p = params;
    if (p.dynamic_range <= 0.0) {
        p.dynamic_range = static_cast<double>(x.max_value);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        total += ssim(x.planes[i].cast<double>().eval(), y.planes[i].cast<double>().eval(), p);
    }
    return total / 3.0;
}

// ---------------------------------------------------------------------------
// Detection quality
// ---------------------------------------------------------------------------

namespace {

struct Extent {
    double left, right, top, bottom;
};

/// Continuous pixel-cell extent of a center-convention box: a box of width w
/// covers w unit cells starting at center_x - (w - 1) / 2.
Extent box_extent(const BoundingBox& b) {
    const double left = b.center_x - (b.width - 1.0) / 2.0;
    const double top = b.center_y - (b.height - 1.0) / 2.0;
    return {left, left + b.width, top, top + b.height};
}

} // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (a.width < 0 || a.height < 0 || b.width < 0 || b.height < 0) {
        throw Error(ErrorCode::InvalidArgument, "boxes must have non-negative extent");
    }
    const Extent ea = box_extent(a);
    const Extent eb = box_extent(b);
    const double iw = std::min(ea.right, eb.right) - std::max(ea.left, eb.left);
    const double ih = std::min(ea.bottom, eb.bottom) - std::max(ea.top, eb.top);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.width * a.height + b.width * b.height - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return inter / uni;
}

PrCurve pr_curve(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
                 int class_id, double iou_threshold) {
    if (truth.size() != detections.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "truth and detection sets cover different image counts");
    }

    struct Det {
        double score;
        std::size_t image;
        std::size_t box;
    };
    std::vector<Det> dets;
    Index total_truth = 0;
    std::vector<std::vector<bool>> matched(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        matched[i].assign(truth[i].boxes.size(), false);
        for (const BoundingBox& b : truth[i].boxes) {
            if (b.class_id == class_id) {
                ++total_truth;
            }
        }
        for (std::size_t j = 0; j < detections[i].boxes.size(); ++j) {
            const BoundingBox& d = detections[i].boxes[j];
            if (d.class_id != class_id) {
                continue;
            }
            if (!d.score.has_value()) {
                throw Error(ErrorCode::InvalidArgument, "detection box without a score");
            }
            dets.push_back({*d.score, i, j});
        }
    }
    // Descending score; input order (image, then box) breaks ties.
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Det& a, const Det& b) { return a.score > b.score; });

    PrCurve curve;
    curve.truth_count = total_truth;
    Index tp = 0;
    Index fp = 0;
    for (const Det& det : dets) {
        const AnnotationSet& t = truth[det.image];
        const BoundingBox& d = detections[det.image].boxes[det.box];
        double best_iou = 0.0;
        std::ptrdiff_t best = -1;
        for (std::size_t j = 0; j < t.boxes.size(); ++j) {
            if (matched[det.image][j] || t.boxes[j].class_id != class_id) {
                continue;
            }
            const double overlap = iou(d, t.boxes[j]);
            if (overlap >= iou_threshold && overlap > best_iou) {
                best_iou = overlap;
                best = static_cast<std::ptrdiff_t>(j);
            }
        }
        if (best >= 0) {
            matched[det.image][static_cast<std::size_t>(best)] = true;
            ++tp;
        } else {
            ++fp;
        }
        PrPoint point;
        point.recall = total_truth > 0 ? static_cast<double>(tp) / static_cast<double>(total_truth)
                                       : 0.0;
        point.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        curve.points.push_back(point);
    }
    curve.true_positives = tp;
    curve.false_positives = fp;
    curve.false_negatives = total_truth - tp;
    return curve;
}

double average_precision(const PrCurve& curve) {
    if (curve.points.empty()) {
        return 0.0;
    }
    // Precision envelope: each point gets the best precision at an equal or
    // higher recall, then AP is the sum of recall steps times that envelope.
    std::vector<double> envelope(curve.points.size());
    double running = 0.0;
    for (std::size_t i = curve.points.size(); i-- > 0;) {
        running = std::max(running, curve.points[i].precision);
        envelope[i] = running;
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        ap += (curve.points[i].recall - prev_recall) * envelope[i];
        prev_recall = curve.points[i].recall;
    }
    return ap;
}

ApResult dataset_ap(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
                    double iou_threshold) {
    std::set<int> classes;
    for (const AnnotationSet& t : truth) {
        for (const BoundingBox& b : t.boxes) {
            classes.insert(b.class_id);
        }
    }
    if (classes.empty()) {
        throw Error(ErrorCode::UndefinedMetric, "no ground-truth boxes; AP undefined");
    }

    ApResult result;
    double total = 0.0;
    for (int class_id : classes) {
        const double ap = average_precision(pr_curve(truth, detections, class_id, iou_threshold));
        result.class_ids.push_back(class_id);
        result.per_class.push_back(ap);
        total += ap;
    }
    result.mean = total / static_cast<double>(result.per_class.size());
    return result;
}

double mean_ap(std::span<const AnnotationSet> truth, std::span<const DetectionSet> detections,
               MapVariant variant) {
    switch (variant) {
    case MapVariant::Map50:
        return dataset_ap(truth, detections, 0.50).mean;
    case MapVariant::Map75:
        return dataset_ap(truth, detections, 0.75).mean;
    case MapVariant::Map50To95: {
        double total = 0.0;
        for (int i = 0; i < 10; ++i) {
            total += dataset_ap(truth, detections, (50 + 5 * i) / 100.0).mean;
        }
        return total / 10.0;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown mAP variant");
}

// ---------------------------------------------------------------------------
// Welch's t-test
// ---------------------------------------------------------------------------

namespace {

/// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) {
        d = fpmin;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) {
            d = fpmin;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) {
            c = fpmin;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) {
            d = fpmin;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) {
            c = fpmin;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "beta parameters must be positive");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw Error(ErrorCode::TooFewSamples, "welch_t_test needs at least 2 samples per side");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    auto mean_var = [](std::span<const double> s, double n) {
        double mean = 0.0;
        for (double v : s) {
            mean += v;
        }
        mean /= n;
        double var = 0.0;
        for (double v : s) {
            var += (v - mean) * (v - mean);
        }
        return std::pair{mean, var / (n - 1.0)};
    };
    const auto [ma, va] = mean_var(a, na);
    const auto [mb, vb] = mean_var(b, nb);

    if (va == 0.0 && vb == 0.0) {
        throw Error(ErrorCode::ZeroVariance, "both samples have zero variance");
    }

    const double sa = va / na;
    const double sb = vb / nb;
    const double se2 = sa + sb;

    TTestResult result;
    result.t_statistic = (ma - mb) / std::sqrt(se2);
    result.degrees_of_freedom =
        se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));

    const double t2 = result.t_statistic * result.t_statistic;
    const double df = result.degrees_of_freedom;
    result.p_value = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2));
    return result;
}

} // namespace emistrip
