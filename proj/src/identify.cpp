#include "emistrip/identify.hpp"

#include "emistrip/error.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace emistrip {

RowDifferenceProfile row_difference_profile(const RawImage& clean, const RawImage& attacked) {
    validate_raw(clean);
    validate_raw(attacked);
    if (clean.height() != attacked.height() || clean.width() != attacked.width()) {
        throw Error(ErrorCode::DimensionMismatch, "clean and attacked image dimensions differ");
    }
    if (clean.pattern != attacked.pattern) {
        throw Error(ErrorCode::PatternMismatch, "clean and attacked CFA patterns differ");
    }
    if (clean.max_value != attacked.max_value) {
        throw Error(ErrorCode::DimensionMismatch, "clean and attacked dynamic ranges differ");
    }

    RowDifferenceProfile profile;
    profile.normalization = clean.max_value;
    profile.values = (clean.samples.cast<double>() - attacked.samples.cast<double>())
                         .abs()
                         .rowwise()
                         .mean() /
                     static_cast<double>(clean.max_value);
    return profile;
}

namespace {

/// Centered 3-row moving average with replicated ends.
Eigen::ArrayXd smooth(const Eigen::ArrayXd& values) {
    const Index n = values.size();
    Eigen::ArrayXd out(n);
    for (Index i = 0; i < n; ++i) {
        const double a = values[std::max<Index>(0, i - 1)];
        const double b = values[i];
        const double c = values[std::min<Index>(n - 1, i + 1)];
        out[i] = (a + b + c) / 3.0;
    }
    return out;
}

struct Run {
    Index first = 0;
    Index last = 0;
};

struct Binarized {
    std::vector<Run> runs;
    bool low_confidence = false;
};

std::optional<double> pick_threshold(const Eigen::ArrayXd& smoothed,
                                     const EdgeDetectionOptions& options) {
    const double max = smoothed.maxCoeff();
    if (max <= options.noise_floor) {
        return std::nullopt;
    }
    const double min = smoothed.minCoeff();
    if (options.policy == ThresholdPolicy::Midpoint) {
        return (min + max) / 2.0;
    }
    // Two-means on the 1-D values, seeded at the extremes. Assignment uses
    // the midpoint of the current centers, so each step is a sort-free sweep.
    double lo = min;
    double hi = max;
    for (int iter = 0; iter < 100; ++iter) {
        const double split = (lo + hi) / 2.0;
        double sum_lo = 0.0, sum_hi = 0.0;
        Index n_lo = 0, n_hi = 0;
        for (Index i = 0; i < smoothed.size(); ++i) {
            if (smoothed[i] > split) {
                sum_hi += smoothed[i];
                ++n_hi;
            } else {
                sum_lo += smoothed[i];
                ++n_lo;
            }
        }
        if (n_lo == 0 || n_hi == 0) {
            break;
        }
        const double new_lo = sum_lo / static_cast<double>(n_lo);
        const double new_hi = sum_hi / static_cast<double>(n_hi);
        if (new_lo == lo && new_hi == hi) {
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    return (lo + hi) / 2.0;
}

Binarized binarize(const Eigen::ArrayXd& smoothed, const EdgeDetectionOptions& options) {
    Binarized result;
    const auto threshold = pick_threshold(smoothed, options);
    if (!threshold.has_value()) {
        return result;
    }
    const double theta = *threshold;

    for (Index i = 0; i < smoothed.size(); ++i) {
        if (smoothed[i] > theta) {
            if (!result.runs.empty() && result.runs.back().last == i - 1) {
                result.runs.back().last = i;
            } else {
                result.runs.push_back({i, i});
            }
        }
    }

    // Marginal separation between the dimmest bright row and the brightest
    // dark row means the binarization is teetering on the threshold.
    if (!result.runs.empty()) {
        double min_bright = smoothed.maxCoeff();
        double max_dark = smoothed.minCoeff();
        for (Index i = 0; i < smoothed.size(); ++i) {
            if (smoothed[i] > theta) {
                min_bright = std::min(min_bright, smoothed[i]);
            } else {
                max_dark = std::max(max_dark, smoothed[i]);
            }
        }
        const double range = smoothed.maxCoeff() - smoothed.minCoeff();
        result.low_confidence = (min_bright - max_dark) < 0.05 * range;
    }
    return result;
}

/// The positional rule: complete runs contribute (first, last); a run
/// reaching the bottom row is padding when its start matches the extent
/// implied by the earlier runs, otherwise the start of an odd to-bottom strip.
std::vector<Index> base_positions(const std::vector<Run>& runs, Index height) {
    std::vector<Index> positions;
    for (const Run& run : runs) {
        if (run.last == height - 1) {
            const Index implied_padding_start = height - static_cast<Index>(positions.size());
            if (run.first == implied_padding_start) {
                break;
            }
            positions.push_back(run.first);
            break;
        }
        positions.push_back(run.first);
        positions.push_back(run.last);
    }
    return positions;
}

} // namespace

EdgeDetectionResult detect_strip_edges(const RowDifferenceProfile& profile,
                                       const EdgeDetectionOptions& options) {
    if (profile.values.size() == 0) {
        throw Error(ErrorCode::InvalidArgument, "empty difference profile");
    }
    const Binarized bin = binarize(smooth(profile.values), options);
    EdgeDetectionResult result;
    result.low_confidence = bin.low_confidence;
    result.positions = base_positions(bin.runs, profile.height());
    return result;
}

namespace {

/// Bit-exact check that `attacked` above its padded region is `clean` with
/// the candidate rows deleted. Row drops copy rows verbatim, so the true
/// drop set always passes and a wrong one fails unless the image repeats
/// whole rows.
bool kept_rows_match(const RawImage& clean, const RawImage& attacked, const DropSet& drops) {
    const Index h = clean.height();
    Index dst = 0;
    std::size_t next_drop = 0;
    for (Index src = 0; src < h; ++src) {
        if (next_drop < drops.indices.size() && drops.indices[next_drop] == src) {
            ++next_drop;
            continue;
        }
        if (!(attacked.samples.row(dst) == clean.samples.row(src)).all()) {
            return false;
        }
        ++dst;
    }
    return true;
}

} // namespace

DropSet identify_dropped_rows(const RawImage& clean, const RawImage& attacked,
                              const EdgeDetectionOptions& options) {
    const RowDifferenceProfile profile = row_difference_profile(clean, attacked);
    const Index h = profile.height();
    const Binarized bin = binarize(smooth(profile.values), options);
    if (bin.runs.empty()) {
        return DropSet{{}, h};
    }

    // The bottom of the profile is ambiguous: a run reaching the last row
    // can be the padding alone, an odd to-bottom strip, or an even strip
    // merged into the padding. Enumerate the readings and keep the first
    // whose implied row mapping reproduces the attacked image bit-exactly.
    std::vector<std::vector<Index>> candidates;
    candidates.push_back(base_positions(bin.runs, h));

    const Run& last = bin.runs.back();
    if (last.last == h - 1) {
        std::vector<Index> prefix;
        for (std::size_t i = 0; i + 1 < bin.runs.size(); ++i) {
            prefix.push_back(bin.runs[i].first);
            prefix.push_back(bin.runs[i].last);
        }
        const Index k = static_cast<Index>(prefix.size());
        // Padding whose detected start drifted a row off the implied extent.
        if (last.first == h - k - 1 || last.first == h - k + 1) {
            candidates.push_back(prefix);
        }
        // Even strip flush against the padding (gap of 0 or 1 dark rows
        // bridged by the smoothing); its falling edge is synthesized.
        for (const Index end : {h - k - 3, h - k - 4}) {
            if (end > last.first) {
                auto with_strip = prefix;
                with_strip.push_back(last.first);
                with_strip.push_back(end);
                candidates.push_back(with_strip);
            }
        }
    }

    std::optional<DropSet> base;
    std::optional<Error> base_error;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        try {
            DropSet drops = dropped_rows_from_positions(candidates[i], h);
            if (i == 0) {
                base = drops;
            }
            if (kept_rows_match(clean, attacked, drops)) {
                return drops;
            }
        } catch (const Error& e) {
            if (i == 0) {
                base_error = e;
            }
        }
    }
    if (base.has_value()) {
        return *base;
    }
    throw *base_error;
}

void write_profile_csv(std::ostream& out, const RowDifferenceProfile& profile) {
    out << "row_index,value\n";
    char buf[64];
    for (Index i = 0; i < profile.values.size(); ++i) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), profile.values[i]);
        out << i << ',' << std::string_view(buf, end) << '\n';
    }
}

} // namespace emistrip
