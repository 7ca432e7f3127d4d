#pragma once

#include "emistrip/drops.hpp"
#include "emistrip/types.hpp"

#include <iosfwd>

namespace emistrip {

/// Per-row mean absolute sample difference between a clean/attacked pair,
/// normalized by the dynamic range.
struct RowDifferenceProfile {
    Eigen::ArrayXd values;
    std::uint16_t normalization = 255;

    Index height() const { return values.size(); }
};

enum class ThresholdPolicy : std::uint8_t {
    /// theta = (min + max) / 2 of the smoothed profile when max exceeds the
    /// noise floor, else no edges.
    Midpoint,
    /// 1-D two-means clustering of profile values; theta is the midpoint of
    /// the cluster means.
    TwoMeans,
};

struct EdgeDetectionOptions {
    ThresholdPolicy policy = ThresholdPolicy::Midpoint;
    /// Fraction of dynamic range below which a profile is treated as flat.
    double noise_floor = 0.02;
};

struct EdgeDetectionResult {
    /// Strip boundary rows x'_0, x'_1, ... An odd count means the last strip
    /// runs to the image bottom.
    std::vector<Index> positions;
    /// Set when the bright/dark separation of the profile is marginal.
    bool low_confidence = false;
};

RowDifferenceProfile row_difference_profile(const RawImage& clean, const RawImage& attacked);

/// Binarize the 3-row-smoothed profile and emit one position per strip
/// boundary: the rising edge and the last bright row of each run. A run that
/// reaches the image bottom is either the wrapped padding (discarded when its
/// start matches the padding extent implied by the earlier runs) or an odd-m
/// strip running to the bottom, emitted as a single trailing position.
EdgeDetectionResult detect_strip_edges(const RowDifferenceProfile& profile,
                                       const EdgeDetectionOptions& options = {});

/// Recover the drop set from a clean/attacked pair. Empty result when no
/// strips are detected; invalid reconstructions propagate their errors.
DropSet identify_dropped_rows(const RawImage& clean, const RawImage& attacked,
                              const EdgeDetectionOptions& options = {});

/// CSV dump (row_index,value) for plotting.
void write_profile_csv(std::ostream& out, const RowDifferenceProfile& profile);

} // namespace emistrip
