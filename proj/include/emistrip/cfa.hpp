#pragma once

#include "emistrip/types.hpp"

namespace emistrip {

/// Channel the CFA exposes at (row, col); periodic with period 2 in both axes.
inline Channel channel_at(CfaPattern pattern, Index row, Index col) {
    return cfa_tile(pattern)[static_cast<std::size_t>(row & 1)][static_cast<std::size_t>(col & 1)];
}

/// Sample the CFA-selected channel of each pixel. Dimensions and max_value
/// are preserved; odd dimensions are rejected.
RawImage mosaic(const RgbImage& rgb, CfaPattern pattern);

/// Bilinear reconstruction. The natively sampled channel passes through
/// unchanged; missing channels are the average of the nearest same-channel
/// neighbors with replicated borders. Averages round half away from zero.
RgbImage demosaic(const RawImage& raw);

} // namespace emistrip
