#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace emistrip {

using Index = Eigen::Index;

/// Dense row-major raster plane. Scalar is uint16_t for sample storage and
/// double for metric math; Eigen expressions work on both.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using SamplePlane = Plane<std::uint16_t>;

enum class Channel : std::uint8_t { R = 0, G = 1, B = 2 };

char channel_letter(Channel c);

/// 2x2-periodic Bayer arrangement. The name spells the tile row-major:
/// GRBG means row 0 = G R, row 1 = B G.
enum class CfaPattern : std::uint8_t { GRBG = 0, RGGB = 1, BGGR = 2, GBRG = 3 };

/// The 2x2 tile for a pattern, tile[row][col].
const std::array<std::array<Channel, 2>, 2>& cfa_tile(CfaPattern pattern);

const char* cfa_pattern_name(CfaPattern pattern);
CfaPattern parse_cfa_pattern(const std::string& name);

/// Single-channel Bayer mosaic raster. `samples` is height x width; each
/// entry holds the one channel the CFA exposes at that pixel.
struct RawImage {
    SamplePlane samples;
    CfaPattern pattern = CfaPattern::GRBG;
    std::uint16_t max_value = 255;
    /// Row indices dropped to produce this image, empty when untouched.
    /// Carried through PGM comments so downstream steps need not re-detect.
    std::vector<Index> applied_drops;

    Index width() const { return samples.cols(); }
    Index height() const { return samples.rows(); }
};

/// Full-color raster stored as three planes (R, G, B), each height x width.
struct RgbImage {
    std::array<SamplePlane, 3> planes;
    std::uint16_t max_value = 255;

    Index width() const { return planes[0].cols(); }
    Index height() const { return planes[0].rows(); }

    SamplePlane& plane(Channel c) { return planes[static_cast<std::size_t>(c)]; }
    const SamplePlane& plane(Channel c) const { return planes[static_cast<std::size_t>(c)]; }
};

/// Throws Error on invariant violations: even dims >= 2, samples in range.
void validate_raw(const RawImage& raw);

/// Throws Error on invariant violations: positive dims, equal plane shapes,
/// samples in range.
void validate_rgb(const RgbImage& rgb);

RawImage make_raw(Index height, Index width, CfaPattern pattern, std::uint16_t max_value,
                  std::uint16_t fill = 0);
RgbImage make_rgb(Index height, Index width, std::uint16_t max_value,
                  std::uint16_t r = 0, std::uint16_t g = 0, std::uint16_t b = 0);

bool operator==(const RawImage& a, const RawImage& b);
bool operator==(const RgbImage& a, const RgbImage& b);

} // namespace emistrip
