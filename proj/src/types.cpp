#include "emistrip/types.hpp"

#include "emistrip/error.hpp"

#include <algorithm>
#include <cctype>

namespace emistrip {

namespace {

constexpr Channel R = Channel::R;
constexpr Channel G = Channel::G;
constexpr Channel B = Channel::B;

using Tile = std::array<std::array<Channel, 2>, 2>;

constexpr std::array<Tile, 4> kTiles = {{
    {{{G, R}, {B, G}}}, // GRBG
    {{{R, G}, {G, B}}}, // RGGB
    {{{B, G}, {G, R}}}, // BGGR
    {{{G, B}, {R, G}}}, // GBRG
}};

} // namespace

char channel_letter(Channel c) {
    switch (c) {
    case Channel::R: return 'R';
    case Channel::G: return 'G';
    case Channel::B: return 'B';
    }
    return '?';
}

const Tile& cfa_tile(CfaPattern pattern) {
    return kTiles[static_cast<std::size_t>(pattern)];
}

const char* cfa_pattern_name(CfaPattern pattern) {
    switch (pattern) {
    case CfaPattern::GRBG: return "GRBG";
    case CfaPattern::RGGB: return "RGGB";
    case CfaPattern::BGGR: return "BGGR";
    case CfaPattern::GBRG: return "GBRG";
    }
    return "?";
}

CfaPattern parse_cfa_pattern(const std::string& name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "GRBG") return CfaPattern::GRBG;
    if (upper == "RGGB") return CfaPattern::RGGB;
    if (upper == "BGGR") return CfaPattern::BGGR;
    if (upper == "GBRG") return CfaPattern::GBRG;
    throw Error(ErrorCode::ParseError, "unknown CFA pattern \"" + name + "\"");
}

namespace {

void check_samples(const SamplePlane& plane, std::uint16_t max_value, const char* what) {
    if ((plane > max_value).any()) {
        throw Error(ErrorCode::OutOfRange,
                    std::string(what) + " sample exceeds max_value " + std::to_string(max_value));
    }
}

} // namespace

void validate_raw(const RawImage& raw) {
    const Index h = raw.height();
    const Index w = raw.width();
    if (h < 2 || w < 2) {
        throw Error(ErrorCode::DimensionMismatch,
                    "raw image must be at least 2x2, got " + std::to_string(h) + "x" +
                        std::to_string(w));
    }
    if (h % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "raw image height " + std::to_string(h) + " is odd");
    }
    if (w % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "raw image width " + std::to_string(w) + " is odd");
    }
    if (raw.max_value == 0) {
        throw Error(ErrorCode::InvalidArgument, "max_value must be positive");
    }
    check_samples(raw.samples, raw.max_value, "raw");
}

void validate_rgb(const RgbImage& rgb) {
    const Index h = rgb.height();
    const Index w = rgb.width();
    if (h < 1 || w < 1) {
        throw Error(ErrorCode::DimensionMismatch, "rgb image must be non-empty");
    }
    if (rgb.max_value == 0) {
        throw Error(ErrorCode::InvalidArgument, "max_value must be positive");
    }
    for (const auto& plane : rgb.planes) {
        if (plane.rows() != h || plane.cols() != w) {
            throw Error(ErrorCode::DimensionMismatch, "rgb planes have differing shapes");
        }
        check_samples(plane, rgb.max_value, "rgb");
    }
}

RawImage make_raw(Index height, Index width, CfaPattern pattern, std::uint16_t max_value,
                  std::uint16_t fill) {
    RawImage raw;
    raw.samples = SamplePlane::Constant(height, width, fill);
    raw.pattern = pattern;
    raw.max_value = max_value;
    return raw;
}

RgbImage make_rgb(Index height, Index width, std::uint16_t max_value, std::uint16_t r,
                  std::uint16_t g, std::uint16_t b) {
    RgbImage rgb;
    rgb.planes[0] = SamplePlane::Constant(height, width, r);
    rgb.planes[1] = SamplePlane::Constant(height, width, g);
    rgb.planes[2] = SamplePlane::Constant(height, width, b);
    rgb.max_value = max_value;
    return rgb;
}

bool operator==(const RawImage& a, const RawImage& b) {
    return a.pattern == b.pattern && a.max_value == b.max_value &&
           a.samples.rows() == b.samples.rows() && a.samples.cols() == b.samples.cols() &&
           (a.samples == b.samples).all();
}

bool operator==(const RgbImage& a, const RgbImage& b) {
    if (a.max_value != b.max_value || a.width() != b.width() || a.height() != b.height()) {
        return false;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(a.planes[i] == b.planes[i]).all()) {
            return false;
        }
    }
    return true;
}

} // namespace emistrip
