#include "emistrip/cfa.hpp"

#include "emistrip/error.hpp"

#include <cstdint>

namespace emistrip {

RawImage mosaic(const RgbImage& rgb, CfaPattern pattern) {
    validate_rgb(rgb);
    const Index h = rgb.height();
    const Index w = rgb.width();
    if (h % 2 != 0 || w % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch,
                    "mosaic needs even dimensions, got " + std::to_string(h) + "x" +
                        std::to_string(w));
    }

    RawImage raw;
    raw.pattern = pattern;
    raw.max_value = rgb.max_value;
    raw.samples.resize(h, w);
    const auto& tile = cfa_tile(pattern);
    for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < w; ++c) {
            const Channel ch = tile[static_cast<std::size_t>(r & 1)][static_cast<std::size_t>(c & 1)];
            raw.samples(r, c) = rgb.plane(ch)(r, c);
        }
    }
    return raw;
}

namespace {

/// Average of two or four neighbor samples, rounded half up (samples are
/// non-negative, so this is round half away from zero).
inline std::uint16_t avg2(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint16_t>((a + b + 1) / 2);
}

inline std::uint16_t avg4(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return static_cast<std::uint16_t>((a + b + c + d + 2) / 4);
}

} // namespace

RgbImage demosaic(const RawImage& raw) {
    validate_raw(raw);
    const Index h = raw.height();
    const Index w = raw.width();
    const SamplePlane& s = raw.samples;

    // Replicated borders: out-of-image neighbors clamp to the edge sample.
    auto at = [&](Index r, Index c) -> std::uint32_t {
        r = r < 0 ? 0 : (r >= h ? h - 1 : r);
        c = c < 0 ? 0 : (c >= w ? w - 1 : c);
        return s(r, c);
    };

    RgbImage rgb;
    rgb.max_value = raw.max_value;
    for (auto& plane : rgb.planes) {
        plane.resize(h, w);
    }

    const auto& tile = cfa_tile(raw.pattern);
    for (Index r = 0; r < h; ++r) {
        for (Index c = 0; c < w; ++c) {
            const Channel native = tile[static_cast<std::size_t>(r & 1)][static_cast<std::size_t>(c & 1)];
            const std::uint16_t v = s(r, c);
            std::uint16_t red, green, blue;
            switch (native) {
            case Channel::G: {
                green = v;
                // G sits between two same-row and two same-column chroma
                // sites; which row holds R depends on the pattern phase.
                const Channel row_mate =
                    tile[static_cast<std::size_t>(r & 1)][static_cast<std::size_t>(~c & 1)];
                const std::uint16_t horiz = avg2(at(r, c - 1), at(r, c + 1));
                const std::uint16_t vert = avg2(at(r - 1, c), at(r + 1, c));
                if (row_mate == Channel::R) {
                    red = horiz;
                    blue = vert;
                } else {
                    red = vert;
                    blue = horiz;
                }
                break;
            }
            case Channel::R:
                red = v;
                green = avg4(at(r - 1, c), at(r + 1, c), at(r, c - 1), at(r, c + 1));
                blue = avg4(at(r - 1, c - 1), at(r - 1, c + 1), at(r + 1, c - 1), at(r + 1, c + 1));
                break;
            case Channel::B:
            default:
                blue = v;
                green = avg4(at(r - 1, c), at(r + 1, c), at(r, c - 1), at(r, c + 1));
                red = avg4(at(r - 1, c - 1), at(r - 1, c + 1), at(r + 1, c - 1), at(r + 1, c + 1));
                break;
            }
            rgb.planes[0](r, c) = red;
            rgb.planes[1](r, c) = green;
            rgb.planes[2](r, c) = blue;
        }
    }
    return rgb;
}

} // namespace emistrip
