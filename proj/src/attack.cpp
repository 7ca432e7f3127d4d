#include "emistrip/attack.hpp"

#include "emistrip/cfa.hpp"
#include "emistrip/error.hpp"

#include <algorithm>

namespace emistrip {

const char* padding_kind_name(PaddingKind kind) {
    switch (kind) {
    case PaddingKind::WrapTop: return "wrap_top";
    case PaddingKind::NextFrame: return "next_frame";
    case PaddingKind::ReplicateLast: return "replicate_last";
    case PaddingKind::Zero: return "zero";
    }
    return "?";
}

PaddingKind parse_padding_kind(const std::string& name) {
    if (name == "wrap_top") return PaddingKind::WrapTop;
    if (name == "next_frame") return PaddingKind::NextFrame;
    if (name == "replicate_last") return PaddingKind::ReplicateLast;
    if (name == "zero") return PaddingKind::Zero;
    throw Error(ErrorCode::ParseError, "unknown padding strategy \"" + name + "\"");
}

RawImage apply_attack(const RawImage& raw, const DropSet& drops, const Padding& pad) {
    validate_raw(raw);
    const Index h = raw.height();
    const Index w = raw.width();
    if (drops.image_height != h) {
        throw Error(ErrorCode::DimensionMismatch,
                    "drop set is for height " + std::to_string(drops.image_height) +
                        ", image has " + std::to_string(h));
    }
    check_drop_invariants(drops.indices, h);

    if (pad.kind == PaddingKind::NextFrame) {
        if (!pad.companion.has_value()) {
            throw Error(ErrorCode::InvalidArgument, "next_frame padding needs a companion image");
        }
        const RawImage& frame = *pad.companion;
        if (frame.height() != h || frame.width() != w) {
            throw Error(ErrorCode::DimensionMismatch, "companion frame dimensions differ");
        }
        if (frame.pattern != raw.pattern) {
            throw Error(ErrorCode::PatternMismatch, "companion frame CFA pattern differs");
        }
    }

    const Index m = drops.count();
    RawImage out;
    out.pattern = raw.pattern;
    out.max_value = raw.max_value;
    out.applied_drops = drops.indices;
    out.samples.resize(h, w);

    Index dst = 0;
    std::size_t next_drop = 0;
    for (Index src = 0; src < h; ++src) {
        if (next_drop < drops.indices.size() && drops.indices[next_drop] == src) {
            ++next_drop;
            continue;
        }
        out.samples.row(dst++) = raw.samples.row(src);
    }

    for (Index j = 0; j < m; ++j) {
        switch (pad.kind) {
        case PaddingKind::WrapTop:
            out.samples.row(dst + j) = raw.samples.row(j);
            break;
        case PaddingKind::NextFrame:
            out.samples.row(dst + j) = pad.companion->samples.row(j);
            break;
        case PaddingKind::ReplicateLast:
            out.samples.row(dst + j) = out.samples.row(dst - 1);
            break;
        case PaddingKind::Zero:
            out.samples.row(dst + j).setZero();
            break;
        }
    }
    return out;
}

RgbImage simulate_attacked_rgb(const RgbImage& rgb, CfaPattern pattern, const DropSet& drops,
                               const Padding& pad) {
    return demosaic(apply_attack(mosaic(rgb, pattern), drops, pad));
}

} // namespace emistrip
