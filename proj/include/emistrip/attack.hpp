#pragma once

#include "emistrip/drops.hpp"
#include "emistrip/types.hpp"

#include <optional>

namespace emistrip {

enum class PaddingKind : std::uint8_t { WrapTop, NextFrame, ReplicateLast, Zero };

const char* padding_kind_name(PaddingKind kind);
PaddingKind parse_padding_kind(const std::string& name);

/// How the m rows removed from the bottom get refilled. WrapTop appends the
/// first m rows of the original image; NextFrame appends the first m rows of
/// a companion frame of identical geometry.
struct Padding {
    PaddingKind kind = PaddingKind::WrapTop;
    std::optional<RawImage> companion;

    static Padding wrap_top() { return {PaddingKind::WrapTop, std::nullopt}; }
    static Padding next_frame(RawImage frame) { return {PaddingKind::NextFrame, std::move(frame)}; }
    static Padding replicate_last() { return {PaddingKind::ReplicateLast, std::nullopt}; }
    static Padding zero() { return {PaddingKind::Zero, std::nullopt}; }
};

/// Drop the rows in `drops` from `raw`, keeping the survivors in order, and
/// refill the bottom to the original height. The applied drop set is recorded
/// in the output's metadata.
RawImage apply_attack(const RawImage& raw, const DropSet& drops, const Padding& pad);

/// Full pipeline on an RGB input: mosaic, drop rows, reconstruct.
RgbImage simulate_attacked_rgb(const RgbImage& rgb, CfaPattern pattern, const DropSet& drops,
                               const Padding& pad);

} // namespace emistrip
