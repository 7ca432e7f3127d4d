#pragma once

#include "emistrip/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace emistrip {

/// Ascending, non-adjacent row indices to drop from an image of
/// `image_height` rows. Aggregate by design: tests and internal callers may
/// build instances directly; validate_drop_set() is the gate for user input.
struct DropSet {
    std::vector<Index> indices;
    Index image_height = 0;

    Index count() const { return static_cast<Index>(indices.size()); }
    bool empty() const { return indices.empty(); }
};

bool operator==(const DropSet& a, const DropSet& b);

/// One predicted strip in attacked-image coordinates, rows [start, end].
struct Strip {
    Index start = 0;
    Index end = 0;

    Index height() const { return end - start + 1; }
};

bool operator==(const Strip& a, const Strip& b);

struct StripLayout {
    std::vector<Strip> strips;
    Index image_height = 0;

    Index count() const { return static_cast<Index>(strips.size()); }
};

/// Structural invariants only: strictly ascending, pairwise gaps >= 2, all
/// indices in [0, image_height - 1]. Throws NotAscending / AdjacentRows /
/// OutOfRange naming the offending index.
void check_drop_invariants(std::span<const Index> indices, Index image_height);

/// Full validation gate: structural invariants plus rejection of drop sets
/// whose strip positions collide (DegenerateStrip). Use for all user input.
DropSet validate_drop_set(std::span<const Index> indices, Index image_height);

/// Strip boundary rows in attacked-image coordinates:
/// x'_0 = x_0, x'_i = x_i - 2*floor((i+1)/2).
std::vector<Index> strip_positions(const DropSet& drops);

/// Inverse of strip_positions; the result is fully validated.
DropSet dropped_rows_from_positions(std::span<const Index> positions, Index image_height);

/// Pairs positions into strips: (x'_0,x'_1), (x'_2,x'_3), ...; an odd count
/// makes the final strip run to the last image row.
StripLayout strips_from_positions(std::span<const Index> positions, Index image_height);

/// ceil(m / 2)
Index strip_count(Index dropped_rows);

/// Deterministic rejection sampler for a drop set producing exactly
/// `n_strips` interior strips (2*n_strips rows, even, so no to-bottom strip).
/// Pairwise gaps are kept >= max(2, min_gap). The default min_gap of 3 keeps
/// sampled strips at least two rows tall and two rows apart, which the
/// 3-row profile smoothing in strip identification needs to stay exact.
DropSet sample_drop_set(Index n_strips, Index image_height, std::uint64_t seed,
                        Index min_gap = 3);

/// Text format: one ascending comma-separated list, e.g. "10,20,30,40".
std::string format_drop_list(std::span<const Index> indices);
std::vector<Index> parse_drop_list(const std::string& line);

} // namespace emistrip
