#include "emistrip/drops.hpp"

#include "emistrip/error.hpp"
#include "emistrip/rng.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace emistrip {

bool operator==(const DropSet& a, const DropSet& b) {
    return a.image_height == b.image_height && a.indices == b.indices;
}

bool operator==(const Strip& a, const Strip& b) {
    return a.start == b.start && a.end == b.end;
}

void check_drop_invariants(std::span<const Index> indices, Index image_height) {
    if (image_height < 1) {
        throw Error(ErrorCode::InvalidArgument, "image_height must be positive");
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Index x = indices[i];
        if (x < 0 || x >= image_height) {
            throw Error(ErrorCode::OutOfRange, "drop index " + std::to_string(x) +
                                                   " outside [0, " +
                                                   std::to_string(image_height - 1) + "]");
        }
        if (i > 0) {
            const Index prev = indices[i - 1];
            if (x <= prev) {
                throw Error(ErrorCode::NotAscending,
                            "drop indices must strictly ascend; " + std::to_string(x) +
                                " follows " + std::to_string(prev));
            }
            if (x == prev + 1) {
                throw Error(ErrorCode::AdjacentRows,
                            "drop indices " + std::to_string(prev) + " and " + std::to_string(x) +
                                " are adjacent rows");
            }
        }
    }
}

DropSet validate_drop_set(std::span<const Index> indices, Index image_height) {
    check_drop_invariants(indices, image_height);
    DropSet drops{{indices.begin(), indices.end()}, image_height};
    const std::vector<Index> positions = strip_positions(drops);
    for (std::size_t i = 1; i < positions.size(); ++i) {
        if (positions[i] <= positions[i - 1]) {
            throw Error(ErrorCode::DegenerateStrip,
                        "drops " + std::to_string(drops.indices[i - 1]) + "," +
                            std::to_string(drops.indices[i]) +
                            " collapse to a zero-height strip at row " +
                            std::to_string(positions[i]));
        }
    }
    return drops;
}

std::vector<Index> strip_positions(const DropSet& drops) {
    std::vector<Index> positions;
    positions.reserve(drops.indices.size());
    for (std::size_t i = 0; i < drops.indices.size(); ++i) {
        positions.push_back(drops.indices[i] - 2 * (static_cast<Index>(i) + 1) / 2);
    }
    return positions;
}

DropSet dropped_rows_from_positions(std::span<const Index> positions, Index image_height) {
    std::vector<Index> indices;
    indices.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        indices.push_back(positions[i] + 2 * (static_cast<Index>(i) + 1) / 2);
    }
    return validate_drop_set(indices, image_height);
}

StripLayout strips_from_positions(std::span<const Index> positions, Index image_height) {
    StripLayout layout;
    layout.image_height = image_height;
    for (std::size_t i = 0; i + 1 < positions.size(); i += 2) {
        layout.strips.push_back({positions[i], positions[i + 1]});
    }
    if (positions.size() % 2 == 1) {
        layout.strips.push_back({positions.back(), image_height - 1});
    }
    return layout;
}

Index strip_count(Index dropped_rows) {
    return (dropped_rows + 1) / 2;
}

DropSet sample_drop_set(Index n_strips, Index image_height, std::uint64_t seed, Index min_gap) {
    if (n_strips < 0) {
        throw Error(ErrorCode::InvalidArgument, "n_strips must be non-negative");
    }
    if (n_strips == 0) {
        return DropSet{{}, image_height};
    }
    const Index m = 2 * n_strips;
    const Index gap = std::max<Index>(2, min_gap);
    // m rows with pairwise gaps >= gap span at least (m - 1) * gap + 1 rows.
    if ((m - 1) * gap + 1 > image_height) {
        throw Error(ErrorCode::Infeasible,
                    std::to_string(m) + " rows with gaps >= " + std::to_string(gap) +
                        " need at least " + std::to_string((m - 1) * gap + 1) +
                        " rows, image has " + std::to_string(image_height));
    }

    // Sets with pairwise gaps >= gap biject onto plain m-subsets of a range
    // shrunk by the mandatory spacing (u_i = x_i - i*(gap - 1)), so sampling
    // a uniform subset there and spreading it back out is uniform over the
    // valid sets without rejection. Floyd's algorithm keeps the subset draw
    // itself rejection-free and seed-deterministic.
    const Index reduced = image_height - (m - 1) * (gap - 1);
    Rng rng(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<Index> picked;
        picked.reserve(static_cast<std::size_t>(m));
        for (Index j = reduced - m; j < reduced; ++j) {
            const Index t = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
            if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
                picked.push_back(t);
            } else {
                picked.push_back(j);
            }
        }
        std::sort(picked.begin(), picked.end());
        for (std::size_t i = 0; i < picked.size(); ++i) {
            picked[i] += static_cast<Index>(i) * (gap - 1);
        }
        // Only the degenerate-strip rule can still reject (possible when
        // gap == 2); redraw in that case.
        try {
            return validate_drop_set(picked, image_height);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateStrip) {
                throw;
            }
        }
    }
    throw Error(ErrorCode::Infeasible, "no valid drop set found in 10000 attempts for " +
                                           std::to_string(n_strips) + " strips on height " +
                                           std::to_string(image_height));
}

std::string format_drop_list(std::span<const Index> indices) {
    std::ostringstream out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << indices[i];
    }
    return out.str();
}

std::vector<Index> parse_drop_list(const std::string& line) {
    std::vector<Index> indices;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n')) {
        ++p;
    }
    while (end > p && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r' || end[-1] == '\n')) {
        --end;
    }
    if (p == end) {
        return indices;
    }
    while (p < end) {
        Index value = 0;
        const auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || next == p) {
            throw Error(ErrorCode::ParseError,
                        "bad drop list near \"" + std::string(p, end) + "\"");
        }
        indices.push_back(value);
        p = next;
        while (p < end && (*p == ' ' || *p == '\t')) {
            ++p;
        }
        if (p < end) {
            if (*p != ',') {
                throw Error(ErrorCode::ParseError,
                            "expected ',' in drop list near \"" + std::string(p, end) + "\"");
            }
            ++p;
            while (p < end && (*p == ' ' || *p == '\t')) {
                ++p;
            }
        }
    }
    return indices;
}

} // namespace emistrip
