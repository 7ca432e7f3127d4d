#include "emistrip/rng.hpp"

#include <limits>

namespace emistrip {

std::uint64_t Rng::next_below(std::uint64_t bound) {
    // Reject draws from the tail partial block so every value is equally
    // likely. The loop terminates with probability 1; for small bounds it
    // almost never iterates.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw > limit);
    return draw % bound;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view image_id) {
    std::uint64_t hash = 14695981039346656037ull; // FNV-1a offset basis
    auto mix = [&hash](unsigned char byte) {
        hash ^= byte;
        hash *= 1099511628211ull;
    };
    for (int shift = 0; shift < 64; shift += 8) {
        mix(static_cast<unsigned char>(global_seed >> shift));
    }
    for (char c : image_id) {
        mix(static_cast<unsigned char>(c));
    }
    return hash;
}

} // namespace emistrip
