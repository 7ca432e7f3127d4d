#pragma once

#include "emistrip/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace emistrip {

/// Comment metadata carried inside PGM/PPM headers. Lines of the form
/// `# emistrip:key=value` survive a save/load round trip; other comments are
/// ignored on load.
struct PnmMetadata {
    std::optional<CfaPattern> pattern;
    std::vector<Index> drops;
};

/// Binary PGM (P5). Samples above 255 use the 16-bit big-endian encoding.
/// The pattern and applied drop list ride along as emistrip comments.
RawImage load_raw_pgm(const std::filesystem::path& path);
void save_raw_pgm(const RawImage& image, const std::filesystem::path& path);

/// A PGM without a pattern comment needs the caller to supply one.
RawImage load_raw_pgm(const std::filesystem::path& path, std::optional<CfaPattern> fallback);

/// Binary PPM (P6), interleaved RGB.
RgbImage load_rgb_ppm(const std::filesystem::path& path);
void save_rgb_ppm(const RgbImage& image, const std::filesystem::path& path);

/// Stream flavors used by the file functions and the tests.
RawImage read_raw_pgm(std::istream& in, std::optional<CfaPattern> fallback = std::nullopt);
void write_raw_pgm(std::ostream& out, const RawImage& image);
RgbImage read_rgb_ppm(std::istream& in);
void write_rgb_ppm(std::ostream& out, const RgbImage& image);

} // namespace emistrip
