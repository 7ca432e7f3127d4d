#include "emistrip/pnm.hpp"

#include "emistrip/drops.hpp"
#include "emistrip/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace emistrip {

namespace {

constexpr Index kMaxDimension = 1 << 20;

bool is_pnm_space(int c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

/// Collects `# emistrip:key=value` comments while skipping ordinary ones.
void handle_comment(std::istream& in, PnmMetadata& meta) {
    std::string line;
    std::getline(in, line);
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) {
        ++start;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const std::string_view body{line.data() + start, line.size() - start};
    constexpr std::string_view pattern_key = "emistrip:pattern=";
    constexpr std::string_view drops_key = "emistrip:drops=";
    if (body.starts_with(pattern_key)) {
        meta.pattern = parse_cfa_pattern(std::string(body.substr(pattern_key.size())));
    } else if (body.starts_with(drops_key)) {
        meta.drops = parse_drop_list(std::string(body.substr(drops_key.size())));
    }
}

/// Next whitespace-delimited header token, comments stripped.
std::string next_token(std::istream& in, PnmMetadata& meta) {
    int c = in.get();
    while (c != EOF && (is_pnm_space(c) || c == '#')) {
        if (c == '#') {
            handle_comment(in, meta);
        }
        c = in.get();
    }
    if (c == EOF) {
        throw Error(ErrorCode::ParseError, "unexpected end of file in PNM header");
    }
    std::string token;
    while (c != EOF && !is_pnm_space(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') {
        in.unget();
    }
    return token;
}

Index parse_dimension(const std::string& token, const char* what) {
    std::size_t pos = 0;
    long long value = 0;
    try {
        value = std::stoll(token, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != token.size() || value < 1 || value > kMaxDimension) {
        throw Error(ErrorCode::ParseError,
                    std::string("bad PNM ") + what + " \"" + token + "\"");
    }
    return static_cast<Index>(value);
}

struct PnmHeader {
    Index width = 0;
    Index height = 0;
    std::uint16_t max_value = 0;
    PnmMetadata meta;
};

PnmHeader read_header(std::istream& in, const char* magic) {
    PnmHeader header;
    const std::string found = next_token(in, header.meta);
    if (found != magic) {
        throw Error(ErrorCode::ParseError,
                    std::string("expected ") + magic + " file, found magic \"" + found + "\"");
    }
    header.width = parse_dimension(next_token(in, header.meta), "width");
    header.height = parse_dimension(next_token(in, header.meta), "height");
    const Index maxval = parse_dimension(next_token(in, header.meta), "maxval");
    if (maxval > 65535) {
        throw Error(ErrorCode::ParseError, "PNM maxval " + std::to_string(maxval) + " exceeds 65535");
    }
    header.max_value = static_cast<std::uint16_t>(maxval);
    // The single whitespace byte separating header from raster was already
    // consumed as the token terminator.
    return header;
}

std::vector<unsigned char> read_raster(std::istream& in, std::size_t bytes) {
    std::vector<unsigned char> data(bytes);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes) {
        throw Error(ErrorCode::ParseError, "PNM raster truncated");
    }
    return data;
}

void fill_plane(SamplePlane& plane, const unsigned char* data, bool wide, std::size_t stride,
                std::size_t offset) {
    for (Index r = 0; r < plane.rows(); ++r) {
        for (Index c = 0; c < plane.cols(); ++c) {
            const std::size_t i =
                (static_cast<std::size_t>(r) * static_cast<std::size_t>(plane.cols()) +
                 static_cast<std::size_t>(c)) *
                    stride +
                offset;
            plane(r, c) = wide ? static_cast<std::uint16_t>(data[2 * i] << 8 | data[2 * i + 1])
                               : data[i];
        }
    }
}

void write_samples(std::ostream& out, const SamplePlane& plane, bool wide) {
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<std::size_t>(plane.size()) * (wide ? 2 : 1));
    for (Index r = 0; r < plane.rows(); ++r) {
        for (Index c = 0; c < plane.cols(); ++c) {
            const std::uint16_t v = plane(r, c);
            if (wide) {
                buf.push_back(static_cast<unsigned char>(v >> 8));
            }
            buf.push_back(static_cast<unsigned char>(v & 0xff));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void check_range(const SamplePlane& plane, std::uint16_t max_value) {
    if ((plane > max_value).any()) {
        throw Error(ErrorCode::ParseError,
                    "PNM sample exceeds declared maxval " + std::to_string(max_value));
    }
}

} // namespace

RawImage read_raw_pgm(std::istream& in, std::optional<CfaPattern> fallback) {
    const PnmHeader header = read_header(in, "P5");
    const bool wide = header.max_value > 255;
    const std::size_t pixels =
        static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height);
    const auto data = read_raster(in, pixels * (wide ? 2 : 1));

    RawImage raw;
    raw.max_value = header.max_value;
    raw.samples.resize(header.height, header.width);
    fill_plane(raw.samples, data.data(), wide, 1, 0);
    check_range(raw.samples, raw.max_value);

    if (header.meta.pattern.has_value()) {
        raw.pattern = *header.meta.pattern;
    } else if (fallback.has_value()) {
        raw.pattern = *fallback;
    } else {
        throw Error(ErrorCode::ParseError,
                    "PGM carries no emistrip:pattern comment and no pattern was supplied");
    }
    raw.applied_drops = header.meta.drops;
    validate_raw(raw);
    return raw;
}

void write_raw_pgm(std::ostream& out, const RawImage& image) {
    validate_raw(image);
    out << "P5\n";
    out << "# emistrip:pattern=" << cfa_pattern_name(image.pattern) << "\n";
    if (!image.applied_drops.empty()) {
        out << "# emistrip:drops=" << format_drop_list(image.applied_drops) << "\n";
    }
    out << image.width() << " " << image.height() << "\n" << image.max_value << "\n";
    write_samples(out, image.samples, image.max_value > 255);
}

RgbImage read_rgb_ppm(std::istream& in) {
    const PnmHeader header = read_header(in, "P6");
    const bool wide = header.max_value > 255;
    const std::size_t pixels =
        static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height);
    const auto data = read_raster(in, pixels * 3 * (wide ? 2 : 1));

    RgbImage rgb;
    rgb.max_value = header.max_value;
    for (std::size_t p = 0; p < 3; ++p) {
        rgb.planes[p].resize(header.height, header.width);
        fill_plane(rgb.planes[p], data.data(), wide, 3, p);
        check_range(rgb.planes[p], rgb.max_value);
    }
    validate_rgb(rgb);
    return rgb;
}

void write_rgb_ppm(std::ostream& out, const RgbImage& image) {
    validate_rgb(image);
    out << "P6\n" << image.width() << " " << image.height() << "\n" << image.max_value << "\n";
    const bool wide = image.max_value > 255;
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height()) *
                3 * (wide ? 2 : 1));
    for (Index r = 0; r < image.height(); ++r) {
        for (Index c = 0; c < image.width(); ++c) {
            for (std::size_t p = 0; p < 3; ++p) {
                const std::uint16_t v = image.planes[p](r, c);
                if (wide) {
                    buf.push_back(static_cast<unsigned char>(v >> 8));
                }
                buf.push_back(static_cast<unsigned char>(v & 0xff));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    return out;
}

} // namespace

RawImage load_raw_pgm(const std::filesystem::path& path) {
    return load_raw_pgm(path, std::nullopt);
}

RawImage load_raw_pgm(const std::filesystem::path& path, std::optional<CfaPattern> fallback) {
    auto in = open_input(path);
    try {
        return read_raw_pgm(in, fallback);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_raw_pgm(const RawImage& image, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_raw_pgm(out, image);
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

RgbImage load_rgb_ppm(const std::filesystem::path& path) {
    auto in = open_input(path);
    try {
        return read_rgb_ppm(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void save_rgb_ppm(const RgbImage& image, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_rgb_ppm(out, image);
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

} // namespace emistrip
