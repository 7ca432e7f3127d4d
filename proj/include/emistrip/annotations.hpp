#pragma once

#include "emistrip/drops.hpp"
#include "emistrip/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emistrip {

/// Axis-aligned box in center convention. Continuous coordinates; a box
/// spans [center - extent/2, center + extent/2] on each axis.
struct BoundingBox {
    double center_x = 0.0;
    double center_y = 0.0;
    double height = 0.0;
    double width = 0.0;
    int class_id = 0;
    std::optional<double> score;
};

bool operator==(const BoundingBox& a, const BoundingBox& b);

/// Boxes for one image. Detection sets are the same shape with scores set.
struct AnnotationSet {
    std::string image_id;
    Index width = 0;
    Index height = 0;
    std::vector<BoundingBox> boxes;
};

using DetectionSet = AnnotationSet;

/// Top-left (x, y, w, h) <-> center conversion; exact on the half-pixel grid.
BoundingBox box_from_top_left(const std::array<double, 4>& xywh, int class_id,
                              std::optional<double> score = std::nullopt);
std::array<double, 4> box_to_top_left(const BoundingBox& box);

/// Which drop rows count toward the vertical translation n1.
enum class ShiftMode : std::uint8_t {
    /// n1 counts drops with x < center_y (the literal rule).
    BeforeCenter,
    /// n1 counts drops above the box top edge.
    AboveTop,
};

struct ShiftOptions {
    double min_height = 2.0;
    ShiftMode mode = ShiftMode::BeforeCenter;
};

/// Move a box to match the attacked image: center_y -= n1, height -= n2,
/// where n1 counts drops lost before the center and n2 counts drops inside
/// [top, bottom], all in original-image coordinates. Returns nullopt when
/// the shrunken height falls below min_height.
std::optional<BoundingBox> shift_box(const BoundingBox& box, const DropSet& drops,
                                     const ShiftOptions& options = {});

struct ShiftStats {
    Index removed = 0;
    Index out_of_bounds = 0;
};

AnnotationSet shift_annotation_set(const AnnotationSet& set, const DropSet& drops,
                                   const ShiftOptions& options = {},
                                   ShiftStats* stats = nullptr);

/// File-level model mirroring the JSON schema:
/// {"images":[{"id","width","height","file_name"}],
///  "annotations":[{"image_id","category_id","bbox":[x,y,w,h],"score"?}]}
struct ImageInfo {
    std::int64_t id = 0;
    Index width = 0;
    Index height = 0;
    std::string file_name;
};

struct AnnotationRecord {
    std::int64_t image_id = 0;
    int category_id = 0;
    std::array<double, 4> bbox{}; // top-left x, y, w, h
    std::optional<double> score;
};

struct AnnotationFile {
    std::vector<ImageInfo> images;
    std::vector<AnnotationRecord> annotations;
};

bool operator==(const ImageInfo& a, const ImageInfo& b);
bool operator==(const AnnotationRecord& a, const AnnotationRecord& b);
bool operator==(const AnnotationFile& a, const AnnotationFile& b);

struct AnnotationLoadResult {
    AnnotationFile file;
    /// Per-record diagnostics for recoverable issues (out-of-bounds boxes).
    std::vector<std::string> warnings;
};

/// Parse failures and missing fields throw with the record index; boxes that
/// stick out of their image only produce warnings.
AnnotationLoadResult load_annotations(const std::filesystem::path& path);

/// Deterministic output: fixed key order, floats with 6 decimal places.
void save_annotations(const AnnotationFile& file, const std::filesystem::path& path);

/// Per-image center-convention sets, in file image order.
std::vector<AnnotationSet> to_sets(const AnnotationFile& file);

/// Rebuild a file from per-image sets (inverse of to_sets for intact ids).
AnnotationFile from_sets(std::span<const AnnotationSet> sets);

/// Shift every annotation in the file by one drop set. All images must have
/// height == drops.image_height.
AnnotationFile shift_annotation_file(const AnnotationFile& file, const DropSet& drops,
                                     const ShiftOptions& options = {},
                                     ShiftStats* stats = nullptr);

} // namespace emistrip
