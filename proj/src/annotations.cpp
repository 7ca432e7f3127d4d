#include "emistrip/annotations.hpp"

#include "emistrip/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace emistrip {

using nlohmann::json;

bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.center_x == b.center_x && a.center_y == b.center_y && a.height == b.height &&
           a.width == b.width && a.class_id == b.class_id && a.score == b.score;
}

bool operator==(const ImageInfo& a, const ImageInfo& b) {
    return a.id == b.id && a.width == b.width && a.height == b.height &&
           a.file_name == b.file_name;
}

bool operator==(const AnnotationRecord& a, const AnnotationRecord& b) {
    return a.image_id == b.image_id && a.category_id == b.category_id && a.bbox == b.bbox &&
           a.score == b.score;
}

bool operator==(const AnnotationFile& a, const AnnotationFile& b) {
    return a.images == b.images && a.annotations == b.annotations;
}

BoundingBox box_from_top_left(const std::array<double, 4>& xywh, int class_id,
                              std::optional<double> score) {
    BoundingBox box;
    box.center_x = xywh[0] + (xywh[2] - 1.0) / 2.0;
    box.center_y = xywh[1] + (xywh[3] - 1.0) / 2.0;
    box.width = xywh[2];
    box.height = xywh[3];
    box.class_id = class_id;
    box.score = score;
    return box;
}

std::array<double, 4> box_to_top_left(const BoundingBox& box) {
    return {box.center_x - (box.width - 1.0) / 2.0, box.center_y - (box.height - 1.0) / 2.0,
            box.width, box.height};
}

std::optional<BoundingBox> shift_box(const BoundingBox& box, const DropSet& drops,
                                     const ShiftOptions& options) {
    const double top = box.center_y - (box.height - 1.0) / 2.0;
    const double bottom = box.center_y + (box.height - 1.0) / 2.0;

    Index n1 = 0;
    Index n2 = 0;
    for (const Index x : drops.indices) {
        const double row = static_cast<double>(x);
        const double limit = options.mode == ShiftMode::BeforeCenter ? box.center_y : top;
        if (row < limit) {
            ++n1;
        }
        if (row >= top && row <= bottom) {
            ++n2;
        }
    }

    BoundingBox shifted = box;
    shifted.center_y = box.center_y - static_cast<double>(n1);
    shifted.height = box.height - static_cast<double>(n2);
    if (shifted.height < options.min_height) {
        return std::nullopt;
    }
    return shifted;
}

AnnotationSet shift_annotation_set(const AnnotationSet& set, const DropSet& drops,
                                   const ShiftOptions& options, ShiftStats* stats) {
    if (set.height != drops.image_height) {
        throw Error(ErrorCode::DimensionMismatch,
                    "drop set is for height " + std::to_string(drops.image_height) +
                        ", annotation set has " + std::to_string(set.height));
    }
    AnnotationSet out;
    out.image_id = set.image_id;
    out.width = set.width;
    out.height = set.height;
    for (const BoundingBox& box : set.boxes) {
        const auto shifted = shift_box(box, drops, options);
        if (!shifted.has_value()) {
            if (stats != nullptr) {
                ++stats->removed;
            }
            continue;
        }
        if (stats != nullptr) {
            const double top = shifted->center_y - (shifted->height - 1.0) / 2.0;
            if (top < 0.0 || top + shifted->height > static_cast<double>(set.height)) {
                ++stats->out_of_bounds;
            }
        }
        out.boxes.push_back(*shifted);
    }
    return out;
}

namespace {

[[noreturn]] void record_error(const char* section, std::size_t index, const std::string& what) {
    throw Error(ErrorCode::ParseError,
                std::string(section) + "[" + std::to_string(index) + "]: " + what);
}

double number_field(const json& obj, const char* section, std::size_t index, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        record_error(section, index, std::string("missing or non-numeric '") + key + "'");
    }
    return it->get<double>();
}

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

} // namespace

AnnotationLoadResult load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }

    if (!doc.is_object() || !doc.contains("images") || !doc.contains("annotations") ||
        !doc["images"].is_array() || !doc["annotations"].is_array()) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ": expected object with 'images' and 'annotations' arrays");
    }

    AnnotationLoadResult result;
    std::map<std::int64_t, std::size_t> image_index;
    for (std::size_t i = 0; i < doc["images"].size(); ++i) {
        const json& rec = doc["images"][i];
        if (!rec.is_object()) {
            record_error("images", i, "not an object");
        }
        ImageInfo info;
        info.id = static_cast<std::int64_t>(number_field(rec, "images", i, "id"));
        info.width = static_cast<Index>(number_field(rec, "images", i, "width"));
        info.height = static_cast<Index>(number_field(rec, "images", i, "height"));
        if (info.width < 1 || info.height < 1) {
            record_error("images", i, "non-positive dimensions");
        }
        if (rec.contains("file_name")) {
            if (!rec["file_name"].is_string()) {
                record_error("images", i, "'file_name' is not a string");
            }
            info.file_name = rec["file_name"].get<std::string>();
        }
        if (!image_index.emplace(info.id, result.file.images.size()).second) {
            record_error("images", i, "duplicate id " + std::to_string(info.id));
        }
        result.file.images.push_back(std::move(info));
    }

    for (std::size_t i = 0; i < doc["annotations"].size(); ++i) {
        const json& rec = doc["annotations"][i];
        if (!rec.is_object()) {
            record_error("annotations", i, "not an object");
        }
        AnnotationRecord ann;
        ann.image_id = static_cast<std::int64_t>(number_field(rec, "annotations", i, "image_id"));
        ann.category_id = static_cast<int>(number_field(rec, "annotations", i, "category_id"));
        const auto bbox = rec.find("bbox");
        if (bbox == rec.end() || !bbox->is_array() || bbox->size() != 4) {
            record_error("annotations", i, "missing or malformed 'bbox' (need [x, y, w, h])");
        }
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(*bbox)[k].is_number()) {
                record_error("annotations", i, "non-numeric bbox entry");
            }
            ann.bbox[k] = (*bbox)[k].get<double>();
        }
        if (rec.contains("score")) {
            if (!rec["score"].is_number()) {
                record_error("annotations", i, "'score' is not a number");
            }
            ann.score = rec["score"].get<double>();
        }

        const auto owner = image_index.find(ann.image_id);
        if (owner == image_index.end()) {
            record_error("annotations", i, "unknown image_id " + std::to_string(ann.image_id));
        }
        const ImageInfo& img = result.file.images[owner->second];
        if (ann.bbox[2] < 1.0 || ann.bbox[3] < 1.0) {
            result.warnings.push_back("annotations[" + std::to_string(i) +
                                      "]: degenerate box size " + format_fixed(ann.bbox[2]) + "x" +
                                      format_fixed(ann.bbox[3]));
        } else if (ann.bbox[0] < 0.0 || ann.bbox[1] < 0.0 ||
                   ann.bbox[0] + ann.bbox[2] > static_cast<double>(img.width) ||
                   ann.bbox[1] + ann.bbox[3] > static_cast<double>(img.height)) {
            result.warnings.push_back("annotations[" + std::to_string(i) +
                                      "]: box outside image " + std::to_string(ann.image_id));
        }
        result.file.annotations.push_back(std::move(ann));
    }
    return result;
}

void save_annotations(const AnnotationFile& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << "{\n  \"images\": [";
    for (std::size_t i = 0; i < file.images.size(); ++i) {
        const ImageInfo& img = file.images[i];
        out << (i == 0 ? "\n" : ",\n");
        out << "    {\"id\": " << img.id << ", \"width\": " << img.width
            << ", \"height\": " << img.height << ", \"file_name\": " << json(img.file_name).dump()
            << "}";
    }
    out << "\n  ],\n  \"annotations\": [";
    for (std::size_t i = 0; i < file.annotations.size(); ++i) {
        const AnnotationRecord& ann = file.annotations[i];
        out << (i == 0 ? "\n" : ",\n");
        out << "    {\"image_id\": " << ann.image_id << ", \"category_id\": " << ann.category_id
            << ", \"bbox\": [" << format_fixed(ann.bbox[0]) << ", " << format_fixed(ann.bbox[1])
            << ", " << format_fixed(ann.bbox[2]) << ", " << format_fixed(ann.bbox[3]) << "]";
        if (ann.score.has_value()) {
            out << ", \"score\": " << format_fixed(*ann.score);
        }
        out << "}";
    }
    out << "\n  ]\n}\n";
    if (!out) {
        throw Error(ErrorCode::IoError, "failed writing " + path.string());
    }
}

std::vector<AnnotationSet> to_sets(const AnnotationFile& file) {
    std::vector<AnnotationSet> sets;
    std::map<std::int64_t, std::size_t> index;
    for (const ImageInfo& img : file.images) {
        AnnotationSet set;
        set.image_id = std::to_string(img.id);
        set.width = img.width;
        set.height = img.height;
        index.emplace(img.id, sets.size());
        sets.push_back(std::move(set));
    }
    for (const AnnotationRecord& ann : file.annotations) {
        const auto it = index.find(ann.image_id);
        if (it == index.end()) {
            throw Error(ErrorCode::ParseError,
                        "annotation references unknown image " + std::to_string(ann.image_id));
        }
        sets[it->second].boxes.push_back(box_from_top_left(ann.bbox, ann.category_id, ann.score));
    }
    return sets;
}

AnnotationFile from_sets(std::span<const AnnotationSet> sets) {
    AnnotationFile file;
    for (const AnnotationSet& set : sets) {
        ImageInfo info;
        const auto [_, ec] = std::from_chars(set.image_id.data(),
                                             set.image_id.data() + set.image_id.size(), info.id);
        if (ec != std::errc{}) {
            throw Error(ErrorCode::ParseError,
                        "image_id \"" + set.image_id + "\" is not numeric");
        }
        info.width = set.width;
        info.height = set.height;
        file.images.push_back(info);
        for (const BoundingBox& box : set.boxes) {
            AnnotationRecord ann;
            ann.image_id = info.id;
            ann.category_id = box.class_id;
            ann.bbox = box_to_top_left(box);
            ann.score = box.score;
            file.annotations.push_back(std::move(ann));
        }
    }
    return file;
}

AnnotationFile shift_annotation_file(const AnnotationFile& file, const DropSet& drops,
                                     const ShiftOptions& options, ShiftStats* stats) {
    AnnotationFile out;
    out.images = file.images;
    for (const ImageInfo& img : out.images) {
        if (img.height != drops.image_height) {
            throw Error(ErrorCode::DimensionMismatch,
                        "drop set is for height " + std::to_string(drops.image_height) +
                            ", image " + std::to_string(img.id) + " has " +
                            std::to_string(img.height));
        }
    }
    std::map<std::int64_t, const ImageInfo*> by_id;
    for (const ImageInfo& img : out.images) {
        by_id.emplace(img.id, &img);
    }
    for (const AnnotationRecord& ann : file.annotations) {
        const auto it = by_id.find(ann.image_id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::ParseError,
                        "annotation references unknown image " + std::to_string(ann.image_id));
        }
        const BoundingBox box = box_from_top_left(ann.bbox, ann.category_id, ann.score);
        const auto shifted = shift_box(box, drops, options);
        if (!shifted.has_value()) {
            if (stats != nullptr) {
                ++stats->removed;
            }
            continue;
        }
        AnnotationRecord moved = ann;
        moved.bbox = box_to_top_left(*shifted);
        if (stats != nullptr) {
            if (moved.bbox[1] < 0.0 ||
                moved.bbox[1] + moved.bbox[3] > static_cast<double>(it->second->height)) {
                ++stats->out_of_bounds;
            }
        }
        out.annotations.push_back(std::move(moved));
    }
    return out;
}

} // namespace emistrip
