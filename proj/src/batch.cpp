#include "emistrip/batch.hpp"

#include "emistrip/cfa.hpp"
#include "emistrip/error.hpp"
#include "emistrip/metrics.hpp"
#include "emistrip/pnm.hpp"
#include "emistrip/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>

namespace emistrip {

std::vector<Index> BatchConfig::default_sweep() {
    std::vector<Index> sweep(20);
    std::iota(sweep.begin(), sweep.end(), Index{1});
    return sweep;
}

BatchConfig load_batch_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }

    BatchConfig config;
    try {
        if (doc.contains("input_dir")) config.input_dir = doc["input_dir"].get<std::string>();
        if (doc.contains("output_dir")) config.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("pattern")) {
            config.pattern = parse_cfa_pattern(doc["pattern"].get<std::string>());
        }
        if (doc.contains("sweep")) config.sweep = doc["sweep"].get<std::vector<Index>>();
        if (doc.contains("padding")) {
            config.padding = parse_padding_kind(doc["padding"].get<std::string>());
        }
        if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("parallelism")) config.parallelism = doc["parallelism"].get<int>();
        if (doc.contains("report_formats")) {
            config.report_formats = doc["report_formats"].get<std::vector<std::string>>();
        }
        if (doc.contains("annotations")) {
            config.annotations = std::filesystem::path(doc["annotations"].get<std::string>());
        }
        if (doc.contains("force")) config.force = doc["force"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return config;
}

void validate_batch_config(const BatchConfig& config) {
    if (config.input_dir.empty() || config.output_dir.empty()) {
        throw Error(ErrorCode::InvalidArgument, "batch needs input_dir and output_dir");
    }
    if (config.sweep.empty()) {
        throw Error(ErrorCode::InvalidArgument, "batch sweep is empty");
    }
    for (const Index n : config.sweep) {
        if (n < 0) {
            throw Error(ErrorCode::InvalidArgument, "sweep strip counts must be >= 0");
        }
    }
    if (config.parallelism < 1) {
        throw Error(ErrorCode::InvalidArgument, "parallelism must be >= 1");
    }
    for (const std::string& format : config.report_formats) {
        if (format != "csv" && format != "json") {
            throw Error(ErrorCode::InvalidArgument, "unknown report format \"" + format + "\"");
        }
    }
    if (config.padding == PaddingKind::NextFrame) {
        throw Error(ErrorCode::InvalidArgument,
                    "next_frame padding needs a companion frame and is not available in batch");
    }
}

namespace {

struct UnitOutcome {
    bool produced = false;
    bool skipped = false;
    EvalRow row;
    DropSet drops;
    std::optional<BatchFailure> failure;
};

struct ImageOutcome {
    std::vector<UnitOutcome> units; // one per sweep entry
    std::optional<BatchFailure> image_failure;
};

std::string sweep_dir_name(Index n) {
    return "strips_" + std::to_string(n);
}

void process_image(const BatchConfig& config, const std::string& image_id,
                   const std::filesystem::path& input_path, ImageOutcome& outcome) {
    RawImage clean;
    RgbImage clean_rgb;
    try {
        clean = load_raw_pgm(input_path, config.pattern);
        clean_rgb = demosaic(clean);
    } catch (const Error& e) {
        outcome.image_failure = BatchFailure{image_id, -1, e.what()};
        return;
    }

    const std::uint64_t image_seed = derive_seed(config.seed, image_id);
    outcome.units.resize(config.sweep.size());
    for (std::size_t i = 0; i < config.sweep.size(); ++i) {
        const Index n = config.sweep[i];
        UnitOutcome& unit = outcome.units[i];
        const auto dir = config.output_dir / sweep_dir_name(n);
        const auto image_path = dir / (image_id + ".pgm");
        const auto sidecar_path = dir / (image_id + ".json");
        try {
            const std::uint64_t seed = derive_seed(image_seed, sweep_dir_name(n));
            RawImage attacked;
            if (!config.force && std::filesystem::exists(image_path) &&
                std::filesystem::exists(sidecar_path)) {
                attacked = load_raw_pgm(image_path, clean.pattern);
                unit.drops = load_sidecar(sidecar_path).drops;
                unit.skipped = true;
            } else {
                unit.drops = sample_drop_set(n, clean.height(), seed);
                Padding pad;
                pad.kind = config.padding;
                attacked = apply_attack(clean, unit.drops, pad);

                AttackSidecar sidecar;
                sidecar.drops = unit.drops;
                sidecar.strips =
                    strips_from_positions(strip_positions(unit.drops), clean.height());
                sidecar.pattern = clean.pattern;
                sidecar.padding = padding_kind_name(config.padding);
                sidecar.seed = seed;
                std::filesystem::create_directories(dir);
                save_raw_pgm(attacked, image_path);
                save_sidecar(sidecar, sidecar_path);
            }

            unit.row.image_id = image_id;
            unit.row.strip_count = n;
            unit.row.ssim_raw = ssim(clean, attacked);
            unit.row.ssim_rgb = ssim(clean_rgb, demosaic(attacked));
            unit.produced = true;
        } catch (const Error& e) {
            unit.failure = BatchFailure{image_id, n, e.what()};
        }
    }
}

void shift_annotations(const BatchConfig& config, const std::vector<std::string>& image_ids,
                       const std::vector<ImageOutcome>& outcomes, BatchResult& result) {
    const AnnotationFile file = load_annotations(*config.annotations).file;

    std::map<std::string, std::size_t> id_to_index;
    for (std::size_t i = 0; i < image_ids.size(); ++i) {
        id_to_index.emplace(image_ids[i], i);
    }
    // Annotation images are matched to inputs by file_name stem, falling
    // back to the numeric id.
    std::map<std::int64_t, std::size_t> ann_image_to_input;
    for (const ImageInfo& info : file.images) {
        std::string key = std::filesystem::path(info.file_name).stem().string();
        if (key.empty()) {
            key = std::to_string(info.id);
        }
        const auto it = id_to_index.find(key);
        if (it == id_to_index.end()) {
            result.failures.push_back(
                {key, -1, "annotation image has no matching input image"});
            continue;
        }
        ann_image_to_input.emplace(info.id, it->second);
    }

    for (std::size_t i = 0; i < config.sweep.size(); ++i) {
        AnnotationFile shifted;
        shifted.images = file.images;
        bool ok = true;
        for (const AnnotationRecord& ann : file.annotations) {
            const auto owner = ann_image_to_input.find(ann.image_id);
            if (owner == ann_image_to_input.end()) {
                continue;
            }
            const ImageOutcome& outcome = outcomes[owner->second];
            if (outcome.units.size() <= i || !outcome.units[i].produced) {
                ok = false;
                continue;
            }
            const BoundingBox box = box_from_top_left(ann.bbox, ann.category_id, ann.score);
            const auto moved = shift_box(box, outcome.units[i].drops);
            if (!moved.has_value()) {
                continue;
            }
            AnnotationRecord out = ann;
            out.bbox = box_to_top_left(*moved);
            shifted.annotations.push_back(std::move(out));
        }
        if (ok) {
            const auto dir = config.output_dir / sweep_dir_name(config.sweep[i]);
            std::filesystem::create_directories(dir);
            save_annotations(shifted, dir / "annotations.json");
        }
    }
}

} // namespace

BatchResult run_batch(const BatchConfig& config) {
    validate_batch_config(config);
    if (!std::filesystem::is_directory(config.input_dir)) {
        throw Error(ErrorCode::IoError, "input directory " + config.input_dir.string() +
                                            " does not exist");
    }

    std::vector<std::string> image_ids;
    std::vector<std::filesystem::path> inputs;
    for (const auto& entry : std::filesystem::directory_iterator(config.input_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            inputs.push_back(entry.path());
        }
    }
    // Directory enumeration order is platform noise; results are keyed and
    // ordered by image id.
    std::sort(inputs.begin(), inputs.end());
    for (const auto& path : inputs) {
        image_ids.push_back(path.stem().string());
    }
    if (inputs.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "no .pgm inputs in " + config.input_dir.string());
    }

    std::filesystem::create_directories(config.output_dir);

    std::vector<ImageOutcome> outcomes(inputs.size());
    const int workers =
        std::min<int>(config.parallelism, static_cast<int>(inputs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            process_image(config, image_ids[i], inputs[i], outcomes[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < inputs.size();
                     i = next.fetch_add(1)) {
                    process_image(config, image_ids[i], inputs[i], outcomes[i]);
                }
            });
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    BatchResult result;
    std::vector<EvalRow> rows;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const ImageOutcome& outcome = outcomes[i];
        if (outcome.image_failure.has_value()) {
            result.failures.push_back(*outcome.image_failure);
            continue;
        }
        for (const UnitOutcome& unit : outcome.units) {
            if (unit.failure.has_value()) {
                result.failures.push_back(*unit.failure);
                continue;
            }
            rows.push_back(unit.row);
            if (unit.skipped) {
                ++result.skipped;
            } else {
                ++result.generated;
            }
        }
    }

    if (config.annotations.has_value()) {
        shift_annotations(config, image_ids, outcomes, result);
    }

    result.report = build_report(std::move(rows));
    for (const std::string& format : config.report_formats) {
        if (format == "csv") {
            write_report_csv(result.report, config.output_dir);
        } else {
            write_report_json(result.report, config.output_dir / "report.json");
        }
    }
    return result;
}

} // namespace emistrip
