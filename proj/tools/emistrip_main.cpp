#include "emistrip/attack.hpp"
#include "emistrip/batch.hpp"
#include "emistrip/cfa.hpp"
#include "emistrip/drops.hpp"
#include "emistrip/error.hpp"
#include "emistrip/identify.hpp"
#include "emistrip/metrics.hpp"
#include "emistrip/pnm.hpp"
#include "emistrip/report.hpp"
#include "emistrip/rng.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace emistrip;
namespace fs = std::filesystem;

std::uint64_t seed_or_env(const CLI::Option* opt, std::uint64_t value) {
    if (opt->count() > 0) {
        return value;
    }
    const char* env = std::getenv("EMISTRIP_SEED");
    if (env == nullptr || *env == '\0') {
        return value;
    }
    std::uint64_t parsed = 0;
    const char* end = env + std::string_view(env).size();
    const auto [p, ec] = std::from_chars(env, end, parsed);
    if (ec != std::errc{} || p != end) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("EMISTRIP_SEED is not an unsigned integer: \"") + env + "\"");
    }
    return parsed;
}

fs::path sidecar_default(const fs::path& output) {
    fs::path path = output;
    path.replace_extension(".json");
    return path;
}

// ---------------------------------------------------------------------------
// mosaic / demosaic
// ---------------------------------------------------------------------------

struct ConvertArgs {
    std::string input;
    std::string output;
    std::string pattern = "GRBG";
    bool pattern_given = false;
};

void run_mosaic(const ConvertArgs& args) {
    const RgbImage rgb = load_rgb_ppm(args.input);
    RawImage raw = mosaic(rgb, parse_cfa_pattern(args.pattern));
    save_raw_pgm(raw, args.output);
}

void run_demosaic(const ConvertArgs& args) {
    std::optional<CfaPattern> fallback;
    if (args.pattern_given) {
        fallback = parse_cfa_pattern(args.pattern);
    }
    const RawImage raw = load_raw_pgm(args.input, fallback);
    save_rgb_ppm(demosaic(raw), args.output);
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

struct AttackArgs {
    std::string input;
    std::string output;
    std::string sidecar;
    std::string drops;
    Index strips = -1;
    std::uint64_t seed = 0;
    const CLI::Option* seed_opt = nullptr;
    std::string padding = "wrap_top";
    std::string next_frame;
    std::string pattern = "GRBG";
    Index min_gap = 3;
};

Padding make_padding(const std::string& kind_name, const std::string& next_frame_path,
                     std::optional<CfaPattern> fallback) {
    Padding pad;
    pad.kind = parse_padding_kind(kind_name);
    if (pad.kind == PaddingKind::NextFrame) {
        if (next_frame_path.empty()) {
            throw Error(ErrorCode::InvalidArgument, "--padding next_frame needs --next-frame");
        }
        pad.companion = load_raw_pgm(next_frame_path, fallback);
    }
    return pad;
}

void run_attack(const AttackArgs& args) {
    if ((args.strips >= 0) == !args.drops.empty()) {
        throw Error(ErrorCode::InvalidArgument, "give exactly one of --drops or --strips");
    }

    const bool rgb_mode = fs::path(args.input).extension() == ".ppm";
    const CfaPattern pattern = parse_cfa_pattern(args.pattern);

    AttackSidecar sidecar;
    sidecar.padding = args.padding;

    auto choose_drops = [&](Index height) {
        if (!args.drops.empty()) {
            return validate_drop_set(parse_drop_list(args.drops), height);
        }
        const std::uint64_t seed = seed_or_env(args.seed_opt, args.seed);
        sidecar.seed = seed;
        return sample_drop_set(args.strips, height, seed, args.min_gap);
    };

    if (rgb_mode) {
        const RgbImage rgb = load_rgb_ppm(args.input);
        const DropSet drops = choose_drops(rgb.height());
        const Padding pad = make_padding(args.padding, args.next_frame, pattern);
        save_rgb_ppm(simulate_attacked_rgb(rgb, pattern, drops, pad), args.output);
        sidecar.drops = drops;
        sidecar.pattern = pattern;
    } else {
        const RawImage raw = load_raw_pgm(args.input, pattern);
        const DropSet drops = choose_drops(raw.height());
        const Padding pad = make_padding(args.padding, args.next_frame, raw.pattern);
        save_raw_pgm(apply_attack(raw, drops, pad), args.output);
        sidecar.drops = drops;
        sidecar.pattern = raw.pattern;
    }

    sidecar.strips =
        strips_from_positions(strip_positions(sidecar.drops), sidecar.drops.image_height);
    const fs::path sidecar_path =
        args.sidecar.empty() ? sidecar_default(args.output) : fs::path(args.sidecar);
    save_sidecar(sidecar, sidecar_path);
    std::cout << "wrote " << args.output << " (" << sidecar.drops.count() << " dropped rows, "
              << sidecar.strips.count() << " strips)\n";
}

// ---------------------------------------------------------------------------
// detect
// ---------------------------------------------------------------------------

struct DetectArgs {
    std::string clean;
    std::string attacked;
    std::string output;
    std::string profile;
    std::string policy = "midpoint";
    double noise_floor = 0.02;
    std::string pattern;
};

void run_detect(const DetectArgs& args) {
    std::optional<CfaPattern> fallback;
    if (!args.pattern.empty()) {
        fallback = parse_cfa_pattern(args.pattern);
    }
    const RawImage clean = load_raw_pgm(args.clean, fallback);
    const RawImage attacked = load_raw_pgm(args.attacked, clean.pattern);

    EdgeDetectionOptions options;
    options.noise_floor = args.noise_floor;
    if (args.policy == "midpoint") {
        options.policy = ThresholdPolicy::Midpoint;
    } else if (args.policy == "two_means") {
        options.policy = ThresholdPolicy::TwoMeans;
    } else {
        throw Error(ErrorCode::InvalidArgument,
                    "--policy must be midpoint or two_means, got \"" + args.policy + "\"");
    }

    if (!args.profile.empty()) {
        const RowDifferenceProfile profile = row_difference_profile(clean, attacked);
        std::ofstream out(args.profile, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + args.profile);
        }
        write_profile_csv(out, profile);
    }

    const DropSet drops = identify_dropped_rows(clean, attacked, options);
    const std::string line = format_drop_list(drops.indices);
    if (!args.output.empty()) {
        std::ofstream out(args.output, std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + args.output);
        }
        out << line << "\n";
    }
    std::cout << line << "\n";
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string clean;
    std::string attacked;
    std::string truth;
    std::string detections;
    std::string ttest_a;
    std::string ttest_b;
    std::string out_dir = ".";
};

struct LongRow {
    std::string image_id;
    std::string metric;
    std::string variant;
    double value = 0.0;
};

std::vector<std::pair<std::string, fs::path>> list_pgms(const fs::path& path) {
    std::vector<std::pair<std::string, fs::path>> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
                files.emplace_back(entry.path().stem().string(), entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.emplace_back(path.stem().string(), path);
    }
    return files;
}

std::vector<double> load_sample_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc{} || p != token.data() + token.size()) {
            throw Error(ErrorCode::ParseError,
                        path.string() + ": bad sample value \"" + token + "\"");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        throw Error(ErrorCode::ParseError, path.string() + ": no sample values");
    }
    return values;
}

/// Key annotation-file images by file-name stem (numeric id when absent) so
/// they can be matched to image files evaluated alongside.
std::map<std::string, std::size_t> set_index_by_stem(const AnnotationFile& file) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < file.images.size(); ++i) {
        std::string key = fs::path(file.images[i].file_name).stem().string();
        if (key.empty()) {
            key = std::to_string(file.images[i].id);
        }
        index.emplace(std::move(key), i);
    }
    return index;
}

void run_eval(const EvalArgs& args) {
    const bool image_mode = !args.clean.empty() || !args.attacked.empty();
    const bool map_mode = !args.truth.empty() || !args.detections.empty();
    const bool ttest_mode = !args.ttest_a.empty() || !args.ttest_b.empty();
    if (image_mode && (args.clean.empty() || args.attacked.empty())) {
        throw Error(ErrorCode::InvalidArgument, "image mode needs both --clean and --attacked");
    }
    if (map_mode && (args.truth.empty() || args.detections.empty())) {
        throw Error(ErrorCode::InvalidArgument, "mAP mode needs both --truth and --detections");
    }
    if (ttest_mode && (args.ttest_a.empty() || args.ttest_b.empty())) {
        throw Error(ErrorCode::InvalidArgument, "t-test mode needs both --ttest-a and --ttest-b");
    }
    if (!image_mode && !map_mode && !ttest_mode) {
        throw Error(ErrorCode::InvalidArgument,
                    "nothing to evaluate; give image pairs, annotation files, or sample lists");
    }

    fs::create_directories(args.out_dir);
    std::vector<LongRow> long_rows;
    std::vector<EvalRow> wide_rows;

    if (image_mode) {
        const auto clean_files = list_pgms(args.clean);
        const auto attacked_files = list_pgms(args.attacked);
        std::map<std::string, fs::path> attacked_by_id(attacked_files.begin(),
                                                       attacked_files.end());
        for (const auto& [id, clean_path] : clean_files) {
            const auto it = attacked_by_id.find(id);
            if (it == attacked_by_id.end()) {
                throw Error(ErrorCode::InvalidArgument,
                            "no attacked counterpart for image \"" + id + "\"");
            }
            const RawImage clean = load_raw_pgm(clean_path, CfaPattern::GRBG);
            const RawImage attacked = load_raw_pgm(it->second, clean.pattern);
            EvalRow row;
            row.image_id = id;
            row.strip_count = strip_count(static_cast<Index>(attacked.applied_drops.size()));
            row.ssim_raw = ssim(clean, attacked);
            row.ssim_rgb = ssim(demosaic(clean), demosaic(attacked));
            long_rows.push_back({id, "ssim", "raw", row.ssim_raw});
            long_rows.push_back({id, "ssim", "rgb", row.ssim_rgb});
            wide_rows.push_back(std::move(row));
        }
    }

    if (map_mode) {
        const AnnotationFile truth_file = load_annotations(args.truth).file;
        const AnnotationFile det_file = load_annotations(args.detections).file;
        const std::vector<AnnotationSet> truth_sets = to_sets(truth_file);
        const std::vector<AnnotationSet> det_sets = to_sets(det_file);
        std::map<std::string, std::size_t> det_index = set_index_by_stem(det_file);
        const std::map<std::string, std::size_t> truth_index = set_index_by_stem(truth_file);

        std::vector<AnnotationSet> dets_aligned;
        std::vector<std::string> stems;
        for (const auto& [stem, truth_pos] : truth_index) {
            stems.push_back(stem);
            const auto it = det_index.find(stem);
            if (it != det_index.end()) {
                dets_aligned.push_back(det_sets[it->second]);
            } else {
                AnnotationSet empty = truth_sets[truth_pos];
                empty.boxes.clear();
                dets_aligned.push_back(std::move(empty));
            }
        }
        std::vector<AnnotationSet> truth_aligned;
        for (const std::string& stem : stems) {
            truth_aligned.push_back(truth_sets[truth_index.at(stem)]);
        }

        std::map<std::string, std::array<double, 3>> per_image;
        for (std::size_t i = 0; i < stems.size(); ++i) {
            const std::span<const AnnotationSet> t{&truth_aligned[i], 1};
            const std::span<const AnnotationSet> d{&dets_aligned[i], 1};
            if (truth_aligned[i].boxes.empty()) {
                continue; // AP has no definition without ground truth
            }
            const double m50 = mean_ap(t, d, MapVariant::Map50);
            const double m75 = mean_ap(t, d, MapVariant::Map75);
            const double m5095 = mean_ap(t, d, MapVariant::Map50To95);
            per_image.emplace(stems[i], std::array{m50, m75, m5095});
            long_rows.push_back({stems[i], "map", "50", m50});
            long_rows.push_back({stems[i], "map", "75", m75});
            long_rows.push_back({stems[i], "map", "50_95", m5095});
        }
        const double all50 = mean_ap(truth_aligned, dets_aligned, MapVariant::Map50);
        const double all75 = mean_ap(truth_aligned, dets_aligned, MapVariant::Map75);
        const double all5095 = mean_ap(truth_aligned, dets_aligned, MapVariant::Map50To95);
        long_rows.push_back({"all", "map", "50", all50});
        long_rows.push_back({"all", "map", "75", all75});
        long_rows.push_back({"all", "map", "50_95", all5095});
        std::cout << "mAP50 " << format_double(all50) << ", mAP75 " << format_double(all75)
                  << ", mAP50:95 " << format_double(all5095) << "\n";

        for (EvalRow& row : wide_rows) {
            const auto it = per_image.find(row.image_id);
            if (it != per_image.end()) {
                row.map50 = it->second[0];
                row.map75 = it->second[1];
                row.map50_95 = it->second[2];
            }
        }
    }

    {
        std::ofstream out(fs::path(args.out_dir) / "metrics.csv", std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write metrics.csv");
        }
        out << "image_id,metric,variant,value\n";
        for (const LongRow& row : long_rows) {
            out << csv_escape(row.image_id) << ',' << row.metric << ',' << row.variant << ','
                << format_double(row.value) << '\n';
        }
    }
    {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const LongRow& row : long_rows) {
            nlohmann::ordered_json rec;
            rec["image_id"] = row.image_id;
            rec["metric"] = row.metric;
            rec["variant"] = row.variant;
            rec["value"] = row.value;
            doc.push_back(std::move(rec));
        }
        std::ofstream out(fs::path(args.out_dir) / "metrics.json", std::ios::binary);
        out << doc.dump(2) << "\n";
    }

    if (!wide_rows.empty()) {
        write_report_csv(build_report(std::move(wide_rows)), args.out_dir);
    }

    if (ttest_mode) {
        const std::vector<double> a = load_sample_file(args.ttest_a);
        const std::vector<double> b = load_sample_file(args.ttest_b);
        const TTestResult result = welch_t_test(a, b);
        std::cout << "t " << format_double(result.t_statistic) << ", df "
                  << format_double(result.degrees_of_freedom) << ", p "
                  << format_double(result.p_value) << "\n";
        std::ofstream out(fs::path(args.out_dir) / "ttest.csv", std::ios::binary);
        out << "metric,strips_a,strips_b,t_statistic,degrees_of_freedom,p_value,note\n";
        out << "samples,0,0," << format_double(result.t_statistic) << ','
            << format_double(result.degrees_of_freedom) << ',' << format_double(result.p_value)
            << ",\n";
    }
}

// ---------------------------------------------------------------------------
// shift-ann
// ---------------------------------------------------------------------------

struct ShiftArgs {
    std::string annotations;
    std::string output;
    std::string drops;
    Index height = 0;
    std::string sidecar;
    double min_height = 2.0;
    bool above_top = false;
};

void run_shift(const ShiftArgs& args) {
    DropSet drops;
    if (!args.sidecar.empty()) {
        if (!args.drops.empty()) {
            throw Error(ErrorCode::InvalidArgument, "give --drops or --sidecar, not both");
        }
        drops = load_sidecar(args.sidecar).drops;
        check_drop_invariants(drops.indices, drops.image_height);
    } else {
        if (args.height < 1) {
            throw Error(ErrorCode::InvalidArgument, "--drops needs --height");
        }
        drops = validate_drop_set(parse_drop_list(args.drops), args.height);
    }

    ShiftOptions options;
    options.min_height = args.min_height;
    options.mode = args.above_top ? ShiftMode::AboveTop : ShiftMode::BeforeCenter;

    const AnnotationFile file = load_annotations(args.annotations).file;
    ShiftStats stats;
    const AnnotationFile shifted = shift_annotation_file(file, drops, options, &stats);
    save_annotations(shifted, args.output);
    std::cerr << "removed " << stats.removed << " boxes below min height";
    if (stats.out_of_bounds > 0) {
        std::cerr << ", " << stats.out_of_bounds << " boxes out of bounds";
    }
    std::cerr << "\n";
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

struct BatchArgs {
    std::string config_path;
    std::string input_dir;
    std::string output_dir;
    std::string pattern;
    std::string sweep;
    std::string padding;
    std::uint64_t seed = 0;
    const CLI::Option* seed_opt = nullptr;
    int parallelism = 0;
    std::string formats;
    std::string annotations;
    bool force = false;
};

int run_batch_cmd(const BatchArgs& args) {
    BatchConfig config;
    if (!args.config_path.empty()) {
        config = load_batch_config(args.config_path);
    }
    if (!args.input_dir.empty()) config.input_dir = args.input_dir;
    if (!args.output_dir.empty()) config.output_dir = args.output_dir;
    if (!args.pattern.empty()) config.pattern = parse_cfa_pattern(args.pattern);
    if (!args.sweep.empty()) config.sweep = parse_drop_list(args.sweep);
    if (!args.padding.empty()) config.padding = parse_padding_kind(args.padding);
    if (args.seed_opt->count() > 0 || std::getenv("EMISTRIP_SEED") != nullptr) {
        config.seed = seed_or_env(args.seed_opt, args.seed);
    }
    if (args.parallelism > 0) config.parallelism = args.parallelism;
    if (!args.formats.empty()) {
        config.report_formats.clear();
        std::string token;
        for (char c : args.formats + ",") {
            if (c == ',') {
                if (!token.empty()) {
                    config.report_formats.push_back(token);
                }
                token.clear();
            } else {
                token += c;
            }
        }
    }
    if (!args.annotations.empty()) config.annotations = fs::path(args.annotations);
    if (args.force) config.force = true;

    const BatchResult result = run_batch(config);
    std::cout << "generated " << result.generated << ", skipped " << result.skipped
              << ", failed " << result.failures.size() << "\n";
    for (const BatchFailure& failure : result.failures) {
        std::cerr << "failed: " << failure.image_id;
        if (failure.strip_count >= 0) {
            std::cerr << " (strips " << failure.strip_count << ")";
        }
        std::cerr << ": " << failure.message << "\n";
    }
    return result.failures.empty() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electromagnetic row-drop attack simulation and evaluation for Bayer camera pipelines"};
    app.set_version_flag("--version", "emistrip 0.1.0");
    app.require_subcommand(1);

    ConvertArgs mosaic_args;
    auto* mosaic_cmd = app.add_subcommand("mosaic", "Sample an RGB image through a Bayer CFA");
    mosaic_cmd->add_option("-i,--input", mosaic_args.input, "Input PPM")->required();
    mosaic_cmd->add_option("-o,--output", mosaic_args.output, "Output PGM")->required();
    mosaic_cmd->add_option("--pattern", mosaic_args.pattern, "CFA pattern")
        ->capture_default_str();

    ConvertArgs demosaic_args;
    auto* demosaic_cmd = app.add_subcommand("demosaic", "Reconstruct RGB from a raw image");
    demosaic_cmd->add_option("-i,--input", demosaic_args.input, "Input PGM")->required();
    demosaic_cmd->add_option("-o,--output", demosaic_args.output, "Output PPM")->required();
    auto* demosaic_pattern =
        demosaic_cmd->add_option("--pattern", demosaic_args.pattern,
                                 "CFA pattern when the file carries no metadata");

    AttackArgs attack_args;
    auto* attack_cmd = app.add_subcommand("attack", "Drop rows from a raw image and refill the bottom");
    attack_cmd->add_option("-i,--input", attack_args.input, "Input PGM (or PPM for the full pipeline)")
        ->required();
    attack_cmd->add_option("-o,--output", attack_args.output, "Output image")->required();
    attack_cmd->add_option("--sidecar", attack_args.sidecar,
                           "Sidecar JSON path (default: output with .json)");
    attack_cmd->add_option("--drops", attack_args.drops, "Explicit drop list, e.g. 10,20,30,40");
    attack_cmd->add_option("--strips", attack_args.strips, "Sample a drop set with this many strips");
    attack_args.seed_opt =
        attack_cmd->add_option("--seed", attack_args.seed, "Sampling seed (default $EMISTRIP_SEED)");
    attack_cmd->add_option("--padding", attack_args.padding, "wrap_top|next_frame|replicate_last|zero")
        ->capture_default_str();
    attack_cmd->add_option("--next-frame", attack_args.next_frame, "Companion frame for next_frame");
    attack_cmd->add_option("--pattern", attack_args.pattern, "CFA pattern")->capture_default_str();
    attack_cmd->add_option("--min-gap", attack_args.min_gap, "Minimum sampled row spacing")
        ->capture_default_str();

    DetectArgs detect_args;
    auto* detect_cmd = app.add_subcommand("detect", "Recover the dropped rows from a clean/attacked pair");
    detect_cmd->add_option("--clean", detect_args.clean, "Clean PGM")->required();
    detect_cmd->add_option("--attacked", detect_args.attacked, "Attacked PGM")->required();
    detect_cmd->add_option("-o,--output", detect_args.output, "Write the drop list here too");
    detect_cmd->add_option("--profile", detect_args.profile, "Dump the row difference profile CSV");
    detect_cmd->add_option("--policy", detect_args.policy, "midpoint|two_means")
        ->capture_default_str();
    detect_cmd->add_option("--noise-floor", detect_args.noise_floor, "Flat-profile cutoff")
        ->capture_default_str();
    detect_cmd->add_option("--pattern", detect_args.pattern, "CFA pattern fallback");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Score attacked images and detection quality");
    eval_cmd->add_option("--clean", eval_args.clean, "Clean PGM file or directory");
    eval_cmd->add_option("--attacked", eval_args.attacked, "Attacked PGM file or directory");
    eval_cmd->add_option("--truth", eval_args.truth, "Ground-truth annotations JSON");
    eval_cmd->add_option("--detections", eval_args.detections, "Detections JSON with scores");
    eval_cmd->add_option("--ttest-a", eval_args.ttest_a, "Sample list file, side A");
    eval_cmd->add_option("--ttest-b", eval_args.ttest_b, "Sample list file, side B");
    eval_cmd->add_option("-o,--out-dir", eval_args.out_dir, "Report directory")
        ->capture_default_str();

    ShiftArgs shift_args;
    auto* shift_cmd = app.add_subcommand("shift-ann", "Shift annotations to match an attacked image");
    shift_cmd->add_option("--annotations", shift_args.annotations, "Input annotations JSON")
        ->required();
    shift_cmd->add_option("-o,--output", shift_args.output, "Output annotations JSON")->required();
    shift_cmd->add_option("--drops", shift_args.drops, "Drop list, e.g. 10,20");
    shift_cmd->add_option("--height", shift_args.height, "Image height the drop list refers to");
    shift_cmd->add_option("--sidecar", shift_args.sidecar, "Attack sidecar JSON to read drops from");
    shift_cmd->add_option("--min-height", shift_args.min_height, "Remove boxes shrunk below this")
        ->capture_default_str();
    shift_cmd->add_flag("--count-above-top", shift_args.above_top,
                        "Count drops above the box top instead of above the center");

    BatchArgs batch_args;
    auto* batch_cmd = app.add_subcommand("batch", "Attack, shift, and evaluate a dataset");
    batch_cmd->add_option("--config", batch_args.config_path, "Batch config JSON");
    batch_cmd->add_option("--input", batch_args.input_dir, "Input directory of PGMs");
    batch_cmd->add_option("--output", batch_args.output_dir, "Output directory");
    batch_cmd->add_option("--pattern", batch_args.pattern, "CFA pattern fallback");
    batch_cmd->add_option("--sweep", batch_args.sweep, "Strip counts, e.g. 1,3,5 (default 1..20)");
    batch_cmd->add_option("--padding", batch_args.padding, "Padding strategy");
    batch_args.seed_opt =
        batch_cmd->add_option("--seed", batch_args.seed, "Global seed (default $EMISTRIP_SEED)");
    batch_cmd->add_option("--parallelism", batch_args.parallelism, "Worker thread count");
    batch_cmd->add_option("--formats", batch_args.formats, "Report formats, e.g. csv,json");
    batch_cmd->add_option("--annotations", batch_args.annotations, "Annotations JSON to shift");
    batch_cmd->add_flag("--force", batch_args.force, "Regenerate outputs that already exist");

    try {
        app.parse(argc, argv);
        if (mosaic_cmd->parsed()) {
            run_mosaic(mosaic_args);
        } else if (demosaic_cmd->parsed()) {
            demosaic_args.pattern_given = demosaic_pattern->count() > 0;
            run_demosaic(demosaic_args);
        } else if (attack_cmd->parsed()) {
            run_attack(attack_args);
        } else if (detect_cmd->parsed()) {
            run_detect(detect_args);
        } else if (eval_cmd->parsed()) {
            run_eval(eval_args);
        } else if (shift_cmd->parsed()) {
            run_shift(shift_args);
        } else if (batch_cmd->parsed()) {
            return run_batch_cmd(batch_args);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_io() ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
