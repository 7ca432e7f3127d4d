#pragma once

#include "emistrip/attack.hpp"
#include "emistrip/report.hpp"
#include "emistrip/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emistrip {

struct BatchConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    std::optional<CfaPattern> pattern;          // fallback for files without metadata
    std::vector<Index> sweep = default_sweep(); // strip counts
    PaddingKind padding = PaddingKind::WrapTop;
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::vector<std::string> report_formats = {"csv", "json"};
    std::optional<std::filesystem::path> annotations;
    bool force = false;

    static std::vector<Index> default_sweep(); // 1..20
};

/// JSON config mirroring the field names above; absent keys keep defaults.
BatchConfig load_batch_config(const std::filesystem::path& path);
void validate_batch_config(const BatchConfig& config);

struct BatchFailure {
    std::string image_id;
    Index strip_count = 0;
    std::string message;
};

struct BatchResult {
    EvalReport report;
    std::vector<BatchFailure> failures;
    Index generated = 0;
    Index skipped = 0; // outputs already present and not forced
};

/// Attack every PGM in input_dir at every sweep strip count, writing
/// attacked images + sidecars under output_dir/strips_<n>/, shifted
/// annotations when configured, and the evaluation report. Per-image seeds
/// come from derive_seed(config.seed, image_id), so results do not depend
/// on parallelism or directory enumeration order. Existing outputs are
/// reused unless `force`.
BatchResult run_batch(const BatchConfig& config);

} // namespace emistrip
