#pragma once

#include "emistrip/drops.hpp"
#include "emistrip/metrics.hpp"
#include "emistrip/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emistrip {

/// One evaluated image under one attack condition.
struct EvalRow {
    std::string image_id;
    Index strip_count = 0;
    double ssim_raw = 0.0;
    double ssim_rgb = 0.0;
    std::optional<double> map50;
    std::optional<double> map75;
    std::optional<double> map50_95;
};

/// Mean/std of one metric across images at one strip count.
struct AggregateRow {
    Index strip_count = 0;
    std::string metric;
    Index count = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample (n - 1); 0 for a single row
};

/// Welch test between two strip-count conditions on one metric.
struct TTestRow {
    std::string metric;
    Index strips_a = 0;
    Index strips_b = 0;
    TTestResult result;
    std::string note; // set when the test was skipped (degenerate samples)
};

struct EvalReport {
    std::vector<EvalRow> per_image;
    std::vector<AggregateRow> aggregates;
    std::vector<TTestRow> ttests;
};

/// Metric columns present across `rows` (ssim_raw, ssim_rgb, then any mAP
/// column that every row carries).
std::vector<std::string> metric_names(std::span<const EvalRow> rows);

/// Group rows by strip count and reduce each metric. Ordered by strip count,
/// then by metric name in metric_names() order.
std::vector<AggregateRow> compute_aggregates(std::span<const EvalRow> rows);

/// Welch tests for consecutive strip-count pairs in ascending sweep order,
/// per metric. Degenerate pairs (too few samples, zero variance) produce a
/// row with a note instead of throwing.
std::vector<TTestRow> compute_ttests(std::span<const EvalRow> rows);

EvalReport build_report(std::vector<EvalRow> rows);

/// RFC-4180 quoting for one field (quotes only when required).
std::string csv_escape(const std::string& field);

/// Shortest round-trip decimal form; used for every numeric CSV/JSON field
/// so reports are byte-stable and parse back exactly.
std::string format_double(double value);

void write_per_image_csv(std::ostream& out, std::span<const EvalRow> rows);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);
void write_ttest_csv(std::ostream& out, std::span<const TTestRow> rows);

/// report.csv + aggregate.csv + ttest.csv in `dir`.
void write_report_csv(const EvalReport& report, const std::filesystem::path& dir);

/// Single JSON mirror of all three sections.
void write_report_json(const EvalReport& report, const std::filesystem::path& path);

EvalReport read_report_csv(const std::filesystem::path& dir);

/// Strip layout sidecar: {"strips":[{"start","end","height"}...],
/// "image_height":H} plus the attack provenance keys.
struct AttackSidecar {
    DropSet drops;
    StripLayout strips;
    CfaPattern pattern = CfaPattern::GRBG;
    std::string padding;
    std::optional<std::uint64_t> seed;
};

void save_sidecar(const AttackSidecar& sidecar, const std::filesystem::path& path);
AttackSidecar load_sidecar(const std::filesystem::path& path);

} // namespace emistrip
