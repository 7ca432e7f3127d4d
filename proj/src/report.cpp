#include "emistrip/report.hpp"

#include "emistrip/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace emistrip {

using ordered_json = nlohmann::ordered_json;

namespace {

std::optional<double> metric_value(const EvalRow& row, const std::string& name) {
    if (name == "ssim_raw") return row.ssim_raw;
    if (name == "ssim_rgb") return row.ssim_rgb;
    if (name == "map50") return row.map50;
    if (name == "map75") return row.map75;
    if (name == "map50_95") return row.map50_95;
    return std::nullopt;
}

} // namespace

std::vector<std::string> metric_names(std::span<const EvalRow> rows) {
    std::vector<std::string> names = {"ssim_raw", "ssim_rgb"};
    for (const char* optional_name : {"map50", "map75", "map50_95"}) {
        const bool everywhere =
            !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const EvalRow& r) {
                return metric_value(r, optional_name).has_value();
            });
        if (everywhere) {
            names.emplace_back(optional_name);
        }
    }
    return names;
}

std::vector<AggregateRow> compute_aggregates(std::span<const EvalRow> rows) {
    const std::vector<std::string> names = metric_names(rows);
    std::map<Index, std::vector<const EvalRow*>> groups;
    for (const EvalRow& row : rows) {
        groups[row.strip_count].push_back(&row);
    }

    std::vector<AggregateRow> out;
    for (const auto& [strips, members] : groups) {
        for (const std::string& name : names) {
            AggregateRow agg;
            agg.strip_count = strips;
            agg.metric = name;
            agg.count = static_cast<Index>(members.size());
            double sum = 0.0;
            for (const EvalRow* row : members) {
                sum += *metric_value(*row, name);
            }
            agg.mean = sum / static_cast<double>(members.size());
            double ss = 0.0;
            for (const EvalRow* row : members) {
                const double d = *metric_value(*row, name) - agg.mean;
                ss += d * d;
            }
            agg.stddev = members.size() > 1
                             ? std::sqrt(ss / static_cast<double>(members.size() - 1))
                             : 0.0;
            out.push_back(std::move(agg));
        }
    }
    return out;
}

std::vector<TTestRow> compute_ttests(std::span<const EvalRow> rows) {
    const std::vector<std::string> names = metric_names(rows);
    std::map<Index, std::vector<const EvalRow*>> groups;
    for (const EvalRow& row : rows) {
        groups[row.strip_count].push_back(&row);
    }
    std::vector<Index> sweep;
    for (const auto& [strips, _] : groups) {
        sweep.push_back(strips);
    }

    std::vector<TTestRow> out;
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        for (const std::string& name : names) {
            TTestRow row;
            row.metric = name;
            row.strips_a = sweep[i];
            row.strips_b = sweep[i + 1];
            std::vector<double> a, b;
            for (const EvalRow* r : groups[sweep[i]]) {
                a.push_back(*metric_value(*r, name));
            }
            for (const EvalRow* r : groups[sweep[i + 1]]) {
                b.push_back(*metric_value(*r, name));
            }
            try {
                row.result = welch_t_test(a, b);
            } catch (const Error& e) {
                row.note = error_code_name(e.code());
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

EvalReport build_report(std::vector<EvalRow> rows) {
    EvalReport report;
    report.aggregates = compute_aggregates(rows);
    report.ttests = compute_ttests(rows);
    report.per_image = std::move(rows);
    return report;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

namespace {

std::string format_optional(const std::optional<double>& value) {
    return value.has_value() ? format_double(*value) : std::string();
}

} // namespace

void write_per_image_csv(std::ostream& out, std::span<const EvalRow> rows) {
    out << "image_id,strip_count,ssim_raw,ssim_rgb,map50,map75,map50_95\n";
    for (const EvalRow& row : rows) {
        out << csv_escape(row.image_id) << ',' << row.strip_count << ','
            << format_double(row.ssim_raw) << ',' << format_double(row.ssim_rgb) << ','
            << format_optional(row.map50) << ',' << format_optional(row.map75) << ','
            << format_optional(row.map50_95) << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
    out << "strip_count,metric,count,mean,stddev\n";
    for (const AggregateRow& row : rows) {
        out << row.strip_count << ',' << csv_escape(row.metric) << ',' << row.count << ','
            << format_double(row.mean) << ',' << format_double(row.stddev) << '\n';
    }
}

void write_ttest_csv(std::ostream& out, std::span<const TTestRow> rows) {
    out << "metric,strips_a,strips_b,t_statistic,degrees_of_freedom,p_value,note\n";
    for (const TTestRow& row : rows) {
        out << csv_escape(row.metric) << ',' << row.strips_a << ',' << row.strips_b << ',';
        if (row.note.empty()) {
            out << format_double(row.result.t_statistic) << ','
                << format_double(row.result.degrees_of_freedom) << ','
                << format_double(row.result.p_value);
        } else {
            out << ",,";
        }
        out << ',' << csv_escape(row.note) << '\n';
    }
}

namespace {

std::ofstream open_report_file(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    return out;
}

} // namespace

void write_report_csv(const EvalReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_report_file(dir / "report.csv");
        write_per_image_csv(out, report.per_image);
    }
    {
        auto out = open_report_file(dir / "aggregate.csv");
        write_aggregate_csv(out, report.aggregates);
    }
    {
        auto out = open_report_file(dir / "ttest.csv");
        write_ttest_csv(out, report.ttests);
    }
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    ordered_json doc;
    doc["per_image"] = ordered_json::array();
    for (const EvalRow& row : report.per_image) {
        ordered_json rec;
        rec["image_id"] = row.image_id;
        rec["strip_count"] = row.strip_count;
        rec["ssim_raw"] = row.ssim_raw;
        rec["ssim_rgb"] = row.ssim_rgb;
        rec["map50"] = row.map50.has_value() ? ordered_json(*row.map50) : ordered_json(nullptr);
        rec["map75"] = row.map75.has_value() ? ordered_json(*row.map75) : ordered_json(nullptr);
        rec["map50_95"] =
            row.map50_95.has_value() ? ordered_json(*row.map50_95) : ordered_json(nullptr);
        doc["per_image"].push_back(std::move(rec));
    }
    doc["aggregates"] = ordered_json::array();
    for (const AggregateRow& row : report.aggregates) {
        ordered_json rec;
        rec["strip_count"] = row.strip_count;
        rec["metric"] = row.metric;
        rec["count"] = row.count;
        rec["mean"] = row.mean;
        rec["stddev"] = row.stddev;
        doc["aggregates"].push_back(std::move(rec));
    }
    doc["ttests"] = ordered_json::array();
    for (const TTestRow& row : report.ttests) {
        ordered_json rec;
        rec["metric"] = row.metric;
        rec["strips_a"] = row.strips_a;
        rec["strips_b"] = row.strips_b;
        if (row.note.empty()) {
            rec["t_statistic"] = row.result.t_statistic;
            rec["degrees_of_freedom"] = row.result.degrees_of_freedom;
            rec["p_value"] = row.result.p_value;
        } else {
            rec["note"] = row.note;
        }
        doc["ttests"].push_back(std::move(rec));
    }

    auto out = open_report_file(path);
    out << doc.dump(2) << "\n";
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    int c;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while ((c = in.get()) != EOF) {
        any = true;
        if (quoted) {
            if (c == '"') {
                const int peek = in.peek();
                if (peek == '"') {
                    in.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_row();
        } else if (c != '\r') {
            field += static_cast<char>(c);
        }
    }
    if (any && (!field.empty() || !row.empty())) {
        end_row();
    }
    return rows;
}

double parse_csv_double(const std::string& field, const std::filesystem::path& path) {
    double value = 0.0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || p != field.data() + field.size()) {
        throw Error(ErrorCode::ParseError, path.string() + ": bad number \"" + field + "\"");
    }
    return value;
}

Index parse_csv_index(const std::string& field, const std::filesystem::path& path) {
    Index value = 0;
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || p != field.data() + field.size()) {
        throw Error(ErrorCode::ParseError, path.string() + ": bad integer \"" + field + "\"");
    }
    return value;
}

} // namespace

EvalReport read_report_csv(const std::filesystem::path& dir) {
    EvalReport report;
    const auto per_image = parse_csv(dir / "report.csv");
    for (std::size_t i = 1; i < per_image.size(); ++i) {
        const auto& fields = per_image[i];
        if (fields.size() != 7) {
            throw Error(ErrorCode::ParseError, "report.csv row " + std::to_string(i) +
                                                   " has " + std::to_string(fields.size()) +
                                                   " fields, expected 7");
        }
        EvalRow row;
        row.image_id = fields[0];
        row.strip_count = parse_csv_index(fields[1], dir / "report.csv");
        row.ssim_raw = parse_csv_double(fields[2], dir / "report.csv");
        row.ssim_rgb = parse_csv_double(fields[3], dir / "report.csv");
        if (!fields[4].empty()) row.map50 = parse_csv_double(fields[4], dir / "report.csv");
        if (!fields[5].empty()) row.map75 = parse_csv_double(fields[5], dir / "report.csv");
        if (!fields[6].empty()) row.map50_95 = parse_csv_double(fields[6], dir / "report.csv");
        report.per_image.push_back(std::move(row));
    }

    const auto aggregate = parse_csv(dir / "aggregate.csv");
    for (std::size_t i = 1; i < aggregate.size(); ++i) {
        const auto& fields = aggregate[i];
        if (fields.size() != 5) {
            throw Error(ErrorCode::ParseError, "aggregate.csv row " + std::to_string(i) +
                                                   " is malformed");
        }
        AggregateRow row;
        row.strip_count = parse_csv_index(fields[0], dir / "aggregate.csv");
        row.metric = fields[1];
        row.count = parse_csv_index(fields[2], dir / "aggregate.csv");
        row.mean = parse_csv_double(fields[3], dir / "aggregate.csv");
        row.stddev = parse_csv_double(fields[4], dir / "aggregate.csv");
        report.aggregates.push_back(std::move(row));
    }

    const auto ttest = parse_csv(dir / "ttest.csv");
    for (std::size_t i = 1; i < ttest.size(); ++i) {
        const auto& fields = ttest[i];
        if (fields.size() != 7) {
            throw Error(ErrorCode::ParseError, "ttest.csv row " + std::to_string(i) +
                                                   " is malformed");
        }
        TTestRow row;
        row.metric = fields[0];
        row.strips_a = parse_csv_index(fields[1], dir / "ttest.csv");
        row.strips_b = parse_csv_index(fields[2], dir / "ttest.csv");
        row.note = fields[6];
        if (row.note.empty()) {
            row.result.t_statistic = parse_csv_double(fields[3], dir / "ttest.csv");
            row.result.degrees_of_freedom = parse_csv_double(fields[4], dir / "ttest.csv");
            row.result.p_value = parse_csv_double(fields[5], dir / "ttest.csv");
        }
        report.ttests.push_back(std::move(row));
    }
    return report;
}

void save_sidecar(const AttackSidecar& sidecar, const std::filesystem::path& path) {
    ordered_json doc;
    doc["drops"] = sidecar.drops.indices;
    doc["image_height"] = sidecar.drops.image_height;
    doc["pattern"] = cfa_pattern_name(sidecar.pattern);
    doc["padding"] = sidecar.padding;
    if (sidecar.seed.has_value()) {
        doc["seed"] = *sidecar.seed;
    }
    doc["strips"] = ordered_json::array();
    for (const Strip& strip : sidecar.strips.strips) {
        ordered_json rec;
        rec["start"] = strip.start;
        rec["end"] = strip.end;
        rec["height"] = strip.height();
        doc["strips"].push_back(std::move(rec));
    }
    auto out = open_report_file(path);
    out << doc.dump(2) << "\n";
}

AttackSidecar load_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }

    AttackSidecar sidecar;
    try {
        sidecar.drops.indices = doc.at("drops").get<std::vector<Index>>();
        sidecar.drops.image_height = doc.at("image_height").get<Index>();
        sidecar.pattern = parse_cfa_pattern(doc.at("pattern").get<std::string>());
        sidecar.padding = doc.at("padding").get<std::string>();
        if (doc.contains("seed")) {
            sidecar.seed = doc["seed"].get<std::uint64_t>();
        }
        sidecar.strips.image_height = sidecar.drops.image_height;
        for (const auto& rec : doc.at("strips")) {
            sidecar.strips.strips.push_back(
                {rec.at("start").get<Index>(), rec.at("end").get<Index>()});
        }
    } catch (const ordered_json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return sidecar;
}

} // namespace emistrip
