#include "gluco/csv.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>

namespace gluco {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

double parse_double(const std::string& field, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw CsvError(path + ":" + std::to_string(line_no) + ": '" + field + "' is not a number");
    }
    return v;
}

struct CsvFile {
    std::ifstream in;
    std::string path;
    std::size_t line_no = 0;

    CsvFile(const std::string& p, const std::string& expected_header) : in(p), path(p) {
        if (!in) throw CsvError("cannot open " + path);
        std::string header;
        if (!std::getline(in, header)) throw CsvError(path + " is empty");
        ++line_no;
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected_header) {
            throw CsvError(path + ":1: expected header '" + expected_header + "', got '" + header + "'");
        }
    }

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }
};

std::vector<std::pair<std::int64_t, double>> load_timestamped(const std::string& path,
                                                              const std::string& header,
                                                              const char* value_name) {
    CsvFile file(path, header);
    std::vector<std::pair<std::int64_t, double>> rows;
    std::string line;
    while (file.next(line)) {
        const auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw CsvError(path + ":" + std::to_string(file.line_no) + ": expected 2 fields, got " +
                           std::to_string(fields.size()));
        }
        std::int64_t ts;
        try {
            ts = parse_iso8601_utc(fields[0]);
        } catch (const ParseError& e) {
            throw CsvError(path + ":" + std::to_string(file.line_no) + ": " + e.what());
        }
        rows.emplace_back(ts, parse_double(fields[1], path, file.line_no));
    }
    if (rows.empty()) {
        throw CsvError(path + " contains a header but no " + std::string(value_name) + " rows");
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return rows;
}

}  // namespace

CgmSeries load_cgm_csv(const std::string& path) {
    auto rows = load_timestamped(path, "timestamp,glucose_mg_dl", "CGM");

    CgmSeries series;
    for (const auto& [ts, value] : rows) {
        if (!(value > 20.0 && value < 600.0)) {
            ++series.dropped;
            continue;
        }
        if (!series.samples.empty() && series.samples.back().first == ts) {
            series.samples.back().second = value;  // last wins
        } else {
            series.samples.emplace_back(ts, value);
        }
    }
    if (series.samples.empty()) {
        throw CsvError(path + ": every reading was out of range; nothing to load");
    }
    return series;
}

std::vector<std::pair<std::int64_t, double>> load_steps_csv(const std::string& path) {
    auto rows = load_timestamped(path, "timestamp,steps", "step");
    for (const auto& [ts, value] : rows) {
        if (value < 0.0) {
            throw CsvError(path + ": negative step count at " + format_iso8601_utc(ts));
        }
    }
    return rows;
}

namespace {

void write_timestamped(const std::string& path, const std::string& header,
                       const std::vector<std::pair<std::int64_t, double>>& samples) {
    std::ofstream out(path, std::ios::binary);  // binary keeps \n on every platform
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << header << "\n";
    for (const auto& [ts, value] : samples) {
        out << format_iso8601_utc(ts) << "," << format_double(value) << "\n";
    }
    if (!out) throw CsvError("write to " + path + " failed");
}

}  // namespace

void write_cgm_csv(const std::string& path,
                   const std::vector<std::pair<std::int64_t, double>>& samples) {
    write_timestamped(path, "timestamp,glucose_mg_dl", samples);
}

void write_steps_csv(const std::string& path,
                     const std::vector<std::pair<std::int64_t, double>>& samples) {
    write_timestamped(path, "timestamp,steps", samples);
}

std::vector<ManifestRow> load_manifest(const std::string& path) {
    CsvFile file(path, "subject_id,cohort,cgm_path,activity_path");
    std::vector<ManifestRow> rows;
    std::string line;
    while (file.next(line)) {
        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw CsvError(path + ":" + std::to_string(file.line_no) + ": expected 4 fields, got " +
                           std::to_string(fields.size()));
        }
        ManifestRow row;
        row.subject_id = fields[0];
        try {
            row.cohort = parse_cohort(fields[1]);
        } catch (const ParseError& e) {
            throw CsvError(path + ":" + std::to_string(file.line_no) + ": " + e.what());
        }
        row.cgm_path = fields[2];
        row.activity_path = fields[3];
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvError(path + " lists no subjects");
    return rows;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    out << "subject_id,cohort,cgm_path,activity_path\n";
    for (const ManifestRow& row : rows) {
        out << row.subject_id << "," << cohort_name(row.cohort) << "," << row.cgm_path << ","
            << row.activity_path << "\n";
    }
    if (!out) throw CsvError("write to " + path + " failed");
}

SubjectRecord load_subject(const ManifestRow& row, const std::string& manifest_dir) {
    namespace fs = std::filesystem;
    auto resolve = [&](const std::string& p) {
        const fs::path rel(p);
        return rel.is_absolute() ? rel.string() : (fs::path(manifest_dir) / rel).string();
    };

    SubjectRecord record;
    record.id = row.subject_id;
    record.cohort = row.cohort;
    record.cgm = load_cgm_csv(resolve(row.cgm_path)).samples;
    record.steps = load_steps_csv(resolve(row.activity_path));
    return record;
}

std::vector<SubjectRecord> load_dataset(const std::string& manifest_path) {
    const std::string dir = std::filesystem::path(manifest_path).parent_path().string();
    std::vector<SubjectRecord> records;
    for (const ManifestRow& row : load_manifest(manifest_path)) {
        records.push_back(load_subject(row, dir.empty() ? "." : dir));
    }
    return records;
}

}  // namespace gluco
