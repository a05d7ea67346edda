#include "gluco/reports.hpp"

#include <charconv>
#include <fstream>

#include "gluco/csv.hpp"

namespace gluco {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open " + path);
    return in;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw CsvError(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s, const std::string& path, int line_no) {
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw CsvError(path + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    return v;
}

// Reads header + rows, handing each split row to the callback.
template <typename Fn>
void read_rows(const std::string& path, const std::string& header, std::size_t n_fields, Fn&& fn) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw CsvError(path + ":1: expected header '" + header + "'");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != n_fields) {
            throw CsvError(path + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(n_fields) + " fields, got " + std::to_string(f.size()));
        }
        fn(f, line_no);
    }
}

}  // namespace

void ReportBundle::append(const ScenarioOutput& out, const std::string& model_name) {
    for (const CohortRow& c : out.cohorts) {
        metrics_by_cohort.push_back({cohort_name(c.cohort), model_name, c.agg.rmse_mean,
                                     c.agg.mae_mean, c.agg.pearson_mean, c.agg.rmse_sd,
                                     c.agg.mae_sd, c.agg.pearson_sd});
        for (std::size_t s = 0; s < c.agg.rmse_per_step_mean.size(); ++s) {
            rmse_by_horizon.push_back({cohort_name(c.cohort), model_name,
                                       static_cast<int>(s + 1) * 5, c.agg.rmse_per_step_mean[s]});
        }
    }
    for (const SubjectRow& s : out.subjects) {
        rmse_by_subject.push_back({cohort_name(s.cohort), model_name, s.index_in_cohort, s.rmse_mean});
    }
    for (const ForgetRow& f : out.forgetting) {
        forgetting.push_back({model_name, cohort_name(f.trained_through),
                              cohort_name(f.evaluated_on), f.agg.rmse_mean, f.agg.mae_mean,
                              f.agg.pearson_mean});
    }
}

void ReportBundle::write_all(const std::string& dir) const {
    write_metrics_by_cohort(dir + "/metrics_by_cohort.csv", metrics_by_cohort);
    write_rmse_by_subject(dir + "/rmse_by_subject.csv", rmse_by_subject);
    write_rmse_by_horizon(dir + "/rmse_by_horizon.csv", rmse_by_horizon);
    write_forgetting_matrix(dir + "/forgetting_matrix.csv", forgetting);
}

void write_metrics_by_cohort(const std::string& path, const std::vector<MetricsByCohortRow>& rows) {
    std::ofstream out = open_out(path);
    out << "cohort,model,rmse,mae,pearson,rmse_sd,mae_sd,pearson_sd\n";
    for (const MetricsByCohortRow& r : rows) {
        out << r.cohort << ',' << r.model << ',' << format_double(r.rmse) << ','
            << format_double(r.mae) << ',' << format_double(r.pearson) << ','
            << format_double(r.rmse_sd) << ',' << format_double(r.mae_sd) << ','
            << format_double(r.pearson_sd) << '\n';
    }
}

void write_rmse_by_subject(const std::string& path, const std::vector<RmseBySubjectRow>& rows) {
    std::ofstream out = open_out(path);
    out << "cohort,model,subject_index,rmse\n";
    for (const RmseBySubjectRow& r : rows) {
        out << r.cohort << ',' << r.model << ',' << r.subject_index << ','
            << format_double(r.rmse) << '\n';
    }
}

void write_rmse_by_horizon(const std::string& path, const std::vector<RmseByHorizonRow>& rows) {
    std::ofstream out = open_out(path);
    out << "cohort,model,ph_minutes,rmse\n";
    for (const RmseByHorizonRow& r : rows) {
        out << r.cohort << ',' << r.model << ',' << r.ph_minutes << ','
            << format_double(r.rmse) << '\n';
    }
}

void write_forgetting_matrix(const std::string& path, const std::vector<ForgettingRow>& rows) {
    std::ofstream out = open_out(path);
    out << "model,trained_through,evaluated_on,rmse,mae,pearson\n";
    for (const ForgettingRow& r : rows) {
        out << r.model << ',' << r.trained_through << ',' << r.evaluated_on << ','
            << format_double(r.rmse) << ',' << format_double(r.mae) << ','
            << format_double(r.pearson) << '\n';
    }
}

std::vector<MetricsByCohortRow> read_metrics_by_cohort(const std::string& path) {
    std::vector<MetricsByCohortRow> rows;
    read_rows(path, "cohort,model,rmse,mae,pearson,rmse_sd,mae_sd,pearson_sd", 8,
              [&](const std::vector<std::string>& f, int ln) {
                  rows.push_back({f[0], f[1], parse_double(f[2], path, ln),
                                  parse_double(f[3], path, ln), parse_double(f[4], path, ln),
                                  parse_double(f[5], path, ln), parse_double(f[6], path, ln),
                                  parse_double(f[7], path, ln)});
              });
    return rows;
}

std::vector<RmseBySubjectRow> read_rmse_by_subject(const std::string& path) {
    std::vector<RmseBySubjectRow> rows;
    read_rows(path, "cohort,model,subject_index,rmse", 4,
              [&](const std::vector<std::string>& f, int ln) {
                  rows.push_back({f[0], f[1], static_cast<int>(parse_long(f[2], path, ln)),
                                  parse_double(f[3], path, ln)});
              });
    return rows;
}

std::vector<RmseByHorizonRow> read_rmse_by_horizon(const std::string& path) {
    std::vector<RmseByHorizonRow> rows;
    read_rows(path, "cohort,model,ph_minutes,rmse", 4,
              [&](const std::vector<std::string>& f, int ln) {
                  rows.push_back({f[0], f[1], static_cast<int>(parse_long(f[2], path, ln)),
                                  parse_double(f[3], path, ln)});
              });
    return rows;
}

std::vector<ForgettingRow> read_forgetting_matrix(const std::string& path) {
    std::vector<ForgettingRow> rows;
    read_rows(path, "model,trained_through,evaluated_on,rmse,mae,pearson", 6,
              [&](const std::vector<std::string>& f, int ln) {
                  rows.push_back({f[0], f[1], f[2], parse_double(f[3], path, ln),
                                  parse_double(f[4], path, ln), parse_double(f[5], path, ln)});
              });
    return rows;
}

void write_eval_report(const std::string& path, const std::string& model,
                       const MetricsReport& report) {
    std::ofstream out = open_out(path);
    out << "model,rmse,mae,pearson,pearson_degenerate,n_windows,n_pairs\n";
    out << model << ',' << format_double(report.rmse) << ',' << format_double(report.mae) << ','
        << format_double(report.pearson) << ',' << (report.pearson_degenerate ? 1 : 0) << ','
        << report.n_windows << ',' << report.n_pairs << '\n';
}

MetricsReport read_eval_report(const std::string& path, std::string* model) {
    MetricsReport report;
    bool seen = false;
    read_rows(path, "model,rmse,mae,pearson,pearson_degenerate,n_windows,n_pairs", 7,
              [&](const std::vector<std::string>& f, int ln) {
                  if (seen) throw CsvError(path + ": more than one summary row");
                  seen = true;
                  if (model) *model = f[0];
                  report.rmse = parse_double(f[1], path, ln);
                  report.mae = parse_double(f[2], path, ln);
                  report.pearson = parse_double(f[3], path, ln);
                  report.pearson_degenerate = parse_long(f[4], path, ln) != 0;
                  report.n_windows = static_cast<std::size_t>(parse_long(f[5], path, ln));
                  report.n_pairs = static_cast<std::size_t>(parse_long(f[6], path, ln));
              });
    if (!seen) throw CsvError(path + ": missing summary row");
    return report;
}

}  // namespace gluco
