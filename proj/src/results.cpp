// SPDX-License-Identifier: Apache-2.0
#include "risne/results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "risne/system.hpp"

namespace risne {

ResultFormat result_format_from_string(const std::string& name)
{
    if (name == "csv") {
        return ResultFormat::csv;
    }
    if (name == "json") {
        return ResultFormat::json;
    }
    throw InputError("unknown result format '" + name + "' (expected csv or json)");
}

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return {buf, res.ptr};
}

double parse_double(const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        // from_chars does not accept "inf"/"nan" spelled by to_chars on all
        // libraries; fall back to strtod for those.
        if (text == "inf" || text == "-inf" || text == "nan" || text == "-nan") {
            return std::strtod(text.c_str(), nullptr);
        }
        throw ParseError("not a number: '" + text + "'");
    }
    return v;
}

namespace {

const char* kMetricColumns =
    "run_id,policy,param,param_value,mean_snr,mean_snr_db,mean_rate,rate_std_error,episodes,evaluations";

void check_text_field(const std::string& s, const char* what)
{
    if (s.find_first_of(",\n\r\"") != std::string::npos) {
        throw InputError(std::string("metric ") + what + " may not contain commas, quotes or newlines: '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) {
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::size_t parse_count(const std::string& text)
{
    std::size_t v = 0;
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError("not a count: '" + text + "'");
    }
    return v;
}

} // namespace

std::string metrics_csv(const std::vector<MetricRecord>& records, bool include_timing)
{
    std::ostringstream out;
    out << kMetricColumns << (include_timing ? ",wall_time_s" : "") << '\n';
    for (const auto& r : records) {
        check_text_field(r.run_id, "run_id");
        check_text_field(r.policy, "policy");
        check_text_field(r.param, "param");
        check_text_field(r.param_value, "param_value");
        out << r.run_id << ',' << r.policy << ',' << r.param << ',' << r.param_value << ',' << format_double(r.mean_snr)
            << ',' << format_double(r.mean_snr_db) << ',' << format_double(r.mean_rate) << ','
            << format_double(r.rate_std_error) << ',' << r.episodes << ',' << r.evaluations;
        if (include_timing) {
            out << ',' << format_double(r.wall_time_s);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<MetricRecord> parse_metrics_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("metrics csv: missing header");
    }
    const bool timing = line == std::string(kMetricColumns) + ",wall_time_s";
    if (!timing && line != kMetricColumns) {
        throw ParseError("metrics csv: unexpected header '" + line + "'");
    }
    const std::size_t expected = timing ? 11 : 10;
    std::vector<MetricRecord> records;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto f = split(line, ',');
        if (f.size() != expected) {
            throw ParseError("metrics csv: row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                             " fields, expected " + std::to_string(expected));
        }
        MetricRecord r;
        r.run_id = f[0];
        r.policy = f[1];
        r.param = f[2];
        r.param_value = f[3];
        r.mean_snr = parse_double(f[4]);
        r.mean_snr_db = parse_double(f[5]);
        r.mean_rate = parse_double(f[6]);
        r.rate_std_error = parse_double(f[7]);
        r.episodes = parse_count(f[8]);
        r.evaluations = parse_count(f[9]);
        if (timing) {
            r.wall_time_s = parse_double(f[10]);
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::string metrics_json(const std::vector<MetricRecord>& records, bool include_timing)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j{{"run_id", r.run_id},
                         {"policy", r.policy},
                         {"param", r.param},
                         {"param_value", r.param_value},
                         {"mean_snr", r.mean_snr},
                         {"mean_snr_db", r.mean_snr_db},
                         {"mean_rate", r.mean_rate},
                         {"rate_std_error", r.rate_std_error},
                         {"episodes", r.episodes},
                         {"evaluations", r.evaluations}};
        if (include_timing) {
            j["wall_time_s"] = r.wall_time_s;
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<MetricRecord> parse_metrics_json(const std::string& text)
{
    std::vector<MetricRecord> records;
    try {
        const auto arr = nlohmann::json::parse(text);
        for (const auto& j : arr) {
            MetricRecord r;
            r.run_id = j.at("run_id").get<std::string>();
            r.policy = j.at("policy").get<std::string>();
            r.param = j.at("param").get<std::string>();
            r.param_value = j.at("param_value").get<std::string>();
            r.mean_snr = j.at("mean_snr").get<double>();
            r.mean_snr_db = j.at("mean_snr_db").get<double>();
            r.mean_rate = j.at("mean_rate").get<double>();
            r.rate_std_error = j.at("rate_std_error").get<double>();
            r.episodes = j.at("episodes").get<std::size_t>();
            r.evaluations = j.at("evaluations").get<std::size_t>();
            r.wall_time_s = j.value("wall_time_s", 0.0);
            records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("metrics json: ") + e.what());
    }
    return records;
}

std::filesystem::path export_results(const std::vector<MetricRecord>& records, ResultFormat format,
                                     const std::filesystem::path& dir, bool include_timing)
{
    if (records.empty()) {
        throw InputError("export_results: no records");
    }
    std::filesystem::create_directories(dir);
    if (format == ResultFormat::csv) {
        const auto path = dir / "metrics.csv";
        write_text(path, metrics_csv(records, include_timing));
        return path;
    }
    const auto path = dir / "metrics.json";
    write_text(path, metrics_json(records, include_timing));
    return path;
}

std::string history_csv(const std::vector<HistoryRecord>& history)
{
    std::ostringstream out;
    out << "generation,best_fitness,mean_fitness,best_fitness_db\n";
    for (const auto& h : history) {
        out << h.generation << ',' << format_double(h.best_fitness) << ',' << format_double(h.mean_fitness) << ','
            << format_double(to_db(h.best_fitness)) << '\n';
    }
    return out.str();
}

std::string timing_csv(const std::vector<HistoryRecord>& history, const std::vector<MetricRecord>& records)
{
    std::ostringstream out;
    out << "stage,index,wall_time_s\n";
    for (const auto& h : history) {
        out << "generation," << h.generation << ',' << format_double(h.wall_time_s) << '\n';
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << "run," << i << ',' << format_double(records[i].wall_time_s) << '\n';
    }
    return out.str();
}

std::string overhead_csv(const std::vector<OverheadRecord>& records)
{
    std::ostringstream out;
    out << "phase,mode,scalars_up,scalars_down,bits_votes,bits_phases,weight_broadcast_scalars\n";
    for (const auto& r : records) {
        out << to_string(r.phase) << ',' << to_string(r.mode) << ',' << r.scalars_up << ',' << r.scalars_down << ','
            << r.bits_votes << ',' << r.bits_phases << ',' << r.weight_broadcast_scalars << '\n';
    }
    return out.str();
}

std::string plot_csv(const std::vector<MetricRecord>& records)
{
    std::ostringstream out;
    const std::string param = records.empty() ? "value" : records.front().param;
    out << (param.empty() ? "value" : param) << ",policy,run_id,mean_snr_db,mean_rate\n";
    for (const auto& r : records) {
        out << r.param_value << ',' << r.policy << ',' << r.run_id << ',' << format_double(r.mean_snr_db) << ','
            << format_double(r.mean_rate) << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("error writing '" + path.string() + "'");
    }
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace risne
