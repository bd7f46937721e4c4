// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "risne/cosyne.hpp"
#include "risne/multiris.hpp"

namespace risne {

/// Evaluation summary of one run.
struct MetricRecord {
    std::string run_id;
    std::string policy;
    std::string param;       ///< swept parameter, empty outside sweeps
    std::string param_value; ///< as written in the sweep value list
    double mean_snr = 0.0;   ///< linear, averaged over every evaluation step
    double mean_snr_db = 0.0;
    double mean_rate = 0.0;       ///< bits/s/Hz
    double rate_std_error = 0.0;  ///< over per-episode mean rates
    std::size_t episodes = 0;
    std::size_t evaluations = 0;  ///< fitness evaluations (evolved) or candidate evaluations (search)
    double wall_time_s = 0.0;

    bool operator==(const MetricRecord&) const = default;
};

enum class ResultFormat { csv, json };
ResultFormat result_format_from_string(const std::string& name);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Wall time is left out unless include_timing is set so that metric files
/// from repeated runs compare equal byte for byte.
std::string metrics_csv(const std::vector<MetricRecord>& records, bool include_timing = false);
std::vector<MetricRecord> parse_metrics_csv(const std::string& text);
std::string metrics_json(const std::vector<MetricRecord>& records, bool include_timing = false);
std::vector<MetricRecord> parse_metrics_json(const std::string& text);

/// Writes metrics.<csv|json> into dir and returns the path. Throws InputError on
/// an empty record list.
std::filesystem::path export_results(const std::vector<MetricRecord>& records, ResultFormat format,
                                     const std::filesystem::path& dir, bool include_timing = false);

std::string history_csv(const std::vector<HistoryRecord>& history);
std::string timing_csv(const std::vector<HistoryRecord>& history, const std::vector<MetricRecord>& records);
std::string overhead_csv(const std::vector<OverheadRecord>& records);

/// (param value, policy, SNR, rate) rows for an external plotter.
std::string plot_csv(const std::vector<MetricRecord>& records);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace risne
