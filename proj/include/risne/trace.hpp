// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "risne/channel.hpp"

namespace risne {

/// Binary channel trace. Layout (little endian):
///   "RISNETRC"  u32 version  u32 n_tx  u32 n_ris  u32 ris_count  u64 records
/// then per record:
///   u64 episode  u64 step  h[n_tx]  {H1[n_tx*n_ris] (row-major)  h2[n_ris]} * ris_count
/// Complex entries are stored as interleaved (re, im) f64 pairs.
inline constexpr char kTraceMagic[8] = {'R', 'I', 'S', 'N', 'E', 'T', 'R', 'C'};
inline constexpr std::uint32_t kTraceVersion = 1;

struct TraceRecord {
    std::uint64_t episode = 0;
    std::uint64_t step = 0;
    ChannelSet channels;

    bool operator==(const TraceRecord&) const = default;
};

struct ChannelTrace {
    std::size_t n_tx = 0;
    std::size_t n_ris = 0;
    std::size_t ris_count = 0;
    std::vector<TraceRecord> records;

    /// Records grouped by episode id, in order of first appearance.
    std::vector<std::vector<ChannelSet>> episodes() const;
    std::vector<ChannelSet> channel_sets() const;

    bool operator==(const ChannelTrace&) const = default;
};

void write_channel_trace(const ChannelTrace& trace, const std::filesystem::path& path);

/// Throws ParseError naming the record index on malformed input.
ChannelTrace import_channel_trace(const std::filesystem::path& path);

/// Throws InputError if the trace dimensions differ from the scenario.
void validate_trace(const ChannelTrace& trace, const ScenarioConfig& scenario);

/// Samples episodes x horizon channel sets from a scenario.
ChannelTrace sample_trace(const ScenarioConfig& scenario, std::size_t episodes, std::uint64_t seed);

} // namespace risne
