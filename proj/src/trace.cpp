// SPDX-License-Identifier: Apache-2.0
#include "risne/trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

namespace risne {

static_assert(std::endian::native == std::endian::little, "trace I/O assumes a little-endian host");

std::vector<std::vector<ChannelSet>> ChannelTrace::episodes() const
{
    std::vector<std::vector<ChannelSet>> out;
    std::map<std::uint64_t, std::size_t> slot;
    for (const auto& rec : records) {
        auto [it, inserted] = slot.try_emplace(rec.episode, out.size());
        if (inserted) {
            out.emplace_back();
        }
        out[it->second].push_back(rec.channels);
    }
    return out;
}

std::vector<ChannelSet> ChannelTrace::channel_sets() const
{
    std::vector<ChannelSet> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        out.push_back(rec.channels);
    }
    return out;
}

namespace {

template <typename T>
void put(std::ostream& out, T value)
{
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put_matrix(std::ostream& out, const ComplexMatrix& m)
{
    for (const Complex& c : m.values()) {
        put(out, c.real());
        put(out, c.imag());
    }
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T get(const std::string& what)
    {
        T value{};
        if (!in_.read(reinterpret_cast<char*>(&value), sizeof(T))) {
            throw ParseError(context_ + "unexpected end of file while reading " + what);
        }
        return value;
    }

    ComplexMatrix matrix(std::size_t rows, std::size_t cols, const std::string& what)
    {
        ComplexMatrix m(rows, cols);
        for (Complex& c : m.data()) {
            const double re = get<double>(what);
            const double im = get<double>(what);
            c = {re, im};
        }
        return m;
    }

    void set_context(std::string ctx) { context_ = std::move(ctx); }

private:
    std::istream& in_;
    std::string context_;
};

} // namespace

void write_channel_trace(const ChannelTrace& trace, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write trace file '" + path.string() + "'");
    }
    out.write(kTraceMagic, sizeof(kTraceMagic));
    put(out, kTraceVersion);
    put(out, static_cast<std::uint32_t>(trace.n_tx));
    put(out, static_cast<std::uint32_t>(trace.n_ris));
    put(out, static_cast<std::uint32_t>(trace.ris_count));
    put(out, static_cast<std::uint64_t>(trace.records.size()));
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& rec = trace.records[i];
        const ChannelSet& cs = rec.channels;
        if (cs.n_tx() != trace.n_tx || cs.ris_count() != trace.ris_count || cs.n_ris() != trace.n_ris ||
            cs.h.cols() != 1) {
            throw InputError("write_channel_trace: record " + std::to_string(i) + " does not match trace dims");
        }
        put(out, rec.episode);
        put(out, rec.step);
        put_matrix(out, cs.h);
        for (std::size_t k = 0; k < trace.ris_count; ++k) {
            put_matrix(out, cs.h1[k]);
            put_matrix(out, cs.h2[k]);
        }
    }
    if (!out) {
        throw std::runtime_error("error writing trace file '" + path.string() + "'");
    }
}

ChannelTrace import_channel_trace(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open trace file '" + path.string() + "'");
    }
    Reader r(in);
    r.set_context(path.string() + ": header: ");
    char magic[sizeof(kTraceMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0) {
        throw ParseError(path.string() + ": not a channel trace (bad magic)");
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kTraceVersion) {
        throw ParseError(path.string() + ": unsupported trace version " + std::to_string(version));
    }
    ChannelTrace trace;
    trace.n_tx = r.get<std::uint32_t>("n_tx");
    trace.n_ris = r.get<std::uint32_t>("n_ris");
    trace.ris_count = r.get<std::uint32_t>("ris_count");
    const auto count = r.get<std::uint64_t>("record count");
    if (trace.n_tx == 0 || trace.n_ris == 0 || trace.ris_count == 0) {
        throw ParseError(path.string() + ": header declares a zero dimension");
    }
    // Guard against absurd counts before reserving.
    trace.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 16)));
    for (std::uint64_t i = 0; i < count; ++i) {
        r.set_context(path.string() + ": record " + std::to_string(i) + ": ");
        TraceRecord rec;
        rec.episode = r.get<std::uint64_t>("episode");
        rec.step = r.get<std::uint64_t>("step");
        rec.channels.h = r.matrix(trace.n_tx, 1, "h");
        for (std::size_t k = 0; k < trace.ris_count; ++k) {
            rec.channels.h1.push_back(r.matrix(trace.n_tx, trace.n_ris, "H1"));
            rec.channels.h2.push_back(r.matrix(trace.n_ris, 1, "h2"));
        }
        std::vector<const ComplexMatrix*> parts{&rec.channels.h};
        for (std::size_t k = 0; k < trace.ris_count; ++k) {
            parts.push_back(&rec.channels.h1[k]);
            parts.push_back(&rec.channels.h2[k]);
        }
        for (const ComplexMatrix* m : parts) {
            for (const Complex& c : m->values()) {
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                    throw ParseError(path.string() + ": record " + std::to_string(i) + ": non-finite value");
                }
            }
        }
        trace.records.push_back(std::move(rec));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ParseError(path.string() + ": trailing bytes after record " + std::to_string(count));
    }
    return trace;
}

void validate_trace(const ChannelTrace& trace, const ScenarioConfig& scenario)
{
    if (trace.n_tx != scenario.n_tx || trace.n_ris != scenario.n_ris || trace.ris_count != scenario.ris_count()) {
        throw InputError("trace dims (n_tx " + std::to_string(trace.n_tx) + ", n_ris " + std::to_string(trace.n_ris) +
                         ", ris_count " + std::to_string(trace.ris_count) + ") do not match scenario (n_tx " +
                         std::to_string(scenario.n_tx) + ", n_ris " + std::to_string(scenario.n_ris) +
                         ", ris_count " + std::to_string(scenario.ris_count()) + ")");
    }
    if (trace.records.empty()) {
        throw InputError("trace has no records");
    }
}

ChannelTrace sample_trace(const ScenarioConfig& scenario, std::size_t episodes, std::uint64_t seed)
{
    const ChannelModel model(scenario);
    ChannelTrace trace;
    trace.n_tx = scenario.n_tx;
    trace.n_ris = scenario.n_ris;
    trace.ris_count = scenario.ris_count();
    for (std::size_t e = 0; e < episodes; ++e) {
        Rng rng(derive_seed(seed, {e}));
        for (std::size_t t = 0; t < scenario.horizon; ++t) {
            trace.records.push_back({e, t, model.sample(rng)});
        }
    }
    return trace;
}

} // namespace risne
