// SPDX-License-Identifier: Apache-2.0
#include "risne/genome_io.hpp"

#include <cstring>
#include <fstream>
#include <string>

namespace risne {

namespace {

constexpr char kMagic[8] = {'R', 'I', 'S', 'N', 'E', 'G', 'N', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T read_value(std::istream& in, const std::filesystem::path& path)
{
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw ParseError(path.string() + ": truncated genome file");
    }
    return v;
}

} // namespace

void save_genome(const std::filesystem::path& path, const GenomeLayout& layout, std::span<const double> genome)
{
    if (genome.size() != layout.total()) {
        throw InputError("save_genome: genome length does not match layout");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write genome file '" + path.string() + "'");
    }
    const std::uint64_t fp = layout.fingerprint();
    const std::uint64_t m = genome.size();
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
    out.write(reinterpret_cast<const char*>(&fp), sizeof(fp));
    out.write(reinterpret_cast<const char*>(&m), sizeof(m));
    out.write(reinterpret_cast<const char*>(genome.data()), static_cast<std::streamsize>(m * sizeof(double)));
    if (!out) {
        throw std::runtime_error("error writing genome file '" + path.string() + "'");
    }
}

std::vector<double> load_genome(const std::filesystem::path& path, const GenomeLayout& layout)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open genome file '" + path.string() + "'");
    }
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError(path.string() + ": not a genome file");
    }
    if (read_value<std::uint32_t>(in, path) != kVersion) {
        throw ParseError(path.string() + ": unsupported genome version");
    }
    const auto fp = read_value<std::uint64_t>(in, path);
    const auto m = read_value<std::uint64_t>(in, path);
    if (fp != layout.fingerprint() || m != layout.total()) {
        throw InputError(path.string() + ": genome was saved for a different architecture (" + std::to_string(m) +
                         " weights, expected " + std::to_string(layout.total()) + ")");
    }
    std::vector<double> genome(m);
    if (!in.read(reinterpret_cast<char*>(genome.data()), static_cast<std::streamsize>(m * sizeof(double)))) {
        throw ParseError(path.string() + ": truncated genome file");
    }
    return genome;
}

} // namespace risne
