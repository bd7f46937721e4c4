// SPDX-License-Identifier: Apache-2.0
#include "risne/policy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace risne {

std::size_t Segment::size() const
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void GenomeLayout::add(std::string name, std::vector<std::size_t> shape)
{
    if (contains(name)) {
        throw InputError("GenomeLayout: duplicate segment " + name);
    }
    Segment seg{std::move(name), total_, std::move(shape)};
    total_ += seg.size();
    segments_.push_back(std::move(seg));
}

const Segment& GenomeLayout::at(const std::string& name) const
{
    auto it = std::find_if(segments_.begin(), segments_.end(), [&](const Segment& s) { return s.name == name; });
    if (it == segments_.end()) {
        throw InputError("GenomeLayout: no segment named " + name);
    }
    return *it;
}

bool GenomeLayout::contains(const std::string& name) const
{
    return std::any_of(segments_.begin(), segments_.end(), [&](const Segment& s) { return s.name == name; });
}

std::span<const double> GenomeLayout::slice(std::span<const double> genome, const std::string& name) const
{
    const Segment& seg = at(name);
    return genome.subspan(seg.offset, seg.size());
}

MatrixView GenomeLayout::matrix(std::span<const double> genome, const std::string& name) const
{
    const Segment& seg = at(name);
    if (seg.shape.size() != 2) {
        throw InputError("GenomeLayout: segment " + name + " is not a matrix");
    }
    return MatrixView(genome.subspan(seg.offset, seg.size()), seg.shape[0], seg.shape[1]);
}

std::uint64_t GenomeLayout::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (const Segment& seg : segments_) {
        for (char c : seg.name) {
            mix(static_cast<unsigned char>(c));
        }
        mix(0);
        for (std::size_t dim : seg.shape) {
            for (int b = 0; b < 8; ++b) {
                mix((static_cast<std::uint64_t>(dim) >> (8 * b)) & 0xff);
            }
        }
        mix(0xff);
    }
    return h;
}

std::size_t select_index(std::span<const double> probs, Rng& rng, SelectMode mode)
{
    if (probs.empty()) {
        throw InputError("select_index: empty distribution");
    }
    if (mode == SelectMode::argmax) {
        return argmax(probs);
    }
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) {
            return i;
        }
    }
    // Rounding can leave the total a hair below 1; fall back to the last
    // index with non-zero mass.
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return i;
        }
    }
    return probs.size() - 1;
}

void Policy::check_genome(std::span<const double> genome) const
{
    if (genome.size() != layout().total()) {
        throw InputError(kind() + ": genome has " + std::to_string(genome.size()) + " entries, layout expects " +
                         std::to_string(layout().total()));
    }
}

PolicyOutput RisAgentPolicy::act(std::span<const double> genome, const ChannelSet& cs, Rng& rng,
                                 SelectMode mode) const
{
    if (cs.ris_count() != 1) {
        throw InputError(kind() + ": single-RIS policy applied to " + std::to_string(cs.ris_count()) + " RIS");
    }
    return forward(genome, cs, 0, rng, mode);
}

} // namespace risne
