// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <vector>

#include "risne/policy.hpp"

namespace risne {

/// "RISNEGNM"  u32 version  u64 layout fingerprint  u64 M  f64[M]
void save_genome(const std::filesystem::path& path, const GenomeLayout& layout, std::span<const double> genome);

/// Throws ParseError on malformed files and InputError when the stored layout
/// fingerprint or length differs from `layout`.
std::vector<double> load_genome(const std::filesystem::path& path, const GenomeLayout& layout);

} // namespace risne
