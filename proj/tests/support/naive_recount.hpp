#pragma once

#include <map>
#include <string>
#include <vector>

#include "vulncat/taxonomy.hpp"

namespace vulncat::testing {

using Counts = std::map<std::string, std::size_t>;

/// Counts values of `dimension` straight from raw `.vuln` texts with plain
/// string scanning. Shares no code with the parser or the analysis module;
/// only the vocabulary lists are used, to tell functionalities from flaws.
Counts naive_recount(const std::vector<std::string>& raw_entries, Dimension dimension);

}  // namespace vulncat::testing
