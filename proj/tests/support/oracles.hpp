#pragma once

#include <string>
#include <utility>
#include <vector>

#include "macsim/linkage.hpp"

namespace macsim::test {

// Literal transcription of the linking procedure, structured as a repeated
// argmax scan instead of one sort, so it shares no code with PairRanking:
// among still-free pairs above the cutoff, link the largest weight (smallest
// (i, j) on ties), remove both records, repeat until nothing qualifies.
std::vector<std::pair<int32_t, int32_t>> oracle_greedy(const WeightMatrix& weights,
                                                       double cutoff);

std::vector<std::pair<int32_t, int32_t>> link_pairs(const LinkSet& links);

// Unique scratch directory under the system temp dir; removed by the caller.
std::string scratch_dir(const std::string& tag);
std::string read_file_bytes(const std::string& path);

}  // namespace macsim::test

namespace testsupport = macsim::test;
