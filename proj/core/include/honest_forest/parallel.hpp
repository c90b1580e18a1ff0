#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace honest_forest {

// Worker count: an explicit request wins, then the HONEST_FOREST_THREADS
// environment variable, then hardware concurrency. Always at least 1.
unsigned resolve_thread_count(unsigned requested = 0);

// Runs fn(i) for every i in [0, count). Work items must be independent and
// write only to index-addressed slots, which makes results identical for
// any worker count. Exceptions are captured and rethrown on the caller.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

// Pairwise (tree) summation: deterministic and more accurate than a plain
// left fold on long error vectors.
double pairwise_sum(const double* data, std::size_t count);
double pairwise_sum(const std::vector<double>& data);

}  // namespace honest_forest
