#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace brt {

/// Global worker-thread count used by parallel loops. 0 means "use the
/// hardware concurrency". Results never depend on this value: every output
/// slot is produced by exactly one deterministic serial computation, and
/// reductions use fixed block boundaries.
int global_thread_count();
void set_global_thread_count(int threads);

/// Static-chunked parallel loop over [0, n). Each index is processed exactly
/// once; fn must write only to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Chunk-at-a-time variant (fn gets [begin, end)); cheaper for tight loops.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn);

/// Sum with a fixed-tree reduction: values are summed serially inside fixed
/// 4096-element blocks (blocks evaluated in parallel), then the block sums
/// are combined pairwise in index order. Bit-identical for any thread count.
double deterministic_sum(std::span<const double> values);

/// deterministic_sum of the elementwise product a[i]*b[i].
double deterministic_dot(std::span<const double> a, std::span<const double> b);

/// Serial pairwise tree combine, exposed for reuse by the solvers.
double pairwise_tree_sum(std::vector<double>& partials);

}  // namespace brt
