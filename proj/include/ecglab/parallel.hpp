#pragma once

#include <cstddef>
#include <functional>

namespace ecglab {

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write only to their own slot; callers aggregate afterwards in index order,
/// which keeps results independent of scheduling and worker count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace ecglab
