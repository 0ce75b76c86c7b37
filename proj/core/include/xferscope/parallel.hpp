#pragma once

#include <cstddef>
#include <functional>

namespace xferscope {

/// 0 means one worker per hardware thread.
std::size_t resolve_threads(std::size_t requested) noexcept;

/// Runs body(i) for every i in [0, n_items) on up to `threads` workers. Items
/// must write only to their own output slots. Every item runs even if others
/// throw; afterwards the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n_items, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace xferscope
