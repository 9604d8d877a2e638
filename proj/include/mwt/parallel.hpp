#pragma once

// Minimal fork-join helper. Work items are independent and write to their
// own output slots, so results never depend on the thread count. Calls made
// from inside a worker run serially.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace mwt {

/// 0 selects std::thread::hardware_concurrency().
void set_thread_count(int n);
int thread_count();

/// Runs fn(0..count-1). If any call throws, the exception of the lowest
/// failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// 64-bit FNV-1a, used for content-hash cache keys.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace mwt
