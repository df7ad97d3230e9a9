#include "credaug/parallel.hpp"

#include <atomic>

namespace credaug {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) noexcept { g_threads.store(n < 1 ? 1 : n); }

int num_threads() noexcept { return g_threads.load(); }

}  // namespace credaug
