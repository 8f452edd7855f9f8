#include "fitcrf/parallel.hpp"

#include <atomic>

namespace fitcrf {

namespace {
std::atomic<int> g_threads{0};
}

void set_max_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int configured_threads() {
    const int n = g_threads.load();
    return n == 0 ? max_threads() : n;
}

}  // namespace fitcrf
