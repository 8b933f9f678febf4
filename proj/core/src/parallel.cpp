#include "owbf/parallel.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <thread>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

namespace owbf {

namespace {

std::mutex g_mutex;
std::unique_ptr<tbb::global_control> g_control;
int g_threads = 0;

}  // namespace

void set_max_threads(int n) {
  std::lock_guard lock(g_mutex);
  g_control.reset();
  g_threads = n > 0 ? n : 0;
  if (g_threads > 0) {
    g_control = std::make_unique<tbb::global_control>(
        tbb::global_control::max_allowed_parallelism, static_cast<std::size_t>(g_threads));
  }
}

int max_threads() {
  std::lock_guard lock(g_mutex);
  if (g_threads > 0) return g_threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_rows(int rows, const std::function<void(int, int)>& body) {
  if (rows <= 0) return;
  if (max_threads() == 1 || rows < 4) {
    body(0, rows);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<int>(0, rows),
                    [&](const tbb::blocked_range<int>& r) { body(r.begin(), r.end()); });
}

void parallel_tasks(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (max_threads() == 1 || count == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<int>(0, count, 1), [&](const tbb::blocked_range<int>& r) {
    for (int i = r.begin(); i < r.end(); ++i) body(i);
  });
}

}  // namespace owbf
