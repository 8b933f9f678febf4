#pragma once

#include <functional>

namespace owbf {

// Caps the worker count used by every parallel loop in the library.
// n <= 0 restores the default (all hardware threads).
void set_max_threads(int n);
int max_threads();

// Runs body(begin, end) over disjoint row ranges covering [0, rows).
// Callers must make each output sample depend only on its own row's work so
// results are identical for any thread count.
void parallel_rows(int rows, const std::function<void(int, int)>& body);

// Runs body(i) for every i in [0, count), one task per index.
void parallel_tasks(int count, const std::function<void(int)>& body);

}  // namespace owbf
