#pragma once

#include <exception>
#include <mutex>

#include "nsq/types.hpp"

namespace nsq {

// Runs f(0..n-1); the first exception thrown by any iteration is rethrown.
template <class F>
void for_each_index(Exec exec, int n, F&& f) {
  if (exec == Exec::serial) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lk(m);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace nsq
