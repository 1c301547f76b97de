#pragma once

#include <mutex>

namespace oscillorm {

// FFTW's planner is not thread-safe; every plan create/destroy holds this.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace oscillorm
