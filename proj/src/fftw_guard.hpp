#pragma once

#include <mutex>

namespace sngrav::detail {

// FFTW's planner is not thread-safe; plan creation and destruction take this lock, execution does not.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace sngrav::detail
