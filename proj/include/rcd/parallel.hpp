#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rcd {

/// Kernels take an execution policy so the serial loop stays available as a
/// reference for the OpenMP version (tests compare them bit for bit).
enum class Execution
{
    serial,
    parallel
};

/// Calls f(i) for i in [0, n). Each index must write only to its own output
/// slot; reductions are done afterwards in index order by the caller.
template <class F>
void for_each_index(std::size_t n, Execution exec, F&& f)
{
    if (exec == Execution::serial || n < 2)
    {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex err_mutex;
    auto const count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i)
    {
        try
        {
            f(static_cast<std::size_t>(i));
        }
        catch (...)
        {
            std::lock_guard lock(err_mutex);
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
}

inline void set_thread_count(int n)
{
#ifdef _OPENMP
    if (n > 0)
        omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace rcd
