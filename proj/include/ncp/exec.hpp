#pragma once

namespace ncp {

/// Execution policy for the data-parallel kernels. Both policies produce
/// bit-identical results; Serial is the reference the tests compare against.
enum class Exec { Serial, Parallel };

/// Sets the OpenMP team size for Parallel kernels (0 leaves the runtime default).
void set_thread_count(int threads);
int thread_count();

}  // namespace ncp
