#pragma once
// Execution policy for the data-parallel kernels. Serial is the reference
// path used by the differential tests; OpenMP is the production path.

namespace cognet {

enum class ExecPolicy { Serial, OpenMP };

// Honors COGNET_THREADS (caps OpenMP team size). Returns the effective cap.
int apply_thread_cap();

// Threads that would be used by a parallel region right now.
int effective_threads();

} // namespace cognet
