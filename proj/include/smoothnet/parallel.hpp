#pragma once

namespace smoothnet {

// Worker count for OpenMP regions: omp_get_max_threads(), optionally capped
// by the SMOOTHNET_THREADS environment variable. Always >= 1; returns 1 when
// built without OpenMP.
int worker_count();

} // namespace smoothnet
