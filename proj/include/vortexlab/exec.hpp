#pragma once

namespace vortexlab {

/// Serial is the bit-reproducible reference path; Parallel spreads target
/// loops over OpenMP threads.
enum class Exec { Serial, Parallel };

/// Number of threads Parallel mode will use (OpenMP runtime setting).
int max_threads();

/// Overrides the thread count for subsequent Parallel calls; n <= 0 is ignored.
void set_threads(int n);

}  // namespace vortexlab
