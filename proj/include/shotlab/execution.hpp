#pragma once

namespace shotlab {

// Kernels with a data-parallel loop come in two flavours. Serial is the
// reference path; Parallel distributes the loop with OpenMP and must produce
// bit-identical results.
enum class Execution { Serial, Parallel };

} // namespace shotlab
