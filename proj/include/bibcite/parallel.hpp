#pragma once

namespace bibcite {

/// Batch kernels ship in two equivalent implementations: a serial reference
/// path and an OpenMP path. Tests pin both to identical outputs; the
/// benchmark tool compares their throughput.
enum class ExecutionMode { serial, parallel };

/// Parallel when the build has OpenMP, serial otherwise.
ExecutionMode default_execution_mode();

int available_threads();

}  // namespace bibcite
