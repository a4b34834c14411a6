#include "bibcite/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bibcite {

ExecutionMode default_execution_mode() {
#ifdef _OPENMP
  return ExecutionMode::parallel;
#else
  return ExecutionMode::serial;
#endif
}

int available_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace bibcite
