#ifndef CONOSHOCK_PARALLEL_HPP
#define CONOSHOCK_PARALLEL_HPP

#include <functional>

namespace conoshock {

// Worker cap: CONOSHOCK_THREADS env var, else hardware concurrency.
int worker_count();
void set_worker_cap(int n);  // overrides the env var (tests)

// Runs fn(i) for i in [0, n); work is split across workers when the cap
// allows. Writes of distinct i must not alias.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace conoshock

#endif
