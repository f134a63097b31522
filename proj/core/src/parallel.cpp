#include "bagvar/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bagvar {
namespace {

std::atomic<std::size_t> g_override{0};
thread_local bool t_inside_worker = false;

std::size_t default_threads() {
  if (const char* env = std::getenv("BAGVAR_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() {
  const std::size_t forced = g_override.load();
  return forced > 0 ? forced : default_threads();
}

void set_thread_count(std::size_t threads) { g_override.store(threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> first_failure(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      t_inside_worker = true;
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          errors[w] = std::current_exception();
          first_failure[w] = i;
          return;
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();

  // chunks are ordered, so the first failing chunk holds the lowest index
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
  }
}

}  // namespace bagvar
