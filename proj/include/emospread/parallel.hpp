#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace emospread {

inline unsigned default_thread_count() {
	unsigned n = std::thread::hardware_concurrency();
	return n == 0 ? 1 : n;
}

/// Runs fn(i) for i in [0, count) over `threads` workers using a static
/// strided partition. fn must only write to slot i of its outputs, which
/// makes the result independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn) {
	threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
	if (threads == 1) {
		for (std::size_t i = 0; i < count; ++i)
			fn(i);
		return;
	}
	std::exception_ptr first_error;
	std::mutex error_mutex;
	std::vector<std::thread> workers;
	workers.reserve(threads);
	for (unsigned t = 0; t < threads; ++t) {
		workers.emplace_back([&, t] {
			try {
				for (std::size_t i = t; i < count; i += threads)
					fn(i);
			} catch (...) {
				std::lock_guard lock(error_mutex);
				if (!first_error)
					first_error = std::current_exception();
			}
		});
	}
	for (auto &w : workers)
		w.join();
	if (first_error)
		std::rethrow_exception(first_error);
}

} // namespace emospread
