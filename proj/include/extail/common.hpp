#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace extail {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy drives the CLI exit codes: InputError -> 1,
// EstimationError -> 2, anything else -> 3.
class InputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
    using std::logic_error::logic_error;
};

class CyclicGraphError : public InputError {
public:
    explicit CyclicGraphError(std::string msg, std::vector<int> cycle = {})
        : InputError(std::move(msg)), cycle(std::move(cycle)) {}
    std::vector<int> cycle;
};

class InsufficientExceedances : public EstimationError {
public:
    InsufficientExceedances(long got, long required)
        : EstimationError("insufficient exceedances: got " + std::to_string(got) +
                          ", need at least " + std::to_string(required)),
          got(got),
          required(required) {}
    long got;
    long required;
};

class ConditioningSetError : public EstimationError {
public:
    explicit ConditioningSetError(const std::vector<int>& set)
        : EstimationError("singular conditioning block for S=" + format(set)),
          conditioning_set(set) {}
    std::vector<int> conditioning_set;

private:
    static std::string format(const std::vector<int>& set) {
        std::string out = "{";
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (k > 0) out += ",";
            out += std::to_string(set[k]);
        }
        return out + "}";
    }
};

/// Seeded random source. Uniform draws are derived from the raw engine output
/// (top 53 bits) so streams are identical across standard libraries.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    // u in [0, 1)
    double u01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

    // splitmix64 finalizer
    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    // Independent stream for a replicate: master xor index pushed through mix64.
    static Rng split(std::uint64_t master, std::uint64_t index) {
        return Rng(mix64(master ^ index));
    }
};

/// Runs fn(0..count-1) on up to `threads` workers. Each index writes only its
/// own slot, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace extail
