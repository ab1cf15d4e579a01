#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace netbench {

// Seeded stream with hand-rolled transforms. std::mt19937_64 output is
// pinned by the standard, but the std distributions are not, so every
// transform is spelled out here to keep traces identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Box-Muller; two draws per call, no cached spare
    double normal() {
        double u1 = 1.0 - uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

    // cumulative must be nondecreasing with back() == total weight
    size_t pick_cumulative(const std::vector<double>& cumulative) {
        double u = uniform01() * cumulative.back();
        size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (cumulative[mid] <= u) lo = mid + 1;
            else hi = mid;
        }
        return lo;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace netbench
