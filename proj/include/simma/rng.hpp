#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace simma {

// splitmix64; used to expand one master seed into independent per-path seeds
// so path i gets the same stream no matter how many paths run before it or on
// which thread it lands.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t path_seed(std::uint64_t master, std::uint64_t path_index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (path_index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    std::uint64_t b = splitmix64(s);
    (void)splitmix64(s);
    return b ^ s;
}

// Thin deterministic stream over mt19937_64. All variate transforms are done
// by hand so the byte stream does not depend on library internals.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    static RngStream for_path(std::uint64_t master, std::uint64_t path_index) {
        return RngStream(path_seed(master, path_index));
    }

    // 53-bit uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard exponential, strictly positive
    double exponential() { return -std::log1p(-uniform01()); }

    // fair +1/-1
    int sign() { return (gen_() >> 63) ? 1 : -1; }

    // standard normal via Box-Muller (one value per two uniforms)
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // index into a cumulative-weight table (strictly increasing, back() = total)
    std::size_t categorical(const std::vector<double>& cumulative) {
        double u = uniform01() * cumulative.back();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cumulative[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace simma
