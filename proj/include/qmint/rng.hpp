#ifndef QMINT_RNG_HPP
#define QMINT_RNG_HPP

#include <cstdint>
#include <random>

namespace qmint {

// Seedable generator used by every probabilistic component. Raw bits come
// from std::mt19937_64 (bit-exact across platforms); derived draws are
// implemented here rather than with std::*_distribution so that fixed seeds
// reproduce identical streams regardless of standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t bits();

    // Uniform in [0, 1).
    double uniform();

    // Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller.
    double gauss();

    // Independent child stream; distinct labels give distinct streams.
    Rng derive(std::uint64_t label) const;

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace qmint

#endif
