#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace ude {

// splitmix64 step; used for seed mixing and deterministic hashing.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over a string, for mixing textual tokens into seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Folds a list of 64-bit words into one seed, order-sensitive.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x6C078965A3F9D421ULL;
  std::uint64_t h = 0;
  for (std::uint64_t p : parts) {
    state ^= p;
    h ^= splitmix64_next(state);
    h *= 0x2545F4914F6CDD1DULL;
    h ^= h >> 29;
  }
  return h;
}

// Deterministic random stream: std::mt19937_64 (bit-exact across platforms)
// with hand-written transforms, because the std <random> distributions are not
// portable. Every engine concern gets its own stream so draw counts in one
// concern never perturb another.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : gen_(mix_seed({seed, 0x53747265616D00ULL ^ stream_id})) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Uniform integer in [0, n), exact (Lemire's method with rejection).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // (2^64 - n) mod n
    while (true) {
      const auto wide =
          static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
      if (static_cast<std::uint64_t>(wide) >= threshold) {
        return static_cast<std::uint64_t>(wide >> 64);
      }
    }
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Gaussian via Box-Muller; always consumes exactly two uniforms, never
  // caches the second value (keeps replay independent of call history).
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]; keeps log() finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * (r * std::cos(2.0 * 3.141592653589793 * u2));
  }

  // Cauchy via inverse CDF; one uniform per draw.
  double cauchy(double loc, double scale) {
    const double u = uniform01();
    return loc + scale * std::tan(3.141592653589793 * (u - 0.5));
  }

 private:
  std::mt19937_64 gen_;
};

// The fixed set of per-trial streams. Splitting by concern keeps, e.g., the
// number of parameter draws from changing which individuals a selection picks.
enum class StreamId : std::uint64_t {
  init = 1,
  params = 2,
  selection = 3,
  crossover = 4,
  archive = 5,
  shift = 6,
};

struct TrialRngs {
  RngStream init;
  RngStream params;
  RngStream selection;
  RngStream crossover;
  RngStream archive;

  explicit TrialRngs(std::uint64_t trial_seed)
      : init(trial_seed, static_cast<std::uint64_t>(StreamId::init)),
        params(trial_seed, static_cast<std::uint64_t>(StreamId::params)),
        selection(trial_seed, static_cast<std::uint64_t>(StreamId::selection)),
        crossover(trial_seed, static_cast<std::uint64_t>(StreamId::crossover)),
        archive(trial_seed, static_cast<std::uint64_t>(StreamId::archive)) {}
};

}  // namespace ude
