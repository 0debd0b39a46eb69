#pragma once

#include <cstdint>
#include <random>

namespace bell {

/// Seedable deterministic stream. Wraps std::mt19937_64, whose output
/// sequence is fixed by the standard; doubles are built from the top 53
/// bits so the stream is identical across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  bool operator==(const RandomStream&) const = default;

 private:
  std::mt19937_64 engine_;
};

/// Child streams of one master seed. A child is seeded with
/// std::seed_seq{lo32(seed), hi32(seed), tag}, so adding a stream or
/// changing the strategy never perturbs the settings sequence.
enum class StreamTag : std::uint32_t {
  Settings = 1,
  Shared = 2,
  AliceLocal = 3,
  BobLocal = 4,
  Quantum = 5,
};

RandomStream derive_stream(std::uint64_t master_seed, StreamTag tag);

/// The child streams an experiment run consumes.
struct RunStreams {
  explicit RunStreams(std::uint64_t master_seed);

  RandomStream settings;
  RandomStream shared;
  RandomStream alice;
  RandomStream bob;
  RandomStream quantum;
};

}  // namespace bell
