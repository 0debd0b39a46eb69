#include "bell/random.hpp"

namespace bell {

RandomStream derive_stream(std::uint64_t master_seed, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return RandomStream(seq);
}

RunStreams::RunStreams(std::uint64_t master_seed)
    : settings(derive_stream(master_seed, StreamTag::Settings)),
      shared(derive_stream(master_seed, StreamTag::Shared)),
      alice(derive_stream(master_seed, StreamTag::AliceLocal)),
      bob(derive_stream(master_seed, StreamTag::BobLocal)),
      quantum(derive_stream(master_seed, StreamTag::Quantum)) {}

}  // namespace bell
