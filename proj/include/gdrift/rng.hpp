#pragma once

#include <array>
#include <cstdint>

namespace gdrift {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// splitmix64 finalizer; used to derive independent seeds for sub-simulations.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Counter-based random stream. The key is the seed, the high counter words hold
/// the path index and the low words count blocks, so (seed, path_index) fully
/// determines the sequence and distinct path indices never share a block.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t path_index);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_index() const noexcept { return path_index_; }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::uint32_t next_word();

    std::uint64_t seed_;
    std::uint64_t path_index_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gdrift
