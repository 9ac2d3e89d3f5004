#pragma once

#include <array>
#include <cstdint>

namespace sngrav {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a pure function of
// (key, counter), so streams split by putting the stream id in the counter: every draw in this
// code base is addressed as (seed, stream, index) and needs no shared state.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key);

    explicit Philox4x32(std::uint64_t seed, std::uint32_t stream = 0);

    // Four 32-bit words for draw `index` of this stream.
    Block block(std::uint64_t index) const;
    // Two independent standard normals for draw `index` (Box-Muller on two 53-bit uniforms).
    std::array<double, 2> normal_pair(std::uint64_t index) const;

private:
    Key key_;
    std::uint32_t stream_;
};

}  // namespace sngrav
