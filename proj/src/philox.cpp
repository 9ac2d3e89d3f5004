#include "sngrav/philox.hpp"

#include <cmath>

#include "sngrav/constants.hpp"

namespace sngrav {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;

// Uniform on (0, 1] from 53 bits; never 0, so the logarithm below is finite.
double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 1.0) * 0x1p-53;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block c, Key k) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

Philox4x32::Block Philox4x32::block(std::uint64_t index) const {
    return generate({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream_, 0u}, key_);
}

std::array<double, 2> Philox4x32::normal_pair(std::uint64_t index) const {
    const auto b = block(index);
    const double u1 = to_unit(b[0], b[1]), u2 = to_unit(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1)), a = constants::two_pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace sngrav
