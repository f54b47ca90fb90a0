#pragma once

#include <array>
#include <cstdint>

namespace truncmil {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
///
/// A keyed bijection of the 128-bit counter space. Draw k is obtained by
/// encrypting the counter that encodes k, so streams are random-access and
/// independent of evaluation order — the property the parallel Monte-Carlo
/// drivers rely on for bitwise reproducibility at any worker count.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Map a 64-bit word to the open interval (0,1), 53-bit resolution.
/// Never returns 0 or 1, so it is a safe probit argument.
double uniform_from_bits(std::uint64_t bits);

/// Inverse of the standard normal CDF (Wichura's AS 241, PPND16 variant).
/// Relative accuracy about 1e-15 over (0,1); returns +/-infinity at 1 and 0.
double normal_inverse_cdf(double p);

/// One standard-normal draw, fully determined by (key, c0..c3).
double normal_draw(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                   std::uint32_t c2, std::uint32_t c3);

/// One uniform (0,1) draw, same keying as normal_draw.
double uniform_draw(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                    std::uint32_t c2, std::uint32_t c3);

} // namespace truncmil
