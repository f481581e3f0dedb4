#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "vforge/complex_util.hpp"

namespace vforge {

/* Van der Corput radical inverse in the given base. */
inline double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, x = 0.0;
    while (index > 0) {
        x += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return x;
}

/* Deterministic low-discrepancy stream: the j-th sample of stream `seed`
 * is the Halton (2,3) pair at index seed * kStreamStride + j + 1.  A fixed
 * seed therefore yields a fixed sequence, and taking a longer prefix only
 * ever appends points (sample-monotone checks rely on this). */
inline constexpr std::uint64_t kStreamStride = 0x40000000ull; // 2^30 per stream

struct HaltonStream {
    std::uint64_t base_index;

    explicit HaltonStream(std::uint64_t seed) : base_index(seed * kStreamStride + 1) {}

    /* j-th pair (u, v) in [0,1)^2. */
    void pair(std::size_t j, double& u, double& v) const {
        u = radical_inverse(base_index + j, 2);
        v = radical_inverse(base_index + j, 3);
    }
};

/* Area-uniform point of the open disk D(center, radius). */
inline cplx sample_disk(const HaltonStream& s, std::size_t j, cplx center, double radius) {
    double u, v;
    s.pair(j, u, v);
    double r = radius * std::sqrt(u);
    double th = 2.0 * kPi * v;
    return center + cplx(r * std::cos(th), r * std::sin(th));
}

/* Area-uniform point of the closed upper half-disk over a real center:
 * angles in [0, pi], Im >= 0 (the diameter itself is reachable). */
inline cplx sample_half_disk(const HaltonStream& s, std::size_t j, double center, double radius) {
    double u, v;
    s.pair(j, u, v);
    double r = radius * std::sqrt(u);
    double th = kPi * v;
    return cplx(center + r * std::cos(th), r * std::sin(th));
}

/* Area-uniform point of the closed upper half-annulus r_in <= |z-c| <= r_out. */
inline cplx sample_half_annulus(const HaltonStream& s, std::size_t j, double center,
                                double r_in, double r_out) {
    double u, v;
    s.pair(j, u, v);
    double r = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
    double th = kPi * v;
    return cplx(center + r * std::cos(th), r * std::sin(th));
}

/* Boundary of the full disk. */
inline cplx sample_circle(const HaltonStream& s, std::size_t j, cplx center, double radius) {
    double u, v;
    s.pair(j, u, v);
    double th = 2.0 * kPi * v;
    return center + cplx(radius * std::cos(th), radius * std::sin(th));
}

/* Boundary of the closed upper half-disk: arc and diameter alternate by
 * arc-length weight (arc pi*r, diameter 2r). */
inline cplx sample_half_disk_boundary(const HaltonStream& s, std::size_t j, double center,
                                      double radius) {
    double u, v;
    s.pair(j, u, v);
    double arc_frac = kPi / (kPi + 2.0);
    if (u < arc_frac) {
        double th = kPi * v;
        return cplx(center + radius * std::cos(th), radius * std::sin(th));
    }
    return cplx(center + radius * (2.0 * v - 1.0), 0.0);
}

/* Boundary of the closed upper half-annulus: outer arc, inner arc, and the
 * two real segments [-r_out,-r_in], [r_in,r_out], weighted by length. */
inline cplx sample_half_annulus_boundary(const HaltonStream& s, std::size_t j, double center,
                                         double r_in, double r_out) {
    double u, v;
    s.pair(j, u, v);
    double len_outer = kPi * r_out, len_inner = kPi * r_in, len_seg = r_out - r_in;
    double total = len_outer + len_inner + 2.0 * len_seg;
    double pick = u * total;
    if (pick < len_outer) {
        double th = kPi * v;
        return cplx(center + r_out * std::cos(th), r_out * std::sin(th));
    }
    pick -= len_outer;
    if (pick < len_inner) {
        double th = kPi * v;
        return cplx(center + r_in * std::cos(th), r_in * std::sin(th));
    }
    pick -= len_inner;
    double x = r_in + v * (r_out - r_in);
    if (pick < len_seg) return cplx(center + x, 0.0);
    return cplx(center - x, 0.0);
}

} // namespace vforge
