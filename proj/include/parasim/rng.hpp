// Counter-based random number generator (Philox4x32-10) with keyed streams.
//
// Replicate streams are derived as seed_stream(master, replicate): the master
// seed becomes the Philox key and the replicate index is folded into the upper
// 64 bits of the 128-bit counter.  Streams are therefore disjoint counter
// ranges of one keyed permutation family: no stream can collide with another
// for any (master, replicate) pair, and every draw is reproducible from
// (master, replicate, draw index) alone.  All variate generation below is
// implemented on top of the raw 64-bit output so results are bit-stable
// across standard library versions.

#pragma once

#include <cmath>
#include <cstdint>

namespace parasim {

class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(uint64_t master, uint64_t stream) {
    key_[0] = static_cast<uint32_t>(master);
    key_[1] = static_cast<uint32_t>(master >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<uint32_t>(stream);
    ctr_[3] = static_cast<uint32_t>(stream >> 32);
    have_ = 0;
  }

  uint64_t u64() {
    if (have_ == 0) refill();
    --have_;
    return out_[have_];
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(u64() >> 11) * kInv53; }

  // Uniform on (0,1]: never returns 0, safe under log().
  double uniform_pos() {
    return static_cast<double>((u64() >> 11) + 1) * kInv53;
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n), n >= 1 (rejection against the wrap residue).
  uint64_t below(uint64_t n) {
    const uint64_t residue = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t x = u64();
      if (x >= residue) return x % n;
    }
  }

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

  static void mulhilo(uint32_t a, uint32_t b, uint32_t* hi, uint32_t* lo) {
    const uint64_t p = static_cast<uint64_t>(a) * static_cast<uint64_t>(b);
    *hi = static_cast<uint32_t>(p >> 32);
    *lo = static_cast<uint32_t>(p);
  }

  void refill() {
    uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, &hi0, &lo0);
      mulhilo(0xCD9E8D57u, c2, &hi1, &lo1);
      const uint32_t n0 = hi1 ^ c1 ^ k0;
      const uint32_t n1 = lo1;
      const uint32_t n2 = hi0 ^ c3 ^ k1;
      const uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;  // golden ratio increment
      k1 += 0xBB67AE85u;  // sqrt(3)-1 increment
    }
    out_[0] = (static_cast<uint64_t>(c1) << 32) | c0;
    out_[1] = (static_cast<uint64_t>(c3) << 32) | c2;
    have_ = 2;
    // Advance the per-stream 64-bit block counter; the stream id in
    // ctr_[2..3] is never touched, keeping streams disjoint.
    if (++ctr_[0] == 0) ++ctr_[1];
  }

  uint32_t key_[2];
  uint32_t ctr_[4];
  uint64_t out_[2];
  int have_;
};

// Collision-free derivation of the RNG stream for one replicate.
inline Rng seed_stream(uint64_t master_seed, uint64_t replicate_index) {
  return Rng(master_seed, replicate_index);
}

}  // namespace parasim
