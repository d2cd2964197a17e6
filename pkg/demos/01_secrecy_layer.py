#!/usr/bin/env python3
"""Walk through the seeded hashing layer: encode a message with fresh local
randomness, decode it back, and look at what an eavesdropper would have to
distinguish."""

import numpy as np

from wiretapsim import (
    BitVec,
    SecrecyParams,
    draw_randomness,
    draw_seed,
    secrecy_decode,
    secrecy_encode,
)

rng = np.random.default_rng(1)

# Small parameters so the structure is visible: 3-bit messages hidden in
# 10-bit words via a 3 x 7 Toeplitz hash.
p = SecrecyParams(k=3, l=10)
seed = draw_seed(p, rng)
print(f"public seed (hex a:t): {seed.to_hex()}")
print(f"hash matrix:\n{seed.matrix(p).dense()}")

m = BitVec([1, 0, 1])
print(f"\nmessage m = {m.bits}")
for trial in range(3):
    r = draw_randomness(p, rng)
    v = secrecy_encode(m, r, seed, p)
    back = secrecy_decode(v, seed, p)
    print(f"  r = {r.bits} -> v = {v.bits} -> decoded {back.bits}")
    assert back == m

# The same message maps to 2^(l-k) different words; two distinct messages
# produce disjoint sets, which is what the distinguisher has to separate.
images = {}
for m_int in (0b000, 0b111):
    msg = BitVec.from_int(m_int, 3)
    images[m_int] = {
        secrecy_encode(msg, BitVec.from_int(ri, 7), seed, p).to_int()
        for ri in range(2**7)
    }
print(f"\nimage sizes: {[len(v) for v in images.values()]}, "
      f"overlap: {len(images[0] & images[7])}")

# Production-scale parameters: one message bit per 222-bit word.
big = SecrecyParams(k=1, l=222)
seed = draw_seed(big, rng)
v = secrecy_encode(BitVec([1]), draw_randomness(big, rng), seed, big)
print(f"\nproduction parameters: k={big.k}, l={big.l}, "
      f"rate {big.secrecy_rate(256):.4f} bit/RE, word starts {v.bits[:16]}...")
