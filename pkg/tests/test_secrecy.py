import itertools

import numpy as np
import pytest
from scipy import stats

from wiretapsim.gf2 import BitVec
from wiretapsim.secrecy import (
    SecrecyParams,
    SecrecySeed,
    draw_randomness,
    draw_seed,
    secrecy_decode,
    secrecy_encode,
)


def test_params_validation():
    with pytest.raises(ValueError):
        SecrecyParams(k=0, l=4)
    with pytest.raises(ValueError):
        SecrecyParams(k=5, l=4)
    assert SecrecyParams(k=1, l=222).randomness_len == 221
    assert SecrecyParams(k=1, l=222).secrecy_rate(256) == pytest.approx(1 / 128)


def test_encode_hand_example():
    # k=2, l=4, a=(1,0,1), t=(0,1), r=(1,1), m=(1,0) -> v=(1,1,0,0)
    p = SecrecyParams(k=2, l=4)
    seed = SecrecySeed(a=BitVec([1, 0, 1]), t=BitVec([0, 1]))
    v = secrecy_encode(BitVec([1, 0]), BitVec([1, 1]), seed, p)
    assert v == BitVec([1, 1, 0, 0])
    assert secrecy_decode(v, seed, p) == BitVec([1, 0])


def test_zero_seed_passthrough():
    p = SecrecyParams(k=3, l=8)
    seed = SecrecySeed(a=BitVec.zeros(7), t=BitVec.zeros(3))
    rng = np.random.default_rng(0)
    m = BitVec.random(3, rng)
    r = BitVec.random(5, rng)
    v = secrecy_encode(m, r, seed, p)
    assert v == r.concat(m)
    assert secrecy_decode(r.concat(m), seed, p) == m


def test_homogeneous_case():
    p = SecrecyParams(k=2, l=6)
    rng = np.random.default_rng(1)
    seed = SecrecySeed(a=BitVec.random(5, rng), t=BitVec.zeros(2))
    r = BitVec.random(4, rng)
    v = secrecy_encode(BitVec.zeros(2), r, seed, p)
    assert v == r.concat(seed.matrix(p).matvec(r))


def test_round_trip_small_params():
    rng = np.random.default_rng(2)
    for k, l in [(1, 2), (1, 8), (3, 8), (7, 8), (4, 13)]:
        p = SecrecyParams(k=k, l=l)
        for _ in range(200):
            seed = draw_seed(p, rng)
            m = BitVec.random(k, rng)
            r = draw_randomness(p, rng)
            assert secrecy_decode(secrecy_encode(m, r, seed, p), seed, p) == m


def test_length_validation():
    p = SecrecyParams(k=2, l=4)
    seed = SecrecySeed(a=BitVec([1, 0, 1]), t=BitVec([0, 1]))
    with pytest.raises(ValueError):
        secrecy_encode(BitVec([1]), BitVec([1, 1]), seed, p)
    with pytest.raises(ValueError):
        secrecy_encode(BitVec([1, 0]), BitVec([1]), seed, p)
    with pytest.raises(ValueError):
        secrecy_decode(BitVec([1, 0, 1]), seed, p)


def test_deterministic_encoder_when_l_equals_k():
    p = SecrecyParams(k=2, l=2)
    seed = SecrecySeed(a=BitVec([1]), t=BitVec([1, 0]))
    m = BitVec([0, 1])
    v = secrecy_encode(m, None, seed, p)
    assert v == m ^ seed.t
    assert secrecy_decode(v, seed, p) == m


def test_seed_draw_reproducible_and_distinct():
    p = SecrecyParams(k=1, l=222)
    s1 = draw_seed(p, np.random.default_rng(77))
    s2 = draw_seed(p, np.random.default_rng(77))
    s3 = draw_seed(p, np.random.default_rng(78))
    assert s1 == s2
    assert s1 != s3


def test_seed_hex_round_trip():
    p = SecrecyParams(k=1, l=222)
    seed = draw_seed(p, np.random.default_rng(5))
    assert SecrecySeed.from_hex(seed.to_hex(), p) == seed


def test_seed_bits_uniform_chi2():
    # each bit position ~ Bernoulli(1/2); chi-square over positions at alpha=0.01
    p = SecrecyParams(k=3, l=19)
    rng = np.random.default_rng(123)
    n_draws = 10_000
    counts = np.zeros(p.l - 1 + p.k)
    for _ in range(n_draws):
        s = draw_seed(p, rng)
        counts += np.concatenate([s.a.bits, s.t.bits])
    chi2 = np.sum((2 * counts - n_draws) ** 2) / n_draws
    thresh = stats.chi2.ppf(0.99, df=counts.size)
    assert chi2 < thresh


def test_randomness_uniform_chi2():
    p = SecrecyParams(k=1, l=17)
    rng = np.random.default_rng(321)
    n_draws = 10_000
    counts = np.zeros(p.randomness_len)
    for _ in range(n_draws):
        counts += draw_randomness(p, rng).bits
    chi2 = np.sum((2 * counts - n_draws) ** 2) / n_draws
    assert chi2 < stats.chi2.ppf(0.99, df=counts.size)


def test_message_cosets_disjoint_exhaustive():
    # For any fixed seed the r -> v maps are injective and the images of two
    # distinct messages are disjoint cosets of size 2^(l-k).
    p = SecrecyParams(k=2, l=9)
    rng = np.random.default_rng(9)
    seed = draw_seed(p, rng)
    lk = p.randomness_len
    images = {}
    for m_int in range(2**p.k):
        m = BitVec.from_int(m_int, p.k)
        image = {
            secrecy_encode(m, BitVec.from_int(ri, lk), seed, p).to_int()
            for ri in range(2**lk)
        }
        assert len(image) == 2**lk  # injective in r
        images[m_int] = image
    for m1, m2 in itertools.combinations(images, 2):
        assert not (images[m1] & images[m2])


def test_seed_linearity():
    # encode(m1 ^ m2, r, t=0) == encode(m1, r, t=0) ^ [0, m2]
    p = SecrecyParams(k=3, l=10)
    rng = np.random.default_rng(13)
    a = BitVec.random(p.l - 1, rng)
    seed0 = SecrecySeed(a=a, t=BitVec.zeros(p.k))
    for _ in range(100):
        m1 = BitVec.random(p.k, rng)
        m2 = BitVec.random(p.k, rng)
        r = BitVec.random(p.randomness_len, rng)
        lhs = secrecy_encode(m1 ^ m2, r, seed0, p)
        rhs = secrecy_encode(m1, r, seed0, p) ^ BitVec.zeros(p.randomness_len).concat(m2)
        assert lhs == rhs
