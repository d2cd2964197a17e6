#!/usr/bin/env python3
"""Exercise the transmission code: encode, cross an AWGN channel at a few
SNRs and watch the CRC-aided list decoder clean up."""

import numpy as np

from wiretapsim import (
    BitVec,
    ChannelSpec,
    CrcSpec,
    build_spec,
    decode_payload,
    polar_encode,
    qpsk_llr,
    qpsk_mod,
    scl_decode,
    transmit,
)

rng = np.random.default_rng(7)
spec = build_spec(256, 222, CrcSpec.crc11())
print(f"code: n={spec.n}, payload {spec.payload_len} + CRC{spec.crc.width} "
      f"= {spec.k_info} info bits, {spec.n - spec.k_info} frozen")

payload = BitVec.random(222, rng)
codeword = polar_encode(payload, spec)
tx = qpsk_mod(codeword)
print(f"codeword -> {tx.size} QPSK symbols")

print(f"\n{'SNR dB':>7} {'list':>5} {'decoded ok':>10} {'best metric':>12}")
for snr_db in [3.0, 5.0, 7.0, 9.0]:
    ch = ChannelSpec.from_snr_db(snr_db)
    llr = qpsk_llr(transmit(tx, ch, rng), ch)
    for lsize in (1, 8):
        dlist = scl_decode(llr, spec, lsize)
        decoded, ok = decode_payload(dlist)
        hit = ok and decoded == payload
        print(f"{snr_db:7.1f} {lsize:5d} {str(hit):>10} {dlist.entries[0].path_metric:12.2f}")

# Block error rate at one operating point
trials, errors = 400, 0
ch = ChannelSpec.from_snr_db(6.5)
for _ in range(trials):
    pl = BitVec.random(222, rng)
    llr = qpsk_llr(transmit(qpsk_mod(polar_encode(pl, spec)), ch, rng), ch)
    decoded, ok = decode_payload(scl_decode(llr, spec, 8))
    errors += not (ok and decoded == pl)
print(f"\nBLER at 6.5 dB, L=8: {errors}/{trials} = {errors / trials:.3f}")
