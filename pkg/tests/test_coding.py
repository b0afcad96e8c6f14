import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicm_jed.coding import (
    CRC_POLYNOMIALS,
    LdpcCode,
    ParityCheckMatrix,
    PolarCode,
    ca_scl_decode,
    crc_attach,
    crc_check,
    crc_remainder,
    deinterleave,
    derate_match,
    frozen_mask,
    interleave,
    ldpc_bp_decode,
    make_permutation,
    polar_encode,
    polar_transform,
    rate_match,
    read_alist,
    sc_decode,
    scl_decode_paths,
    write_alist,
)
from bicm_jed.coding.ldpc import default_matrix
from bicm_jed.errors import ConfigError
from bicm_jed.oracle import ml_decode_polar

from conftest import random_bits


def bpsk_llrs(rng, bits, snr_db):
    """LLRs of QPSK-carried bits over AWGN at Es/N0 = ``snr_db``."""
    n0 = 10 ** (-snr_db / 10)
    amp = (1.0 - 2.0 * bits) / math.sqrt(2.0)
    r = amp + rng.standard_normal(bits.shape) * math.sqrt(n0 / 2)
    return 2.0 * math.sqrt(2.0) * r / n0


def int_crc(bits, crc_len):
    """CRC by integer polynomial division, independent of the array code."""
    poly = sum(1 << e for e in CRC_POLYNOMIALS[crc_len])
    reg = int("".join(map(str, bits)) or "0", 2) << crc_len
    for shift in range(reg.bit_length() - 1, crc_len - 1, -1):
        if reg >> shift & 1:
            reg ^= poly << (shift - crc_len)
    return [(reg >> (crc_len - 1 - k)) & 1 for k in range(crc_len)]


class TestCrc:
    @pytest.mark.parametrize("crc_len", sorted(CRC_POLYNOMIALS))
    def test_round_trip(self, rng, crc_len):
        for n in (1, 13, 37, 64):
            assert crc_check(crc_attach(random_bits(rng, n), crc_len), crc_len)

    @pytest.mark.parametrize("crc_len", sorted(CRC_POLYNOMIALS))
    def test_matches_integer_division(self, rng, crc_len):
        for _ in range(20):
            bits = random_bits(rng, int(rng.integers(1, 60)))
            assert list(crc_remainder(bits, crc_len)) == int_crc(list(bits), crc_len)

    def test_zero_message_zero_parity(self):
        out = crc_attach(np.zeros(32, np.uint8), 11)
        assert out.size == 43 and not out.any()

    def test_single_flips_detected(self, rng):
        block = crc_attach(random_bits(rng, 37), 11)
        flips = rng.integers(0, block.size, 10_000)
        detected = 0
        for f in flips:
            bad = block.copy()
            bad[f] ^= 1
            detected += not crc_check(bad, 11)
        assert detected / flips.size >= 0.999

    def test_batched_check(self, rng):
        blocks = crc_attach(random_bits(rng, 5 * 20).reshape(5, 20), 16)
        blocks[2, 3] ^= 1
        assert list(crc_check(blocks, 16)) == [True, True, False, True, True]

    def test_unsupported_length(self):
        with pytest.raises(ConfigError):
            crc_attach(np.zeros(8, np.uint8), 12)


class TestPolarEncode:
    def test_length_two(self):
        assert list(polar_transform([0, 1])) == [1, 1]

    def test_zero_message(self):
        fz = frozen_mask(32, 12)
        assert not polar_encode(np.zeros(12, np.uint8), 32, fz).any()

    def test_matches_generator_matrix(self, rng):
        f = np.array([[1, 0], [1, 1]], dtype=np.int64)
        g = np.kron(np.kron(f, f), f)
        for _ in range(20):
            u = random_bits(rng, 8)
            assert np.array_equal(polar_transform(u), (u @ g) % 2)

    def test_index_set_and_mask_agree(self, rng):
        fz = frozen_mask(16, 6)
        msg = random_bits(rng, 6)
        assert np.array_equal(polar_encode(msg, 16, fz), polar_encode(msg, 16, np.nonzero(fz)[0]))

    def test_frozen_set_size(self):
        for n, k in [(8, 3), (64, 48), (128, 48)]:
            assert frozen_mask(n, k).sum() == n - k

    def test_reliability_nested(self):
        # a lower-rate information set is contained in a higher-rate one
        free_small = ~frozen_mask(64, 20)
        free_big = ~frozen_mask(64, 48)
        assert np.all(free_big[free_small])

    def test_size_mismatch(self):
        with pytest.raises(ConfigError):
            polar_encode(np.zeros(5, np.uint8), 16, frozen_mask(16, 6))

    def test_rate_matched_mother_length(self):
        assert PolarCode.for_rate_matched(48, 64).n_code == 64
        assert PolarCode.for_rate_matched(48, 100).n_code == 128
        with pytest.raises(ConfigError):
            PolarCode.for_rate_matched(48, 40)


class TestPolarDecode:
    def test_noiseless(self, rng):
        code = PolarCode(64, 48)
        for _ in range(10):
            block = crc_attach(random_bits(rng, 37), 11)
            llr = 20.0 * (1.0 - 2.0 * code.encode(block))
            res = code.decode(llr, 8, 11)
            assert res.crc_ok and np.array_equal(res.block, block)

    def test_zero_llrs_tie_break(self):
        code = PolarCode(64, 48)
        a = code.decode(np.zeros(64), 8, 11)
        b = code.decode(np.zeros(64), 8, 11)
        assert np.array_equal(a.block, b.block)
        # bit 0 wins every tie, and the all-zero block carries a valid CRC
        assert not a.block.any() and a.crc_ok

    def test_zero_llrs_two_bit_exhaustive(self):
        fz = frozen_mask(4, 2)
        u, metric = scl_decode_paths(np.zeros(4), fz, 4)
        assert np.allclose(metric, metric[0])
        assert not u[0].any()
        assert {tuple(r) for r in u[:, ~fz]} == set(itertools.product((0, 1), repeat=2))

    def test_list_one_is_sc(self, rng):
        fz = frozen_mask(64, 30)
        for _ in range(1000):
            u = np.zeros(64, np.uint8)
            u[~fz] = random_bits(rng, 30)
            llr = bpsk_llrs(rng, polar_transform(u), 1.0)
            paths, _ = scl_decode_paths(llr, fz, 1)
            assert np.array_equal(paths[0], sc_decode(llr, fz))

    @pytest.mark.parametrize("k,n", [(4, 8), (6, 16), (8, 32)])
    def test_full_list_is_ml(self, rng, k, n):
        fz = frozen_mask(n, k)
        msgs = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8)
        words = polar_encode(msgs, n, fz)
        for _ in range(200):
            m = msgs[rng.integers(len(msgs))]
            llr = bpsk_llrs(rng, polar_encode(m, n, fz), 0.0)
            res = ca_scl_decode(llr, 1 << k, fz, None)
            assert np.array_equal(res.block, ml_decode_polar(llr, words, msgs))

    def test_crc_failure_flagged(self):
        code = PolarCode(64, 48)
        llr = 20.0 * (1.0 - 2.0 * code.encode(np.r_[np.ones(1, np.uint8), np.zeros(47, np.uint8)]))
        res = code.decode(llr, 1, 11)
        assert not res.crc_ok

    @pytest.mark.slow
    def test_awgn_sanity(self, rng):
        code = PolarCode(64, 48)
        errors = 0
        for _ in range(10_000):
            block = crc_attach(random_bits(rng, 37), 11)
            res = code.decode(bpsk_llrs(rng, code.encode(block), 10.0), 8, 11)
            errors += not (res.crc_ok and np.array_equal(res.block, block))
        assert errors / 10_000 < 1e-3

    def test_bad_list_size(self):
        with pytest.raises(ConfigError):
            scl_decode_paths(np.zeros(8), frozen_mask(8, 4), 3)


def small_h():
    # 6 x 12, column weight 3, row weight 6
    rng = np.random.default_rng(5)
    while True:
        h = np.zeros((6, 12), np.uint8)
        for j in range(12):
            h[rng.choice(6, 3, replace=False), j] = 1
        if np.all(h.sum(axis=1) >= 4):
            return h


class TestLdpc:
    def test_default_dimensions(self):
        code = LdpcCode.default()
        assert (code.n, code.k) == (64, 48)

    def test_codewords_satisfy_checks(self, rng):
        code = LdpcCode.default()
        for _ in range(50):
            cw = code.encode(random_bits(rng, 48))
            assert not code.h.syndrome(cw).any()

    def test_noiseless(self, rng):
        code = LdpcCode.default()
        msg = random_bits(rng, 48)
        cw = code.encode(msg)
        bits, converged, iters = ldpc_bp_decode(20.0 * (1.0 - 2.0 * cw), code.h, 30)
        assert converged and iters == 1 and not code.h.syndrome(bits).any()
        assert np.array_equal(code.decode(20.0 * (1.0 - 2.0 * cw)).block, msg)

    def test_single_weak_flip_corrected(self):
        h = ParityCheckMatrix.from_dense(small_h())
        code = LdpcCode(h)
        msgs = np.array(list(itertools.product((0, 1), repeat=code.k)), dtype=np.uint8)
        for cw in code.encode(msgs[:: max(1, len(msgs) // 16)]):
            for pos in range(h.n_cols):
                llr = 4.0 * (1.0 - 2.0 * cw)
                llr[pos] = -0.5 * (1.0 - 2.0 * cw[pos])
                bits, converged, _ = ldpc_bp_decode(llr, h, 30)
                assert converged and np.array_equal(bits, cw)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**31), scale=st.floats(0.1, 3.0))
    def test_converged_means_zero_syndrome(self, seed, scale):
        h = default_matrix()
        llr = scale * np.random.default_rng(seed).standard_normal(h.n_cols)
        bits, converged, iters = ldpc_bp_decode(llr, h, 30)
        assert 1 <= iters <= 30
        assert converged == (not h.syndrome(bits).any())

    def test_alist_round_trip(self, tmp_path):
        h = default_matrix()
        write_alist(h, tmp_path / "h.alist")
        assert np.array_equal(read_alist(tmp_path / "h.alist").dense(), h.dense())

    def test_bad_alist(self, tmp_path):
        (tmp_path / "bad.alist").write_text("4 2\n1\n")
        with pytest.raises(ConfigError):
            read_alist(tmp_path / "bad.alist")

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigError):
            ldpc_bp_decode(np.zeros(10), default_matrix(), 30)


class TestRateMatch:
    def test_identity(self, rng):
        bits = random_bits(rng, 64)
        assert np.array_equal(rate_match(bits, 64), bits)

    def test_repetition(self):
        assert list(rate_match(np.array(list("abcd")), 6)) == list("abcdab")

    def test_puncture_tail(self):
        assert list(rate_match(np.arange(8), 5)) == [0, 1, 2, 3, 4]

    def test_soft_combining(self):
        assert derate_match(np.ones(6), 4).tolist() == [2.0, 2.0, 1.0, 1.0]
        assert derate_match(np.ones(3), 4).tolist() == [1.0, 1.0, 1.0, 0.0]


class TestInterleaver:
    def test_round_trip(self, rng):
        perm = make_permutation(0, 8)
        bits = random_bits(rng, 8)
        assert np.array_equal(deinterleave(interleave(bits, perm), perm), bits)

    def test_bijection(self):
        perm = make_permutation(9, 64)
        assert sorted(perm.tolist()) == list(range(64))

    def test_seeds_differ(self):
        perms = {tuple(make_permutation(s, 16)) for s in range(100)}
        assert len(perms) == 100

    def test_llr_round_trip(self, rng):
        perm = make_permutation(4, 32)
        v = rng.standard_normal(32)
        assert np.array_equal(interleave(deinterleave(v, perm), perm), v)

    def test_length_mismatch(self):
        with pytest.raises(ConfigError):
            interleave(np.zeros(5), make_permutation(0, 6))
