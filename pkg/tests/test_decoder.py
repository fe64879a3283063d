import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoqec import codes
from topoqec.channel import ChannelSpec
from topoqec.decoder import (DecoderConfig, Mbp4Engine, ambp4_decode,
                             boxplus, default_alpha_sequence,
                             fixed_eps0_prior, lambda_w, mbp4_decode,
                             prior_llr)
from topoqec.pauli import (PauliString, in_rowspace, multiply,
                           pauli_from_symbols, syndrome_of)
from topoqec.tanner import to_tanner

# harvested from simulation: conventional BP4 fails to converge on this
# [[13,1,5]] error but MBP4 with alpha=0.7 converges and corrects it
REGRESSION_ERROR_13 = "IIIIIIYIZYIII"


@pytest.fixture(scope="module")
def five():
    code = codes.build_twisted_xzzx(2, 1)
    graph = to_tanner(code.checks)
    prior = np.tile(ChannelSpec.depolarizing(0.1).probs(), (5, 1))
    return code, graph, prior


@pytest.fixture(scope="module")
def thirteen():
    code = codes.build_twisted_xzzx(3, 2)
    graph = to_tanner(code.checks)
    prior = np.tile(ChannelSpec.depolarizing(0.1).probs(), (13, 1))
    return code, graph, prior


class TestLambdaW:
    def test_uniform_is_zero(self):
        assert lambda_w((0.0, 0.0, 0.0), "X") == 0.0

    def test_depolarizing_point_one(self):
        lam = math.log(27)
        got = lambda_w((lam, lam, lam), "X")
        assert got == pytest.approx(math.log(14), abs=1e-12)

    def test_commuting_limit(self):
        big = 500.0
        assert lambda_w((big, big, big), "X") > 100

    @given(st.tuples(*[st.floats(-20, 20) for _ in range(3)]))
    @settings(max_examples=50)
    def test_matches_direct_formula(self, gamma):
        gx, gy, gz = gamma
        direct = math.log((1 + math.exp(-gx))
                          / (math.exp(-gy) + math.exp(-gz)))
        assert lambda_w(gamma, "X") == pytest.approx(direct, rel=1e-9)


class TestBoxplus:
    def test_single_element(self):
        assert boxplus([1.7]) == pytest.approx(1.7, abs=1e-12)

    def test_zero_absorbs(self):
        assert boxplus([3.0, 0.0, -2.0]) == 0.0

    def test_two_twos(self):
        want = 2 * math.atanh(math.tanh(1.0) ** 2)
        assert boxplus([2.0, 2.0]) == pytest.approx(want, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            boxplus([])

    @given(st.lists(st.floats(-8, 8), min_size=1, max_size=6))
    @settings(max_examples=80)
    def test_contraction_and_sign(self, vals):
        out = boxplus(vals)
        assert abs(out) <= min(abs(v) for v in vals) + 1e-9
        sign = 1.0
        for v in vals:
            sign *= math.copysign(1.0, v) if v != 0 else 0.0
        if all(v != 0 for v in vals) and abs(out) > 1e-12:
            assert math.copysign(1.0, out) == sign


class TestPrior:
    def test_fig11_value(self):
        prior = fixed_eps0_prior(4, 0.042)
        assert prior[0] == pytest.approx([0.958, 0.014, 0.014, 0.014])

    def test_uniform_pauli_rate(self):
        lam = prior_llr(fixed_eps0_prior(2, 0.75))
        assert np.allclose(lam, 0.0)

    def test_point_one_llr(self):
        lam = prior_llr(fixed_eps0_prior(1, 0.1))
        assert lam[0] == pytest.approx([math.log(27)] * 3)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            fixed_eps0_prior(3, 0.0)
        with pytest.raises(ValueError):
            fixed_eps0_prior(3, 1.0)


class TestConfig:
    def test_alpha_range(self):
        with pytest.raises(ValueError):
            DecoderConfig(alpha=0.0)
        with pytest.raises(ValueError):
            DecoderConfig(alpha=1.2)

    def test_bp4_fixes_alpha(self):
        with pytest.raises(ValueError):
            DecoderConfig(alpha=0.7, variant="bp4")

    def test_only_parallel_schedule(self):
        with pytest.raises(ValueError):
            DecoderConfig(schedule="serial")


class TestMbp4:
    def test_zero_syndrome_immediate(self, five):
        _, graph, prior = five
        result = mbp4_decode(graph, np.zeros(5, np.uint8), prior)
        assert str(result.estimate) == "IIIII"
        assert result.converged and result.iterations == 1

    def test_weight_one_error(self, five):
        code, graph, prior = five
        err = pauli_from_symbols("XIIII")
        result = mbp4_decode(graph, syndrome_of(code.checks, err), prior)
        assert result.converged
        assert in_rowspace(code.checks, multiply(err, result.estimate))

    def test_converged_estimate_matches_syndrome(self, five):
        code, graph, prior = five
        rng = np.random.default_rng(7)
        for _ in range(30):
            err = PauliString(5, int(rng.integers(0, 32)),
                              int(rng.integers(0, 32)))
            z = syndrome_of(code.checks, err)
            result = mbp4_decode(graph, z, prior)
            if result.converged:
                assert np.array_equal(
                    syndrome_of(code.checks, result.estimate), z)

    def test_determinism(self, thirteen):
        code, graph, prior = thirteen
        err = pauli_from_symbols(REGRESSION_ERROR_13)
        z = syndrome_of(code.checks, err)
        a = mbp4_decode(graph, z, prior, DecoderConfig(alpha=0.85))
        b = mbp4_decode(graph, z, prior, DecoderConfig(alpha=0.85))
        assert a == b

    def test_alpha_regression_instance(self, thirteen):
        code, graph, prior = thirteen
        err = pauli_from_symbols(REGRESSION_ERROR_13)
        z = syndrome_of(code.checks, err)
        plain = mbp4_decode(graph, z, prior, DecoderConfig(alpha=1.0))
        memory = mbp4_decode(graph, z, prior, DecoderConfig(alpha=0.7))
        assert not plain.converged
        assert memory.converged
        assert in_rowspace(code.checks, multiply(err, memory.estimate))

    def test_batch_row_independence(self, thirteen):
        code, graph, prior = thirteen
        engine = Mbp4Engine(graph)
        rng = np.random.default_rng(3)
        errs = [PauliString(13, int(rng.integers(0, 2 ** 13)),
                            int(rng.integers(0, 2 ** 13))) for _ in range(16)]
        syn = np.stack([syndrome_of(code.checks, e) for e in errs])
        cfg = DecoderConfig(alpha=0.9, max_iters=30)
        est_all, conv_all, it_all = engine.decode_batch(syn, prior, cfg)
        for i in (0, 5, 15):
            est_one, conv_one, it_one = engine.decode_batch(
                syn[i:i + 1], prior, cfg)
            assert np.array_equal(est_all[i], est_one[0])
            assert conv_all[i] == conv_one[0] and it_all[i] == it_one[0]


class TestVariantReduction:
    def test_bp4_identical_to_mbp4_alpha_one(self, thirteen):
        code, graph, prior = thirteen
        rng = np.random.default_rng(17)
        for _ in range(10):
            z = rng.integers(0, 2, size=code.checks.m).astype(np.uint8)
            tr_m, tr_b = [], []
            mbp4_decode(graph, z, prior,
                        DecoderConfig(alpha=1.0, variant="mbp4",
                                      max_iters=12), trace=tr_m)
            mbp4_decode(graph, z, prior,
                        DecoderConfig(alpha=1.0, variant="bp4",
                                      max_iters=12), trace=tr_b)
            assert len(tr_m) == len(tr_b)
            for a, b in zip(tr_m, tr_b):
                for key in ("gamma", "delta", "beliefs", "estimate"):
                    assert np.array_equal(a[key], b[key])


class TestAmbp4:
    def test_alpha_sequence_default(self):
        seq = default_alpha_sequence()
        assert seq[0] == 1.0 and seq[-1] == 0.5 and len(seq) == 51

    def test_zero_syndrome_uses_first_alpha(self, five):
        _, graph, prior = five
        result = ambp4_decode(graph, np.zeros(5, np.uint8), prior)
        assert result.alpha_used == 1.0
        assert str(result.estimate) == "IIIII"

    def test_solvable_at_one(self, five):
        code, graph, prior = five
        z = syndrome_of(code.checks, pauli_from_symbols("XIIII"))
        result = ambp4_decode(graph, z, prior)
        assert result.alpha_used == 1.0

    def test_regression_instance_uses_lower_alpha(self, thirteen):
        code, graph, prior = thirteen
        err = pauli_from_symbols(REGRESSION_ERROR_13)
        z = syndrome_of(code.checks, err)
        result = ambp4_decode(graph, z, prior)
        assert result.converged and result.alpha_used < 1.0

    def test_all_weight_one_errors_succeed(self, five):
        code, graph, prior = five
        for q in range(5):
            for p in "XYZ":
                chars = ["I"] * 5
                chars[q] = p
                err = pauli_from_symbols("".join(chars))
                z = syndrome_of(code.checks, err)
                result = ambp4_decode(graph, z, prior, max_iters=100)
                assert result.converged
                assert in_rowspace(code.checks,
                                   multiply(err, result.estimate))

    def test_batched_ladder_matches_sequential(self, thirteen):
        code, graph, prior = thirteen
        engine = Mbp4Engine(graph)
        alphas = default_alpha_sequence()
        rng = np.random.default_rng(23)
        syn = rng.integers(0, 2, size=(12, code.checks.m)).astype(np.uint8)
        est, conv, iters, used = engine.ambp_batch(syn, prior, alphas,
                                                   max_iters=40)
        for i in range(12):
            ref = None
            for alpha in alphas:
                cfg = DecoderConfig(alpha=alpha, max_iters=40)
                e, c, it = engine.decode_batch(syn[i:i + 1], prior, cfg)
                ref = (e[0], bool(c[0]), int(it[0]), alpha)
                if c[0]:
                    break
            assert np.array_equal(est[i], ref[0])
            assert (bool(conv[i]), int(iters[i]), float(used[i])) == ref[1:]

    def test_rejects_bad_sequence(self, five):
        _, graph, prior = five
        with pytest.raises(ValueError):
            ambp4_decode(graph, np.zeros(5, np.uint8), prior,
                         alpha_sequence=[0.5, 0.9])
        with pytest.raises(ValueError):
            ambp4_decode(graph, np.zeros(5, np.uint8), prior,
                         alpha_sequence=[])


class TestPermutationEquivariance:
    def test_qubit_relabeling(self):
        code = codes.build_twisted_xzzx(2, 1)
        prior = np.tile(ChannelSpec.depolarizing(0.1).probs(), (5, 1))
        perm = np.array([3, 0, 4, 1, 2])
        rows = []
        for r in code.checks.rows:
            c = r.to_codes()
            out = np.zeros(5, np.uint8)
            out[perm] = c
            rows.append(PauliString.from_codes(out))
        from topoqec.pauli import CheckMatrix
        permuted = CheckMatrix.from_paulis(rows)
        err = pauli_from_symbols("XYIII")
        perm_err_codes = np.zeros(5, np.uint8)
        perm_err_codes[perm] = err.to_codes()
        perm_err = PauliString.from_codes(perm_err_codes)

        r1 = mbp4_decode(to_tanner(code.checks),
                         syndrome_of(code.checks, err), prior)
        r2 = mbp4_decode(to_tanner(permuted),
                         syndrome_of(permuted, perm_err), prior)
        assert r1.converged == r2.converged
        est1 = np.zeros(5, np.uint8)
        est1[perm] = r1.estimate.to_codes()
        assert np.array_equal(est1, r2.estimate.to_codes())
