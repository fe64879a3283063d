import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topoqec import gf2
from topoqec.pauli import (CheckMatrix, PauliString, in_rowspace,
                           logical_operators, multiply, parse_pauli_text,
                           pauli_from_symbols, symplectic_product,
                           syndrome_of, write_pauli_text)

FIVE_ONE_THREE = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]


def five_qubit_checks() -> CheckMatrix:
    return CheckMatrix.from_paulis(pauli_from_symbols(s)
                                   for s in FIVE_ONE_THREE)


def random_pauli(rng: np.random.Generator, n: int) -> PauliString:
    return PauliString(n, int(rng.integers(0, 2 ** n)),
                       int(rng.integers(0, 2 ** n)))


class TestParsing:
    def test_identity_weight_zero(self):
        assert pauli_from_symbols("IIIII").weight() == 0

    def test_five_qubit_generator_bits(self):
        p = pauli_from_symbols("XZZXI")
        assert p.x_bits == 0b01001
        assert p.z_bits == 0b00110

    def test_all_nonidentity(self):
        assert pauli_from_symbols("XYZ").weight() == 3

    def test_rejects_bad_symbols(self):
        with pytest.raises(ValueError):
            pauli_from_symbols("XQZ")

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            pauli_from_symbols("")

    def test_string_round_trip(self):
        for s in ("XZZXI", "IIIY", "ZZZZZZ", "X"):
            assert str(pauli_from_symbols(s)) == s

    def test_codes_round_trip(self):
        p = pauli_from_symbols("IXYZXI")
        assert PauliString.from_codes(p.to_codes()) == p


class TestSymplectic:
    def test_x_z_anticommute(self):
        assert symplectic_product(pauli_from_symbols("X"),
                                  pauli_from_symbols("Z")) == 1

    def test_self_commutes(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = random_pauli(rng, 7)
            assert symplectic_product(p, p) == 0

    def test_cyclic_shifts_commute(self):
        base = pauli_from_symbols("XZZXI")
        shift = pauli_from_symbols("IXZZX")
        assert symplectic_product(base, shift) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            symplectic_product(pauli_from_symbols("XX"),
                               pauli_from_symbols("X"))

    @given(st.integers(0, 2 ** 6 - 1), st.integers(0, 2 ** 6 - 1),
           st.integers(0, 2 ** 6 - 1), st.integers(0, 2 ** 6 - 1),
           st.integers(0, 2 ** 6 - 1), st.integers(0, 2 ** 6 - 1))
    @settings(max_examples=60)
    def test_bilinear_over_multiply(self, px, pz, qx, qz, rx, rz):
        p = PauliString(6, px, pz)
        q = PauliString(6, qx, qz)
        r = PauliString(6, rx, rz)
        lhs = symplectic_product(multiply(p, q), r)
        rhs = symplectic_product(p, r) ^ symplectic_product(q, r)
        assert lhs == rhs


class TestMultiply:
    def test_involution(self):
        p = pauli_from_symbols("XYZIY")
        assert multiply(p, p) == PauliString.identity(5)

    def test_x_times_z_is_y(self):
        got = multiply(pauli_from_symbols("XI"), pauli_from_symbols("ZI"))
        assert str(got) == "YI"

    def test_five_qubit_product(self):
        got = multiply(pauli_from_symbols("XZZXI"),
                       pauli_from_symbols("IXZZX"))
        assert str(got) == "XYIYX"


class TestSyndrome:
    def test_identity_gives_zero(self):
        cm = five_qubit_checks()
        assert not syndrome_of(cm, PauliString.identity(5)).any()

    def test_single_x_error(self):
        cm = five_qubit_checks()
        got = syndrome_of(cm, pauli_from_symbols("XIIII"))
        assert got.tolist() == [0, 0, 0, 1]

    def test_stabilizer_row_gives_zero(self):
        cm = five_qubit_checks()
        for row in cm.rows:
            assert not syndrome_of(cm, row).any()

    def test_stabilizer_invariance(self):
        cm = five_qubit_checks()
        rng = np.random.default_rng(11)
        for _ in range(20):
            err = random_pauli(rng, 5)
            base = syndrome_of(cm, err)
            for row in cm.rows:
                assert np.array_equal(base, syndrome_of(cm, multiply(err, row)))


class TestGf2:
    def test_unit_vectors(self):
        assert gf2.rank([1 << i for i in range(8)]) == 8

    def test_duplicate_counts_once(self):
        assert gf2.rank([0b1011, 0b1011]) == 1

    def test_toric_l2_plaquette_rank(self):
        from topoqec.codes import build_toric
        code = build_toric(2)
        assert gf2.rank(code.checks.symplectic_ints()) == 6
        assert code.n - 6 == 2

    def test_nullspace_orthogonality(self):
        rows = [0b1101, 0b0111]
        for v in gf2.nullspace(rows, 4):
            for r in rows:
                assert (v & r).bit_count() % 2 == 0


class TestRowspace:
    def test_identity_in_rowspace(self):
        assert in_rowspace(five_qubit_checks(), PauliString.identity(5))

    def test_product_of_rows(self):
        cm = five_qubit_checks()
        assert in_rowspace(cm, multiply(cm.rows[0], cm.rows[2]))

    def test_logical_not_in_rowspace(self):
        cm = five_qubit_checks()
        (xbar, zbar), = logical_operators(cm)
        assert not in_rowspace(cm, xbar)
        assert not in_rowspace(cm, zbar)

    def test_rowspace_implies_zero_syndrome(self):
        cm = five_qubit_checks()
        rng = np.random.default_rng(5)
        for _ in range(20):
            picks = rng.integers(0, 2, size=4)
            acc = PauliString.identity(5)
            for bit, row in zip(picks, cm.rows):
                if bit:
                    acc = multiply(acc, row)
            if acc.weight() == 0:
                continue
            assert in_rowspace(cm, acc)
            assert not syndrome_of(cm, acc).any()


class TestLogicalOperators:
    def _assert_valid(self, cm: CheckMatrix, k: int):
        pairs = logical_operators(cm)
        assert len(pairs) == k
        flat = [op for pair in pairs for op in pair]
        for op in flat:
            assert not syndrome_of(cm, op).any()
            assert not in_rowspace(cm, op)
        for i, (xi, zi) in enumerate(pairs):
            for j, (xj, zj) in enumerate(pairs):
                assert symplectic_product(xi, zj) == (i == j)
                assert symplectic_product(xi, xj) == 0
                assert symplectic_product(zi, zj) == 0

    def test_five_qubit(self):
        self._assert_valid(five_qubit_checks(), 1)

    def test_toric_l3(self):
        from topoqec.codes import build_toric
        self._assert_valid(build_toric(3).checks, 2)

    def test_rotated_surface_l3(self):
        from topoqec.codes import build_rotated_surface
        self._assert_valid(build_rotated_surface(3).checks, 1)


class TestCheckMatrixValidation:
    def test_rejects_anticommuting_rows(self):
        with pytest.raises(ValueError):
            CheckMatrix.from_paulis([pauli_from_symbols("XI"),
                                     pauli_from_symbols("ZI")])

    def test_rejects_identity_row(self):
        with pytest.raises(ValueError):
            CheckMatrix.from_paulis([pauli_from_symbols("II")])


class TestTextFormat:
    def test_round_trip(self):
        cm = five_qubit_checks()
        assert parse_pauli_text(write_pauli_text(cm)) == cm

    def test_header(self):
        text = write_pauli_text(five_qubit_checks())
        assert text.splitlines()[0] == "4 5"

    def test_malformed_header(self):
        with pytest.raises(ValueError):
            parse_pauli_text("nonsense\nXX\n")

    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            parse_pauli_text("2 2\nXX\n")
