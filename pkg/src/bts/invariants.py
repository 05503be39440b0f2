"""Closed-form rotation invariants of 2x2x2 tensors and their relatives.

Every printed formula is evaluated along two independent paths and
cross-asserted at construction time (exact equality on rational input,
1e-10 relative otherwise): a transcription slip in any of the long
expressions fails loudly instead of corrupting downstream results.

The four degree-two invariants theta_i and the quartic phi generate the
rotation-invariant ring of the 2x2x2 format together with the conjugate pair
phi_1, phi_2; the hyperdeterminant, the three quartic dual-variety factors
f_{3,{j}}, and the extreme coefficients of the dual distance polynomial are
polynomials in them.

Slot convention: the quartic factor attached to slot j is the one computed
from the slot-j slices; the theta-combination pairing below was pinned against
that slice form (the two printed versions disagree by a cyclic slot
relabeling, and the slice form is the geometrically unambiguous one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .scalars import QQi, Scalar
from .tensor import (
    BinaryTensor,
    MuTensor,
    expand,
    permute_slots,
    slice_tensor,
    to_u_coordinates,
)


class FormulaCrossCheckError(RuntimeError):
    """Two independent evaluations of the same printed formula disagree."""


class DegenerateInputError(ValueError):
    """The input sits on a locus where the requested quantity is undefined."""


def _close(a: Scalar, b: Scalar, exact: bool, tol: float = 1e-10) -> bool:
    if exact:
        return a == b
    fa, fb = complex(a), complex(b)
    return abs(fa - fb) <= tol * (1.0 + abs(fa) + abs(fb))


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise FormulaCrossCheckError(f"cross-check failed: {what}")


@dataclass(frozen=True)
class InvariantSet222:
    """The full invariant record of one real 2x2x2 tensor."""

    theta: tuple[Scalar, Scalar, Scalar, Scalar]
    phi: Scalar
    phi1: Scalar  # complex (QQi when exact)
    det: Scalar
    f3: tuple[Scalar, Scalar, Scalar]
    exact: bool


def _entries_222(t: BinaryTensor | MuTensor) -> tuple[BinaryTensor, tuple[Scalar, ...]]:
    dense = expand(t) if isinstance(t, MuTensor) else t
    if dense.d != 3:
        raise ValueError(f"need order 3, got {dense.d}")
    if dense.exact:
        dense = BinaryTensor(3, tuple(Fraction(v) for v in dense.entries))
    return dense, dense.entries


def theta_t_forms(e: Sequence[Scalar]) -> tuple[Scalar, Scalar, Scalar, Scalar]:
    """The four degree-two invariants as printed squared sums of entry combinations."""
    t000, t001, t010, t011, t100, t101, t110, t111 = e
    th1 = (t000 - t011 - t101 - t110) ** 2 + (t111 - t100 - t010 - t001) ** 2
    th2 = (t000 + t011 + t101 - t110) ** 2 + (t111 + t100 + t010 - t001) ** 2
    th3 = (t000 + t011 - t101 + t110) ** 2 + (t111 + t100 - t010 + t001) ** 2
    th4 = (t000 - t011 + t101 + t110) ** 2 + (t111 - t100 + t010 + t001) ** 2
    return th1, th2, th3, th4


def phi_t_form(e: Sequence[Scalar]) -> Scalar:
    """The quartic invariant phi as the printed 46-term polynomial."""
    e0, e1, e2, e3, e4, e5, e6, e7 = e
    return (
        e0**4 + 2 * e0**2 * e1**2 + e1**4 + 2 * e0**2 * e2**2 - 2 * e1**2 * e2**2 + e2**4
        + 8 * e0 * e1 * e2 * e3 - 2 * e0**2 * e3**2 + 2 * e1**2 * e3**2 + 2 * e2**2 * e3**2
        + e3**4 + 2 * e0**2 * e4**2 - 2 * e1**2 * e4**2 - 2 * e2**2 * e4**2 - 6 * e3**2 * e4**2
        + e4**4 + 8 * e0 * e1 * e4 * e5 + 8 * e2 * e3 * e4 * e5 - 2 * e0**2 * e5**2
        + 2 * e1**2 * e5**2 - 6 * e2**2 * e5**2 - 2 * e3**2 * e5**2 + 2 * e4**2 * e5**2
        + e5**4 + 8 * e0 * e2 * e4 * e6 + 8 * e1 * e3 * e4 * e6 + 8 * e1 * e2 * e5 * e6
        - 8 * e0 * e3 * e5 * e6 - 2 * e0**2 * e6**2 - 6 * e1**2 * e6**2 + 2 * e2**2 * e6**2
        - 2 * e3**2 * e6**2 + 2 * e4**2 * e6**2 - 2 * e5**2 * e6**2 + e6**4
        - 8 * e1 * e2 * e4 * e7 + 8 * e0 * e3 * e4 * e7 + 8 * e0 * e2 * e5 * e7
        + 8 * e1 * e3 * e5 * e7 + 8 * e0 * e1 * e6 * e7 + 8 * e2 * e3 * e6 * e7
        + 8 * e4 * e5 * e6 * e7 - 6 * e0**2 * e7**2 - 2 * e1**2 * e7**2 - 2 * e2**2 * e7**2
        + 2 * e3**2 * e7**2 - 2 * e4**2 * e7**2 + 2 * e5**2 * e7**2 + 2 * e6**2 * e7**2
        + e7**4
    )


def _det2(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Scalar:
    return a * d - b * c


def hyperdet_222(e: Sequence[Scalar]) -> Scalar:
    """Hyperdeterminant of a 2x2x2 array of arbitrary scalars, by the 2x2-minor form."""
    t000, t001, t010, t011, t100, t101, t110, t111 = e
    m1 = _det2(t000, t011, t100, t111)
    m2 = _det2(t010, t001, t110, t101)
    m3 = _det2(t000, t001, t100, t101)
    m4 = _det2(t010, t011, t110, t111)
    return (m1 + m2) ** 2 - 4 * m3 * m4


def _det_mat2(m: Sequence[Sequence[Scalar]]) -> Scalar:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _slice_pair_matrix(t: BinaryTensor, j: int, sign: int) -> list[list[Scalar]]:
    """slice(t,j,0) + sign * i * slice(t,j,1) as a 2x2 matrix of complex scalars."""
    a = slice_tensor(t, j, 0)
    b = slice_tensor(t, j, 1)
    exact = t.exact
    i_unit: Scalar = QQi(Fraction(0), Fraction(sign)) if exact else sign * 1j
    rows = []
    for r in (0, 1):
        row = []
        for c in (0, 1):
            av, bv = a[(r, c)], b[(r, c)]
            row.append(i_unit * bv + (av if exact else complex(av)))
        rows.append(row)
    return rows


def slice_factor(t: BinaryTensor | MuTensor, j: int) -> Scalar:
    """f_{d,{j}} for d in {3, 4}: the conjugate product of determinants of complexified slices.

    For d = 3 the 2x2 determinant, for d = 4 the 2x2x2 hyperdeterminant of
    slice(j,0) +- i slice(j,1).  Real and nonnegative on real input.
    """
    dense = expand(t) if isinstance(t, MuTensor) else t
    if dense.d not in (3, 4):
        raise ValueError("slice factors implemented for orders 3 and 4")
    exact = dense.exact
    if dense.d == 3:
        plus = _det_mat2(_slice_pair_matrix(dense, j, +1))
        minus = _det_mat2(_slice_pair_matrix(dense, j, -1))
    else:
        i_unit: Scalar = QQi(Fraction(0), Fraction(1)) if exact else 1j
        s0 = slice_tensor(dense, j, 0)
        s1 = slice_tensor(dense, j, 1)
        if exact:
            ep = [a + i_unit * b for a, b in zip(s0.entries, s1.entries)]
            em = [a - i_unit * b for a, b in zip(s0.entries, s1.entries)]
        else:
            ep = [complex(a) + 1j * complex(b) for a, b in zip(s0.entries, s1.entries)]
            em = [complex(a) - 1j * complex(b) for a, b in zip(s0.entries, s1.entries)]
        plus = hyperdet_222(ep)
        minus = hyperdet_222(em)
    value = plus * minus
    if exact:
        assert isinstance(value, QQi)
        _require(value.im == 0, f"slice factor {j} not real")
        return value.re
    value = complex(value)
    scale = max(1.0, dense.norm() ** (4 if dense.d == 3 else 8))
    _require(abs(value.imag) <= 1e-12 * scale, f"slice factor {j} imaginary part too large")
    return value.real


def invariants_222(t: BinaryTensor | MuTensor) -> InvariantSet222:
    """All printed invariants of a real 2x2x2 tensor, every value computed twice.

    Path one uses the explicit entry formulas (squared sums, the 46-term
    quartic, the minor form of the hyperdeterminant, determinants of
    complexified slices); path two goes through the isotropic basis (products
    of u-coordinates, the theta/phi forms with their 1/64 and 1/16 factors).
    """
    dense, e = _entries_222(t)
    exact = dense.exact

    theta_a = theta_t_forms(e)
    phi_a = phi_t_form(e)

    u = to_u_coordinates(dense).entries
    # u indexed by bits (i1 i2 i3): products with the complementary index are real
    theta_b = (u[0b000] * u[0b111], u[0b001] * u[0b110], u[0b010] * u[0b101], u[0b011] * u[0b100])
    phi1 = u[0b001] * u[0b010] * u[0b100] * u[0b111]
    phi2 = u[0b000] * u[0b011] * u[0b101] * u[0b110]

    if exact:
        theta_b_real = []
        for k, v in enumerate(theta_b):
            assert isinstance(v, QQi)
            _require(v.im == 0, f"theta_{k + 1} from u-products not real")
            theta_b_real.append(v.re)
        s = phi1 + phi2
        assert isinstance(s, QQi)
        _require(s.im == 0, "phi1 + phi2 not real")
        phi_b: Scalar = s.re / 2
    else:
        theta_b_real = [complex(v).real for v in theta_b]
        phi_b = (complex(phi1) + complex(phi2)).real / 2

    for k in range(4):
        _require(_close(theta_a[k], theta_b_real[k], exact), f"theta_{k + 1} paths disagree")
    _require(_close(phi_a, phi_b, exact), "phi paths disagree")

    th1, th2, th3, th4 = theta_a
    pairs = th1 * th2 + th1 * th3 + th1 * th4 + th2 * th3 + th2 * th4 + th3 * th4
    squares = th1**2 + th2**2 + th3**2 + th4**2
    det_theta_num = 2 * pairs - squares - 8 * phi_a
    det_b = Fraction(det_theta_num, 64) if exact else det_theta_num / 64
    det_a = hyperdet_222(e)
    _require(_close(det_a, det_b, exact), "hyperdeterminant paths disagree")

    # slot-j slice factor equals the theta combination below (pinned numerically;
    # the product over j is the printed lowest-coefficient factor either way)
    combos = (
        th2 * th3 + th1 * th4 - 2 * phi_a,  # slot 1
        th1 * th3 + th2 * th4 - 2 * phi_a,  # slot 2
        th1 * th2 + th3 * th4 - 2 * phi_a,  # slot 3
    )
    f3 = []
    for j in range(1, 4):
        fa = slice_factor(dense, j)
        fb = Fraction(combos[j - 1], 16) if exact else combos[j - 1] / 16
        _require(_close(fa, fb, exact), f"f_(3,{{{j}}}) paths disagree")
        f3.append(fa)

    prod_theta = th1 * th2 * th3 * th4
    norm_phi1 = phi1.norm_sq() if isinstance(phi1, QQi) else abs(complex(phi1)) ** 2
    _require(_close(prod_theta, norm_phi1, exact, tol=1e-9), "theta product vs |phi1|^2")

    return InvariantSet222(
        theta=tuple(theta_a),
        phi=phi_a,
        phi1=phi1,
        det=det_a,
        f3=tuple(f3),
        exact=exact,
    )


def extreme_coeffs_222(t: BinaryTensor | MuTensor) -> tuple[Scalar, Scalar, Scalar]:
    """(a_0, a_5, a_6) of the degree-6 dual distance polynomial of a 2x2x2 tensor.

    a_6 is the theta product, a_0 the squared hyperdeterminant times the three
    quartic factors, and a_5 the printed degree-10 expression whose ratio
    -a_5/a_6 is the sum of the squared singular values.
    """
    inv = invariants_222(t)
    th1, th2, th3, th4 = inv.theta
    a6 = th1 * th2 * th3 * th4
    a0 = inv.det**2 * inv.f3[0] * inv.f3[1] * inv.f3[2]
    triples = th1 * th2 * th3 + th1 * th2 * th4 + th1 * th3 * th4 + th2 * th3 * th4
    a5_num = triples * inv.phi - 3 * a6 * (th1 + th2 + th3 + th4)
    a5 = Fraction(a5_num, 8) if inv.exact else a5_num / 8
    return a0, a5, a6


def _dup_theta_root(inv: InvariantSet222, dup: tuple[int, int], pair_f: Scalar) -> Scalar:
    """Common helper: extra squared singular value = f_pair / theta_dup."""
    th = inv.theta
    exact = inv.exact
    d0, d1 = dup
    if not _close(th[d0], th[d1], exact, tol=1e-9):
        raise FormulaCrossCheckError(
            f"theta_{d0 + 1} and theta_{d1 + 1} should coincide for this symmetry"
        )
    theta_dup = th[d0]
    if (exact and theta_dup == 0) or (not exact and abs(complex(theta_dup)) < 1e-12):
        raise DegenerateInputError("isotropic configuration: the duplicated theta vanishes")
    return pair_f / theta_dup


def extra_root_21(c: MuTensor) -> Scalar:
    """The doubled squared singular value a (2,1)-symmetric tensor has beyond its own four.

    Evaluated from the compressed coordinates as a ratio of sums of squares,
    and cross-checked against the invariant form f_{3,{1}} / theta_dup on the
    expanded tensor (the pair of symmetric slots is 1,2; slots are rotated by
    the same angle, so both are rotation invariant).
    """
    if c.mu.parts != (2, 1):
        raise ValueError(f"need mu = (2,1), got {c.mu}")
    exact = c.exact
    c00, c01 = c[(0, 0)], c[(0, 1)]
    c10, c11 = c[(1, 0)], c[(1, 1)]
    c20, c21 = c[(2, 0)], c[(2, 1)]
    num = (c01 * c10 - c11 * c20 - c00 * c11 + c10 * c21) ** 2 + (c00 * c21 - c01 * c20) ** 2
    den = (c00 + c20) ** 2 + (c01 + c21) ** 2
    if (exact and den == 0) or (not exact and abs(den) < 1e-14):
        raise DegenerateInputError("isotropic configuration: denominator vanishes")
    value = Fraction(num, den) if exact else num / den
    inv = invariants_222(expand(c))
    if not _close(inv.f3[0], inv.f3[1], exact, tol=1e-9):
        raise FormulaCrossCheckError("slot-1 and slot-2 quartic factors should coincide")
    check = _dup_theta_root(inv, (2, 3), inv.f3[0])
    _require(_close(value, check, exact, tol=1e-11), "extra root (2,1): printed forms disagree")
    return value


def extra_root_3(c: MuTensor) -> Scalar:
    """The tripled squared singular value a symmetric 2x2x2 tensor has beyond its three.

    Compressed-coordinate ratio of sums of squares, cross-checked against
    f_{3,{1}} / theta_dup on the expanded tensor.
    """
    if c.mu.parts != (3,):
        raise ValueError(f"need mu = (3), got {c.mu}")
    exact = c.exact
    c0, c1, c2, c3 = c[(0,)], c[(1,)], c[(2,)], c[(3,)]
    num = (c1**2 - c2**2 - c0 * c2 + c1 * c3) ** 2 + (c0 * c3 - c1 * c2) ** 2
    den = (c0 + c2) ** 2 + (c1 + c3) ** 2
    if (exact and den == 0) or (not exact and abs(den) < 1e-14):
        raise DegenerateInputError("isotropic configuration: denominator vanishes")
    value = Fraction(num, den) if exact else num / den
    inv = invariants_222(expand(c))
    check = _dup_theta_root(inv, (1, 2), inv.f3[0])
    _require(_close(value, check, exact, tol=1e-11), "extra root (3): printed forms disagree")
    return value


def pair_factor_4(t: BinaryTensor, pair: tuple[int, int] = (1, 2)) -> Scalar:
    """f_{4,J} for a two-element J: product of four determinants of doubly complexified slices.

    Implemented natively for J = {1,2} from the four matrix slices t^(rs)
    (r, s the bits of the paired slots); other pairs by slot permutation.
    Real and nonnegative on real input.
    """
    if t.d != 4:
        raise ValueError("pair factors are defined for order 4")
    j, k = sorted(pair)
    if not (1 <= j < k <= 4):
        raise ValueError(f"bad pair {pair}")
    order = [j - 1, k - 1] + [l for l in range(4) if l not in (j - 1, k - 1)]
    u = permute_slots(t, order)
    exact = u.exact

    def mat(r: int, s: int) -> list[list[Scalar]]:
        return [[u[(r, s, a, b)] for b in (0, 1)] for a in (0, 1)]

    i_unit: Scalar = QQi(Fraction(0), Fraction(1)) if exact else 1j

    def combine(m1: list[list[Scalar]], m2: list[list[Scalar]], sign: int) -> list[list[Scalar]]:
        si = i_unit if sign > 0 else -i_unit
        out = []
        for r in (0, 1):
            row = []
            for s in (0, 1):
                a, b = m1[r][s], m2[r][s]
                row.append(si * b + (a if exact else complex(a)))
            out.append(row)
        return out

    m00, m01, m10, m11 = mat(0, 0), mat(0, 1), mat(1, 0), mat(1, 1)
    a_plus = combine(m00, m10, +1)   # t00 + i t10
    b_plus = combine(m01, m11, +1)   # t01 + i t11
    a_minus = combine(m00, m10, -1)
    b_minus = combine(m01, m11, -1)
    value = (
        _det_mat2(combine(a_plus, b_plus, +1))
        * _det_mat2(combine(a_plus, b_plus, -1))
        * _det_mat2(combine(a_minus, b_minus, +1))
        * _det_mat2(combine(a_minus, b_minus, -1))
    )
    if exact:
        assert isinstance(value, QQi)
        _require(value.im == 0, "pair factor not real")
        return value.re
    value = complex(value)
    scale = max(1.0, t.norm() ** 8)
    _require(abs(value.imag) <= 1e-12 * scale, "pair factor imaginary part too large")
    return value.real


def isotropic_factor_symmetric(c: MuTensor) -> Scalar:
    """Delta_Q of a symmetric binary form: the pairing with the two isotropic d-th powers.

    A + iB is the form evaluated at (1, i); the value is A^2 + B^2, zero
    exactly when the form is apolar to one (hence both) of the conjugate
    isotropic powers.
    """
    if c.mu.s != 1:
        raise ValueError("need a fully symmetric tensor, mu = (d)")
    d = c.mu.d
    exact = c.exact
    a: Scalar = 0
    b: Scalar = 0
    for jj in range(d + 1):
        w = math.comb(d, jj) * c[(jj,)]
        r = jj % 4
        if r == 0:
            a = a + w
        elif r == 1:
            b = b + w
        elif r == 2:
            a = a - w
        else:
            b = b - w
    return a * a + b * b


def combine_slice_matrix(t: BinaryTensor, j: int, sign: int) -> list[list[Scalar]]:
    """Public view of slice(j,0) + sign*i*slice(j,1) for order-3 input, used in tests."""
    return _slice_pair_matrix(t, j, sign)
