"""Dense multivector arithmetic for the Euclidean Clifford algebras over R^2 and R^3.

Coefficients live in plain float64 arrays over a fixed blade order:

    R_2: (1, e1, e2, e12)
    R_3: (1, e1, e2, e3, e12, e23, e31, e123)

The third bivector slot stores e31, not e13 (e31 = -e13). Products are
computed on ascending-index blades and re-signed into the canonical slots,
so that orientation choice is a relabeling applied exactly once, when the
sign tables below are built. The tables are precomputed at import time
because the blade-pair product is the hot inner kernel of the spectral
operators built on top of this module.

All operations are pure functions on immutable values and are safe to call
concurrently.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

BLADE_NAMES_2 = ("1", "e1", "e2", "e12")
BLADE_NAMES_3 = ("1", "e1", "e2", "e3", "e12", "e23", "e31", "e123")

# Each canonical slot is an ascending basis-vector index tuple plus the
# orientation of the stored blade relative to that ascending product.
# Only e31 is stored against the ascending orientation.
_BLADES_2 = ((), (1,), (2,), (1, 2))
_ORIENT_2 = (1, 1, 1, 1)
_BLADES_3 = ((), (1,), (2,), (3,), (1, 2), (2, 3), (1, 3), (1, 2, 3))
_ORIENT_3 = (1, 1, 1, 1, 1, 1, -1, 1)


def _sort_count(seq: Iterable[int]) -> tuple[int, list[int]]:
    """Bubble-sort basis-vector indices, tracking the permutation sign.

    Each swap of two distinct indices is one application of
    e_i e_j = -e_j e_i. Equal indices are never swapped, so repeated
    vectors end up adjacent, ready for contraction.
    """
    seq = list(seq)
    sign = 1
    swapped = True
    while swapped:
        swapped = False
        for k in range(len(seq) - 1):
            if seq[k] > seq[k + 1]:
                seq[k], seq[k + 1] = seq[k + 1], seq[k]
                sign = -sign
                swapped = True
    return sign, seq


def _blade_times_blade(t1: tuple, t2: tuple) -> tuple[int, tuple]:
    """Product of two ascending-index blades: (sign, ascending index tuple)."""
    sign, seq = _sort_count(t1 + t2)
    out = []
    k = 0
    while k < len(seq):
        if k + 1 < len(seq) and seq[k] == seq[k + 1]:
            k += 2  # e_i e_i = +1 in the Euclidean signature
        else:
            out.append(seq[k])
            k += 1
    return sign, tuple(out)


def _build_tables(blades, orient):
    """Precompute geometric and wedge product tables for one algebra.

    Returns two (I, J, K, S) tuples of flat arrays meaning
    blade[I] * blade[J] = S * blade[K]; the wedge table keeps only the
    pairs with disjoint index sets (for basis blades the geometric and
    outer products agree there, and the outer product vanishes otherwise).
    """
    slot_of = {t: k for k, t in enumerate(blades)}
    gp_i, gp_j, gp_k, gp_s = [], [], [], []
    w_i, w_j, w_k, w_s = [], [], [], []
    for i, ti in enumerate(blades):
        for j, tj in enumerate(blades):
            sign, t = _blade_times_blade(ti, tj)
            k = slot_of[t]
            s = sign * orient[i] * orient[j] * orient[k]
            gp_i.append(i)
            gp_j.append(j)
            gp_k.append(k)
            gp_s.append(s)
            if not set(ti) & set(tj):
                w_i.append(i)
                w_j.append(j)
                w_k.append(k)
                w_s.append(s)
    as_arrays = lambda *ls: tuple(np.asarray(l) for l in ls)  # noqa: E731
    return (
        as_arrays(gp_i, gp_j, gp_k, np.float64(gp_s)),
        as_arrays(w_i, w_j, w_k, np.float64(w_s)),
    )


_GP_2, _WEDGE_2 = _build_tables(_BLADES_2, _ORIENT_2)
_GP_3, _WEDGE_3 = _build_tables(_BLADES_3, _ORIENT_3)


def _apply_table(table, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bilinear blade product over the trailing axis of broadcastable arrays."""
    ti, tj, tk, ts = table
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    out = np.zeros(shape + (a.shape[-1],))
    for i, j, k, s in zip(ti, tj, tk, ts):
        out[..., k] += s * a[..., i] * b[..., j]
    return out


class _Multivector:
    """Shared machinery; use the Multivector2 / Multivector3 subclasses."""

    __slots__ = ("_c",)
    _NAMES: tuple = ()
    _GP: tuple = ()
    _WEDGE: tuple = ()

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=np.float64)
        if c.shape != (len(self._NAMES),):
            raise ValueError(
                f"{type(self).__name__} needs {len(self._NAMES)} coefficients, "
                f"got shape {c.shape}"
            )
        c.setflags(write=False)
        self._c = c

    # construction helpers

    @classmethod
    def zero(cls):
        return cls(np.zeros(len(cls._NAMES)))

    @classmethod
    def from_scalar(cls, a: float):
        c = np.zeros(len(cls._NAMES))
        c[0] = a
        return cls(c)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=np.float64)
        n = 2 if len(cls._NAMES) == 4 else 3
        if v.shape != (n,):
            raise ValueError(f"expected a length-{n} vector, got shape {v.shape}")
        c = np.zeros(len(cls._NAMES))
        c[1 : 1 + n] = v
        return cls(c)

    @classmethod
    def basis(cls, name: str):
        """Unit blade by name, e.g. Multivector3.basis('e23')."""
        try:
            idx = cls._NAMES.index(name)
        except ValueError:
            raise ValueError(f"unknown blade {name!r}; choose from {cls._NAMES}") from None
        c = np.zeros(len(cls._NAMES))
        c[idx] = 1.0
        return cls(c)

    # grade access

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only coefficient array in canonical blade order."""
        return self._c

    @property
    def scalar(self) -> float:
        return float(self._c[0])

    @property
    def pseudoscalar(self) -> float:
        return float(self._c[-1])

    @property
    def vector(self) -> np.ndarray:
        n = 2 if len(self._NAMES) == 4 else 3
        return self._c[1 : 1 + n].copy()

    @property
    def bivector(self) -> np.ndarray:
        if len(self._NAMES) == 4:
            return self._c[3:4].copy()
        return self._c[4:7].copy()

    def is_vector(self) -> bool:
        n = 2 if len(self._NAMES) == 4 else 3
        mask = np.zeros(len(self._NAMES), dtype=bool)
        mask[1 : 1 + n] = True
        return bool(np.all(self._c[~mask] == 0.0))

    # arithmetic

    def __add__(self, other):
        self._check_same(other)
        return type(self)(self._c + other._c)

    def __sub__(self, other):
        self._check_same(other)
        return type(self)(self._c - other._c)

    def __neg__(self):
        return type(self)(-self._c)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return type(self)(self._c * float(other))
        self._check_same(other)
        return type(self)(_apply_table(self._GP, self._c, other._c))

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return type(self)(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        return type(self)(self._c / float(other))

    def __xor__(self, other):
        self._check_same(other)
        return type(self)(_apply_table(self._WEDGE, self._c, other._c))

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    __hash__ = None  # mutable-free but float-exact equality; not for dict keys

    def isclose(self, other, atol: float = 1e-12) -> bool:
        self._check_same(other)
        return bool(np.allclose(self._c, other._c, rtol=0.0, atol=atol))

    def _check_same(self, other):
        if type(other) is not type(self):
            raise TypeError(
                f"expected {type(self).__name__}, got {type(other).__name__}"
            )

    def __repr__(self):
        terms = [
            f"{c:g}*{n}" if n != "1" else f"{c:g}"
            for c, n in zip(self._c, self._NAMES)
            if c != 0.0
        ]
        body = " + ".join(terms) if terms else "0"
        return f"{type(self).__name__}({body})"


class Multivector2(_Multivector):
    """Element of the Clifford algebra of the Euclidean plane, blades (1, e1, e2, e12)."""

    __slots__ = ()
    _NAMES = BLADE_NAMES_2
    _GP = _GP_2
    _WEDGE = _WEDGE_2


class Multivector3(_Multivector):
    """Element of the Clifford algebra of Euclidean 3-space.

    Blade order (1, e1, e2, e3, e12, e23, e31, e123). The pseudoscalar
    e123 squares to -1 and commutes with everything; the plane bivectors
    square to -1 as well.
    """

    __slots__ = ()
    _NAMES = BLADE_NAMES_3
    _GP = _GP_3
    _WEDGE = _WEDGE_3


def geometric_product(a, b):
    """Geometric (Clifford) product of two multivectors of the same algebra.

    Bilinear and associative; on basis vectors it satisfies e_i e_i = 1 and
    e_i e_j = -e_j e_i for i != j. Total on all inputs.
    """
    return a * b


def wedge(a, b):
    """Outer product. For vectors x, y it equals (xy - yx)/2 and x ^ x = 0."""
    return a ^ b


def vector_dot(a, b) -> float:
    """Euclidean inner product of two pure vectors.

    Equals the scalar part of the symmetrized geometric product (xy + yx)/2.
    Raises if either argument carries non-vector blades.
    """
    if not (a.is_vector() and b.is_vector()):
        raise ValueError("vector_dot is defined for pure vectors only")
    return float(np.dot(a.vector, b.vector))


def pseudoscalar_square(dim: int) -> float:
    """Square of the unit pseudoscalar (e12 or e123), recomputed via the product table."""
    if dim == 2:
        i_n = Multivector2.basis("e12")
    elif dim == 3:
        i_n = Multivector3.basis("e123")
    else:
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    return (i_n * i_n).scalar


def exp_pseudoscalar(gamma: float, dim: int):
    """exp(i_n * gamma) = cos(gamma) + i_n sin(gamma).

    The closed form holds because the pseudoscalar squares to -1, so its
    exponential series splits into the cosine and sine series.
    """
    gamma = float(gamma)
    if not np.isfinite(gamma):
        raise ValueError("gamma must be finite")
    if dim == 2:
        cls = Multivector2
    elif dim == 3:
        cls = Multivector3
    else:
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    c = np.zeros(len(cls._NAMES))
    c[0] = np.cos(gamma)
    c[-1] = np.sin(gamma)
    return cls(c)


def commutes_with_pseudoscalar(m: Multivector2) -> tuple[Multivector2, Multivector2]:
    """Split a planar multivector by its commutation behavior with e12.

    Returns (commuting, anticommuting): the scalar+bivector part satisfies
    i2 c = c i2, the vector part satisfies i2 v = -v i2, and the two parts
    sum back to m. This split is what makes the planar spectral derivative
    rule two-sided (see the 2D gradient operator).
    """
    if type(m) is not Multivector2:
        raise TypeError(f"expected Multivector2, got {type(m).__name__}")
    c = np.array(m.coeffs)
    com = np.array([c[0], 0.0, 0.0, c[3]])
    anti = np.array([0.0, c[1], c[2], 0.0])
    return Multivector2(com), Multivector2(anti)


def geometric_product_field(a: np.ndarray, b: np.ndarray, dim: int = 3) -> np.ndarray:
    """Pointwise geometric product over the trailing blade axis.

    a and b are broadcast-compatible arrays whose last axis holds blade
    coefficients (4 for dim=2, 8 for dim=3). This is the vectorized kernel
    the spectral operators use to left-multiply whole spectra by multivector
    symbols without a Python-level loop over grid bins.
    """
    n = 4 if dim == 2 else 8
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if a.shape[-1] != n or b.shape[-1] != n:
        raise ValueError(f"trailing axis must have length {n} for dim={dim}")
    return _apply_table(_GP_2 if dim == 2 else _GP_3, a, b)
