"""Matrix Lie group and Lie algebra arithmetic.

Every group in play is a concrete matrix group: U(n), SU(n), SO(n), U(1),
cyclic groups of roots of unity, the trivial group, and the additive reals
realized multiplicatively as the positive reals exp(x) in 1x1 matrices.
Elements carry a reference to their owning group instance so that
mixed-group arithmetic is rejected instead of silently producing garbage.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

FROBENIUS_DRIFT_REPROJECT = 1e-12
FROBENIUS_DRIFT_ERROR = 1e-8


class LieError(Exception):
    pass


class GroupMismatchError(LieError):
    pass


class MembershipError(LieError):
    pass


class BranchCutError(LieError):
    """Raised when a principal matrix logarithm is ambiguous."""


class GroupElement:
    __slots__ = ("matrix", "group")

    def __init__(self, matrix: np.ndarray, group: "MatrixGroup"):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.group = group

    @property
    def group_id(self) -> str:
        return self.group.name

    def __repr__(self):
        return f"GroupElement({self.group.name}, {np.array2string(self.matrix, precision=6)})"


class AlgebraElement:
    __slots__ = ("matrix", "group")

    def __init__(self, matrix: np.ndarray, group: "MatrixGroup"):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.group = group

    @property
    def algebra_id(self) -> str:
        return self.group.name

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_group(self, other)
        return AlgebraElement(self.matrix + other.matrix, self.group)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _same_group(self, other)
        return AlgebraElement(self.matrix - other.matrix, self.group)

    def __rmul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(scalar * self.matrix, self.group)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.matrix, self.group)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def __repr__(self):
        return f"AlgebraElement({self.group.name}, {np.array2string(self.matrix, precision=6)})"


def _same_group(a, b):
    if a.group is not b.group and a.group.name != b.group.name:
        raise GroupMismatchError(f"mixed groups: {a.group.name} vs {b.group.name}")


class MatrixGroup:
    """A concrete matrix Lie group instance.

    kind is one of "unitary", "special_unitary", "special_orthogonal",
    "additive_reals", "cyclic", "trivial".  The Lie algebra basis is an
    ordered list of matrices; it is empty for the discrete kinds.
    """

    def __init__(self, name: str, kind: str, dim: int, order: int = 0):
        self.name = name
        self.kind = kind
        self.dim = dim
        self.order = order  # cyclic groups only
        self.basis = [AlgebraElement(m, self) for m in _algebra_basis(kind, dim)]

    # -- basic elements -------------------------------------------------

    def identity(self) -> GroupElement:
        return GroupElement(np.eye(self.dim), self)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(np.zeros((self.dim, self.dim)), self)

    def element(self, matrix) -> GroupElement:
        g = GroupElement(matrix, self)
        defect = self.membership_defect(g.matrix)
        if defect > FROBENIUS_DRIFT_ERROR:
            raise MembershipError(f"matrix is not in {self.name} (defect {defect:.3e})")
        if defect > FROBENIUS_DRIFT_REPROJECT:
            g = GroupElement(self.project(g.matrix), self)
        return g

    def algebra_element(self, matrix) -> AlgebraElement:
        x = AlgebraElement(matrix, self)
        if self.algebra_defect(x.matrix) > FROBENIUS_DRIFT_ERROR:
            raise MembershipError(f"matrix is not in the Lie algebra of {self.name}")
        return x

    def from_coefficients(self, coeffs) -> AlgebraElement:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        for c, e in zip(coeffs, self.basis):
            m = m + c * e.matrix
        return AlgebraElement(m, self)

    # -- membership -----------------------------------------------------

    def membership_defect(self, m: np.ndarray) -> float:
        if m.shape != (self.dim, self.dim):
            raise MembershipError(f"wrong shape {m.shape} for {self.name}")
        eye = np.eye(self.dim)
        if self.kind == "unitary":
            return float(np.linalg.norm(m.conj().T @ m - eye))
        if self.kind == "special_unitary":
            return float(np.linalg.norm(m.conj().T @ m - eye)) + abs(np.linalg.det(m) - 1.0)
        if self.kind == "special_orthogonal":
            return (float(np.linalg.norm(m.conj().T @ m - eye))
                    + float(np.linalg.norm(m.imag))
                    + abs(np.linalg.det(m).real - 1.0))
        if self.kind == "additive_reals":
            z = m[0, 0]
            return float(abs(z.imag)) + float(max(0.0, -z.real))
        if self.kind == "cyclic":
            z = m[0, 0]
            return float(min(abs(z - r) for r in self._roots()))
        if self.kind == "trivial":
            return float(np.linalg.norm(m - eye))
        raise LieError(f"unknown kind {self.kind}")

    def algebra_defect(self, m: np.ndarray) -> float:
        if m.shape != (self.dim, self.dim):
            raise MembershipError(f"wrong shape {m.shape} for algebra of {self.name}")
        if self.kind in ("cyclic", "trivial"):
            return float(np.linalg.norm(m))
        if self.kind == "additive_reals":
            return float(abs(m[0, 0].imag))
        d = float(np.linalg.norm(m + m.conj().T))
        if self.kind == "special_unitary":
            d += abs(np.trace(m))
        elif self.kind == "special_orthogonal":
            d += float(np.linalg.norm(m.imag))
        return d

    def _roots(self):
        return [np.exp(2j * np.pi * k / self.order) for k in range(self.order)]

    # -- projection back onto the group ----------------------------------

    def project(self, m: np.ndarray) -> np.ndarray:
        """Nearest group element (polar decomposition for the compact kinds)."""
        if self.kind in ("unitary", "special_unitary"):
            w, _, vh = np.linalg.svd(m)
            u = w @ vh
            if self.kind == "special_unitary":
                u = u * np.linalg.det(u) ** (-1.0 / self.dim)
            return u
        if self.kind == "special_orthogonal":
            w, _, vh = np.linalg.svd(m.real)
            r = w @ vh
            if np.linalg.det(r) < 0:
                w[:, -1] = -w[:, -1]
                r = w @ vh
            return r.astype(complex)
        if self.kind == "additive_reals":
            return np.array([[abs(m[0, 0].real)]], dtype=complex)
        if self.kind == "cyclic":
            z = m[0, 0]
            return np.array([[min(self._roots(), key=lambda r: abs(z - r))]])
        if self.kind == "trivial":
            return np.eye(self.dim, dtype=complex)
        raise LieError(f"unknown kind {self.kind}")

    def project_algebra(self, m: np.ndarray) -> np.ndarray:
        if self.kind in ("cyclic", "trivial"):
            return np.zeros((self.dim, self.dim), dtype=complex)
        if self.kind == "additive_reals":
            return np.array([[m[0, 0].real]], dtype=complex)
        x = 0.5 * (m - m.conj().T)
        if self.kind == "special_unitary":
            x = x - (np.trace(x) / self.dim) * np.eye(self.dim)
        elif self.kind == "special_orthogonal":
            x = x.real.astype(complex)
        return x

    # -- seeded random sampling -------------------------------------------

    def random(self, rng: np.random.Generator, scale: float = 0.7) -> GroupElement:
        if self.kind == "trivial":
            return self.identity()
        if self.kind == "cyclic":
            k = int(rng.integers(self.order))
            return GroupElement(np.array([[np.exp(2j * np.pi * k / self.order)]]), self)
        return exp(self.random_algebra(rng, scale))

    def random_algebra(self, rng: np.random.Generator, scale: float = 0.7) -> AlgebraElement:
        if not self.basis:
            return self.zero()
        return self.from_coefficients(rng.normal(0.0, scale, size=len(self.basis)))

    def __repr__(self):
        return f"MatrixGroup({self.name})"


def _algebra_basis(kind: str, dim: int):
    if kind in ("cyclic", "trivial"):
        return []
    if kind == "additive_reals":
        return [np.array([[1.0]], dtype=complex)]
    out = []
    if kind in ("unitary", "special_unitary"):
        if kind == "unitary":
            for k in range(dim):
                m = np.zeros((dim, dim), dtype=complex)
                m[k, k] = 1j
                out.append(m)
        else:
            for k in range(dim - 1):
                m = np.zeros((dim, dim), dtype=complex)
                m[k, k] = 1j
                m[k + 1, k + 1] = -1j
                out.append(m)
        for i in range(dim):
            for j in range(i + 1, dim):
                m = np.zeros((dim, dim), dtype=complex)
                m[i, j] = 1.0
                m[j, i] = -1.0
                out.append(m)
                m = np.zeros((dim, dim), dtype=complex)
                m[i, j] = 1j
                m[j, i] = 1j
                out.append(m)
    elif kind == "special_orthogonal":
        for i in range(dim):
            for j in range(i + 1, dim):
                m = np.zeros((dim, dim), dtype=complex)
                m[i, j] = -1.0
                m[j, i] = 1.0
                out.append(m)
    return out


# -- builtin instances, one shared object per config name --------------------

def _su2_basis():
    # T_k = -(i/2) sigma_k, so [T1,T2] = T3 cyclically
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return [-0.5j * s1, -0.5j * s2, -0.5j * s3]


def _so3_basis():
    # (L_k)_ij = -eps_{kij}; [L1,L2] = L3, matching the su(2) basis under Ad
    def eps(i, j, k):
        return (i - j) * (j - k) * (k - i) / 2
    out = []
    for k in range(3):
        m = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                m[i, j] = -eps(k, i, j)
        out.append(m.astype(complex))
    return out


_REGISTRY: dict[str, MatrixGroup] = {}


def group(name: str) -> MatrixGroup:
    """Builtin group instance by config name: U1, SU2, SO3, U2, R, Z2, Trivial."""
    if name not in _REGISTRY:
        if name == "U1":
            g = MatrixGroup("U1", "unitary", 1)
        elif name == "SU2":
            g = MatrixGroup("SU2", "special_unitary", 2)
            g.basis = [AlgebraElement(m, g) for m in _su2_basis()]
        elif name == "SO3":
            g = MatrixGroup("SO3", "special_orthogonal", 3)
            g.basis = [AlgebraElement(m, g) for m in _so3_basis()]
        elif name == "U2":
            g = MatrixGroup("U2", "unitary", 2)
        elif name == "R":
            g = MatrixGroup("R", "additive_reals", 1)
        elif name.startswith("Z") and name[1:].isdigit():
            g = MatrixGroup(name, "cyclic", 1, order=int(name[1:]))
        elif name == "Trivial":
            g = MatrixGroup("Trivial", "trivial", 1)
        else:
            raise LieError(f"unknown group name {name!r}")
        _REGISTRY[name] = g
    return _REGISTRY[name]


# -- operations --------------------------------------------------------------

def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _same_group(a, b)
    m = a.matrix @ b.matrix
    defect = a.group.membership_defect(m)
    if defect > FROBENIUS_DRIFT_ERROR:
        raise MembershipError(f"product left {a.group.name} (defect {defect:.3e})")
    if defect > FROBENIUS_DRIFT_REPROJECT:
        m = a.group.project(m)
    return GroupElement(m, a.group)


def inverse(a: GroupElement) -> GroupElement:
    g = a.group
    if g.kind in ("unitary", "special_unitary", "special_orthogonal"):
        return GroupElement(a.matrix.conj().T, g)
    return GroupElement(np.linalg.inv(a.matrix), g)


def exp(x: AlgebraElement) -> GroupElement:
    g = x.group
    if not g.basis:
        if float(np.linalg.norm(x.matrix)) > FROBENIUS_DRIFT_ERROR:
            raise MembershipError(f"nonzero algebra element for discrete group {g.name}")
        return g.identity()
    m = _expm(x.matrix)
    if g.membership_defect(m) > FROBENIUS_DRIFT_REPROJECT:
        m = g.project(m)
    return GroupElement(m, g)


def log(a: GroupElement) -> AlgebraElement:
    g = a.group
    if not g.basis:
        if g.membership_defect(a.matrix) < FROBENIUS_DRIFT_ERROR and \
                float(np.linalg.norm(a.matrix - np.eye(g.dim))) < FROBENIUS_DRIFT_ERROR:
            return g.zero()
        raise BranchCutError(f"log on discrete group {g.name} away from identity")
    ev = np.linalg.eigvals(a.matrix)
    for lam in ev:
        if lam.real < 0 and abs(lam.imag) < 1e-12 * max(1.0, abs(lam.real)):
            raise BranchCutError("eigenvalue on the negative real axis; principal log undefined")
    m = _logm(a.matrix)
    return AlgebraElement(g.project_algebra(m), g)


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    _same_group(x, y)
    return AlgebraElement(x.matrix @ y.matrix - y.matrix @ x.matrix, x.group)


def adjoint(g: GroupElement, y: AlgebraElement) -> AlgebraElement:
    """Ad_g(y) = g y g^-1."""
    return AlgebraElement(g.matrix @ y.matrix @ inverse(g).matrix, y.group)


def distance(a: GroupElement, b: GroupElement) -> float:
    _same_group(a, b)
    return float(np.linalg.norm(a.matrix - b.matrix))


def _is_normal(m: np.ndarray) -> bool:
    return bool(np.linalg.norm(m @ m.conj().T - m.conj().T @ m)
                < 1e-13 * max(1.0, float(np.linalg.norm(m)) ** 2))


def _expm(m: np.ndarray) -> np.ndarray:
    # all builtin algebras consist of normal matrices, where the spectral
    # route is exact; scaling-and-squaring Pade(13) covers the rest
    if _is_normal(m):
        w, v = np.linalg.eig(m)
        return v @ np.diag(np.exp(w)) @ np.linalg.inv(v)
    return scipy.linalg.expm(m)


def _logm(m: np.ndarray) -> np.ndarray:
    if _is_normal(m):
        w, v = np.linalg.eig(m)
        return v @ np.diag(np.log(w)) @ np.linalg.inv(v)
    return scipy.linalg.logm(m)
