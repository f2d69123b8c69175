"""Float kernels for the Nijenhuis residual and the pattern-search descent.

Two backends compute the same quantities: numba-compiled loops over the
sparse structure constants (default) and a batched numpy path.  Setting
``HCX_DISABLE_NUMBA=1`` selects numpy; so does a missing numba install.
``HCX_THREADS`` caps the numba thread count.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..liealg import LieAlgebra

_DISABLED = os.environ.get("HCX_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("numba disabled by HCX_DISABLE_NUMBA")
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

if HAVE_NUMBA and not os.environ.get("NUMBA_THREADING_LAYER"):
    # the tbb layer warns on older system tbb; workqueue is always present
    numba.config.THREADING_LAYER = "workqueue"

if HAVE_NUMBA and os.environ.get("HCX_THREADS"):
    numba.set_num_threads(max(1, min(int(os.environ["HCX_THREADS"]), numba.config.NUMBA_NUM_THREADS)))

INFEASIBLE = np.inf


@dataclass(frozen=True)
class Structure:
    """Structure constants in dense and compressed forms."""

    dense: np.ndarray  # C[i, j, k]
    nz_i: np.ndarray
    nz_j: np.ndarray
    nz_k: np.ndarray
    nz_c: np.ndarray
    # by second index b: entries (i, k, c) with [e_i, e_b] = c e_k
    ptr: np.ndarray
    col_i: np.ndarray
    col_k: np.ndarray
    col_c: np.ndarray

    @property
    def dim(self) -> int:
        return self.dense.shape[0]

    @classmethod
    def from_algebra(cls, g: LieAlgebra) -> "Structure":
        n = g.dim
        dense = np.zeros((n, n, n))
        for (i, j, k), c in g.structure.items():
            dense[i, j, k] = float(c)
        i, j, k = np.nonzero(dense)
        c = dense[i, j, k]
        order = np.lexsort((k, i, j))
        bi, bj, bk, bc = i[order], j[order], k[order], c[order]
        ptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(ptr, bj + 1, 1)
        ptr = np.cumsum(ptr)
        as_i = lambda a: np.ascontiguousarray(a, dtype=np.int64)  # noqa: E731
        return cls(dense, as_i(i), as_i(j), as_i(k), np.ascontiguousarray(c),
                   ptr, as_i(bi), as_i(bk), np.ascontiguousarray(bc))

    def args(self) -> tuple:
        return (self.dense, self.nz_i, self.nz_j, self.nz_k, self.nz_c,
                self.ptr, self.col_i, self.col_k, self.col_c)


# ---------------------------------------------------------------------------
# numpy backend (batched over a leading axis)


def structure_residual_np(M: np.ndarray, C: np.ndarray) -> np.ndarray:
    """sum_{a<b} |N_M(e_a, e_b)|^2 for a batch of matrices M[z]."""
    M = np.asarray(M, dtype=float)
    single = M.ndim == 2
    if single:
        M = M[None]
    z, n, _ = M.shape
    # T1[z,a,b,k] = [M e_a, e_b]_k = sum_i M[z,i,a] C[i,b,k]
    T1 = (M.transpose(0, 2, 1) @ C.reshape(n, n * n)).reshape(z, n, n, n)
    # T2[z,a,b,k] = [e_a, M e_b]_k = -T1[z,b,a,k]
    S = T1 - T1.transpose(0, 2, 1, 3)
    # T3[z,a,b,k] = [M e_a, M e_b]_k = sum_j M[z,j,b] T1[z,a,j,k]
    T3 = np.einsum("zajk,zjb->zabk", T1, M, optimize=True)
    MS = (S.reshape(z, n * n, n) @ M.transpose(0, 2, 1)).reshape(z, n, n, n)
    N = MS + C[None] - T3
    out = 0.5 * np.einsum("zabk,zabk->z", N, N)
    return out[0] if single else out


def conjugate_np(P: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P Q_s P^-1 for each base structure Q_s; returns (mats[z,s], ratio[z])."""
    P = np.asarray(P, dtype=float)
    Pinv = np.linalg.inv(P)
    ratio = np.linalg.norm(P, axis=(-2, -1)) * np.linalg.norm(Pinv, axis=(-2, -1))
    mats = P[:, None] @ Q[None] @ Pinv[:, None]
    return mats, ratio


def triple_residuals_np(P: np.ndarray, Q: np.ndarray, C: np.ndarray, cap: float = np.inf) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    out = np.full(P.shape[0], INFEASIBLE)
    with np.errstate(all="ignore"):
        try:
            mats, ratio = conjugate_np(P, Q)
            ok = np.isfinite(ratio) & (ratio <= cap)
        except np.linalg.LinAlgError:
            ok = np.zeros(P.shape[0], dtype=bool)
            mats = None
            for z in range(P.shape[0]):
                try:
                    m, r = conjugate_np(P[z:z + 1], Q)
                except np.linalg.LinAlgError:
                    continue
                if mats is None:
                    mats = np.zeros((P.shape[0],) + m.shape[1:])
                mats[z] = m[0]
                ok[z] = np.isfinite(r[0]) and r[0] <= cap
        if ok.any():
            sel = mats[ok]
            z, s, n, _ = sel.shape
            out[ok] = structure_residual_np(sel.reshape(z * s, n, n), C).reshape(z, s).sum(axis=1)
    return out


def descend_np(P0: np.ndarray, Q: np.ndarray, C: np.ndarray, steps: int, h0: float, shrink: float,
               h_min: float, cap: float) -> tuple[np.ndarray, np.ndarray]:
    """Opportunistic coordinate pattern search, all trials in lockstep."""
    P = np.array(P0, dtype=float, copy=True)
    z, n, _ = P.shape
    f = triple_residuals_np(P, Q, C, cap)
    h = np.full(z, h0)
    active = np.isfinite(f)
    for _ in range(steps):
        if not active.any():
            break
        improved = np.zeros(z, dtype=bool)
        for r in range(n):
            for c in range(n):
                pending = active.copy()
                for sgn in (1.0, -1.0):
                    idx = np.nonzero(pending)[0]
                    if idx.size == 0:
                        break
                    trial = P[idx].copy()
                    trial[:, r, c] += sgn * h[idx]
                    ft = triple_residuals_np(trial, Q, C, cap)
                    better = ft < f[idx]
                    win = idx[better]
                    P[win] = trial[better]
                    f[win] = ft[better]
                    improved[win] = True
                    pending[win] = False
        stuck = active & ~improved
        h[stuck] *= shrink
        active &= h >= h_min
    return P, f


# ---------------------------------------------------------------------------
# numba backend

if HAVE_NUMBA:

    @njit(cache=True, fastmath=True)
    def _structure_residual_nb(M, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c):
        n = M.shape[0]
        nnz = nz_i.shape[0]
        MT = M.T.copy()  # row a is the image of e_a
        N = np.empty(n)
        total = 0.0
        for a in range(n):
            ra = MT[a]
            for b in range(a + 1, n):
                rb = MT[b]
                for k in range(n):
                    N[k] = dense[a, b, k]
                # M([M e_a, e_b] + [e_a, M e_b]); each bracket has few entries
                for p in range(ptr[b], ptr[b + 1]):
                    w = col_c[p] * ra[col_i[p]]
                    ck = col_k[p]
                    for k in range(n):
                        N[k] += MT[ck, k] * w
                for p in range(ptr[a], ptr[a + 1]):
                    w = col_c[p] * rb[col_i[p]]
                    ck = col_k[p]
                    for k in range(n):
                        N[k] -= MT[ck, k] * w
                for q in range(nnz):
                    N[nz_k[q]] -= nz_c[q] * ra[nz_i[q]] * rb[nz_j[q]]
                s = 0.0
                for k in range(n):
                    s += N[k] * N[k]
                total += s
        return total

    @njit(cache=True)
    def _invert(P, Pinv, work):
        """Gauss-Jordan with partial pivoting; False when (numerically) singular."""
        n = P.shape[0]
        for i in range(n):
            for j in range(n):
                work[i, j] = P[i, j]
                Pinv[i, j] = 1.0 if i == j else 0.0
        for col in range(n):
            piv = col
            best = abs(work[col, col])
            for r in range(col + 1, n):
                if abs(work[r, col]) > best:
                    best = abs(work[r, col])
                    piv = r
            if best == 0.0 or not np.isfinite(best):
                return False
            if piv != col:
                for j in range(n):
                    work[col, j], work[piv, j] = work[piv, j], work[col, j]
                    Pinv[col, j], Pinv[piv, j] = Pinv[piv, j], Pinv[col, j]
            d = 1.0 / work[col, col]
            for j in range(n):
                work[col, j] *= d
                Pinv[col, j] *= d
            for r in range(n):
                if r != col:
                    f = work[r, col]
                    if f != 0.0:
                        for j in range(n):
                            work[r, j] -= f * work[col, j]
                            Pinv[r, j] -= f * Pinv[col, j]
        return True

    @njit(cache=True)
    def _triple_residual_nb(P, perm, sign, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c):
        """Base structures are signed permutations: Q_s e_c = sign[s,c] e_perm[s,c]."""
        n = P.shape[0]
        Pinv = np.empty((n, n))
        work = np.empty((n, n))
        if not _invert(P, Pinv, work):
            return np.inf
        a = 0.0
        b = 0.0
        for i in range(n):
            for j in range(n):
                a += P[i, j] * P[i, j]
                b += Pinv[i, j] * Pinv[i, j]
        if not (np.sqrt(a * b) <= cap):
            return np.inf
        M = np.empty((n, n))
        total = 0.0
        for s in range(perm.shape[0]):
            # M = (P Q_s) Pinv, and column c of P Q_s is sign * P[:, perm[c]]
            for i in range(n):
                for j in range(n):
                    M[i, j] = 0.0
            for c in range(n):
                pc = perm[s, c]
                sg = sign[s, c]
                for j in range(n):
                    w = sg * Pinv[c, j]
                    if w != 0.0:
                        for i in range(n):
                            M[i, j] += P[i, pc] * w
            total += _structure_residual_nb(M, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c)
        return total

    @njit(cache=True, parallel=True)
    def _triple_residuals_nb(Ps, perm, sign, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c):
        out = np.empty(Ps.shape[0])
        for z in prange(Ps.shape[0]):
            out[z] = _triple_residual_nb(Ps[z], perm, sign, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c)
        return out

    @njit(cache=True)
    def _descend_one_nb(P, perm, sign, steps, h0, shrink, h_min, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c):
        n = P.shape[0]
        f = _triple_residual_nb(P, perm, sign, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c)
        if not np.isfinite(f):
            return f
        h = h0
        for _ in range(steps):
            improved = False
            for r in range(n):
                for c in range(n):
                    old = P[r, c]
                    for sgn in (1.0, -1.0):
                        P[r, c] = old + sgn * h
                        ft = _triple_residual_nb(P, perm, sign, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c)
                        if ft < f:
                            f = ft
                            improved = True
                            break
                        P[r, c] = old
            if not improved:
                h *= shrink
                if h < h_min:
                    break
        return f

    @njit(cache=True, parallel=True)
    def _descend_nb(Ps, perm, sign, steps, h0, shrink, h_min, cap, dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c):
        out = np.empty(Ps.shape[0])
        for z in prange(Ps.shape[0]):
            out[z] = _descend_one_nb(Ps[z], perm, sign, steps, h0, shrink, h_min, cap,
                                     dense, nz_i, nz_j, nz_k, nz_c, ptr, col_i, col_k, col_c)
        return out


# ---------------------------------------------------------------------------
# dispatch


def signed_permutation(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(perm, sign) with Q[s] e_c = sign[s, c] e_{perm[s, c]}."""
    Q = np.asarray(Q)
    nz = np.abs(Q) > 0
    if not (nz.sum(axis=1) == 1).all() or not np.isin(Q[nz], (-1.0, 1.0)).all():
        raise ValueError("base structures must be signed permutation matrices")
    perm = np.argmax(nz, axis=1).astype(np.int64)
    sign = np.take_along_axis(Q, perm[:, None, :], axis=1)[:, 0, :].astype(float)
    return np.ascontiguousarray(perm), np.ascontiguousarray(sign)


def _use_numba(backend: str | None) -> bool:
    backend = backend or BACKEND
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend == "numba"


def structure_residual(M: np.ndarray, st: Structure, backend: str | None = None) -> float:
    M = np.ascontiguousarray(M, dtype=float)
    if _use_numba(backend):
        return float(_structure_residual_nb(M, *st.args()))
    return float(structure_residual_np(M, st.dense))


def triple_residuals(Ps: np.ndarray, Q: np.ndarray, st: Structure, cap: float = np.inf,
                     backend: str | None = None) -> np.ndarray:
    Ps = np.ascontiguousarray(Ps, dtype=float)
    Q = np.ascontiguousarray(Q, dtype=float)
    if _use_numba(backend):
        perm, sign = signed_permutation(Q)
        return _triple_residuals_nb(Ps, perm, sign, float(cap), *st.args())
    out = np.empty(Ps.shape[0])
    for lo in range(0, Ps.shape[0], 512):
        out[lo:lo + 512] = triple_residuals_np(Ps[lo:lo + 512], Q, st.dense, cap)
    return out


def descend(Ps: np.ndarray, Q: np.ndarray, st: Structure, steps: int, h0: float = 0.1, shrink: float = 0.5,
            h_min: float = 1e-10, cap: float = np.inf, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Pattern-search each P[z]; returns (final P, final residuals)."""
    Ps = np.array(Ps, dtype=float, copy=True, order="C")
    Q = np.ascontiguousarray(Q, dtype=float)
    if _use_numba(backend):
        perm, sign = signed_permutation(Q)
        f = _descend_nb(Ps, perm, sign, int(steps), float(h0), float(shrink), float(h_min), float(cap), *st.args())
        return Ps, f
    return descend_np(Ps, Q, st.dense, steps, h0, shrink, h_min, cap)
