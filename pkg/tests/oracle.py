"""Independent reference computations used by the tests.

Everything here is written from the definitions without touching the package's
information-theory kernels: joints are built with einsum over explicit index
strings, entropies of marginals are summed directly, and conditional quantities
go through the chain rule.
"""
import numpy as np

NAMES = "QUABCDT"  # Q, U, X1(A), X2(B), Y1(C), Y2(D), T


def H_of(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def joint_dict(p_q, p_ux1_q, p_x2_q, V1, V2, ref=0):
    """Full joint over Q,U,X1,X2,Y1,Y2,T as an array with axes in NAMES order."""
    Vt = V2[:, ref, :]
    return np.einsum("q,qua,qb,ac,abd,at->quabcdt", p_q, p_ux1_q, p_x2_q, V1, V2, Vt)


class Info:
    def __init__(self, joint):
        self.j = joint

    def H(self, names):
        keep = [NAMES.index(c) for c in names]
        drop = tuple(i for i in range(len(NAMES)) if i not in keep)
        return H_of(self.j.sum(axis=drop))

    def Hc(self, a, given=""):
        return self.H(a + given) - self.H(given) if given else self.H(a)

    def I(self, a, b, given=""):
        return self.Hc(a, given) - self.Hc(a, b + given)


def corners(kind, p_q, p_ux1_q, p_x2_q, V1, V2, ref=0):
    """(r1_max, r2_max, sum_max) before clamping, for inner/outer/thm1."""
    t = Info(joint_dict(p_q, p_ux1_q, p_x2_q, V1, V2, ref))
    i1 = t.I("A", "C", "UQ")
    if kind == "inner":
        a = i1 + min(t.I("C", "U", "Q"), t.I("D", "U", "BQ"))
        b = t.I("B", "D", "UQ")
        c = i1 + t.I("UB", "D", "Q")
    elif kind == "outer":
        a = i1 + min(t.I("C", "U", "Q"), t.I("D", "U", "BQ"))
        b = t.I("UB", "D", "Q")
        c = i1 + t.I("UB", "D", "Q")
    elif kind == "thm1":
        base = t.Hc("C", "UQ") - t.Hc("C", "A")
        a = base + min(t.I("C", "U", "Q"), t.I("T", "U", "Q"))
        b = t.Hc("D", "Q") - t.Hc("T", "UQ")
        c = base + b
    else:
        raise ValueError(kind)
    return a, b, min(c, a + b)


def sum_rate_grid(V1, V2, p_x2, step=0.02, n_u=3, chunk=200_000):
    """Max over a simplex grid of p(u, x1) of I(X1;Y1|U) + I(U,X2;Y2), Q constant.

    X2 ~ p_x2 independent of (U, X1). Returns (value, p_u_x1 at the max).
    """
    from itertools import combinations

    n_x1 = V1.shape[0]
    d = n_u * n_x1
    N = int(round(1 / step))
    # stars and bars: each combination of d-1 bar positions among N+d-1 slots
    combos = np.fromiter(
        (c for comb in combinations(range(N + d - 1), d - 1) for c in comb),
        dtype=np.int16,
    ).reshape(-1, d - 1)
    best, arg = -np.inf, None
    hy1x1 = np.array([H_of(r) for r in V1])
    for s in range(0, combos.shape[0], chunk):
        c = combos[s:s + chunk].astype(np.int64)
        edges = np.concatenate([np.full((len(c), 1), -1), c, np.full((len(c), 1), N + d - 1)], 1)
        counts = np.diff(edges, axis=1) - 1
        P = (counts / N).reshape(-1, n_u, n_x1)
        pu = P.sum(2)
        py1u = np.einsum("nua,ac->nuc", P, V1)
        h_y1u = -_plogp(py1u) + _plogp(pu)
        val1 = h_y1u - (P.sum(1) * hy1x1).sum(1)
        py2ub = np.einsum("nua,b,abd->nubd", P, p_x2, V2)
        py2 = py2ub.sum((1, 2))
        pub = pu[:, :, None] * p_x2[None, None, :]
        h_y2 = -_plogp(py2)
        h_y2_ub = -_plogp(py2ub) + _plogp(pub)
        val = val1 + h_y2 - h_y2_ub
        k = int(np.argmax(val))
        if val[k] > best:
            best, arg = float(val[k]), P[k]
    return best, arg


def _plogp(p):
    """Sum over all but the first axis of p log2 p."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return t.reshape(t.shape[0], -1).sum(1)
