# Vectorized corner-value formulas for the frontier searches.
#
# Every function is row-independent: row b of the output depends only on row b
# of the inputs, and only elementwise products and axis sums are used (no BLAS),
# so a row's value does not change with the size of the batch it sits in.
from __future__ import annotations

import numpy as np

_CUT = 1e-15


def _plogp(p: np.ndarray) -> np.ndarray:
    safe = np.where(p > _CUT, p, 1.0)
    return np.where(p > _CUT, p * np.log2(safe), 0.0)


def H(p: np.ndarray, naxes: int) -> np.ndarray:
    """Entropy over the trailing ``naxes`` axes of a batched joint."""
    t = _plogp(p)
    return -t.reshape(t.shape[: t.ndim - naxes] + (-1,)).sum(axis=-1)


def _row_entropy(M: np.ndarray) -> np.ndarray:
    return -_plogp(M).sum(axis=-1)


def aux_terms(P: np.ndarray, X2: np.ndarray, V1: np.ndarray, V2: np.ndarray,
              x2_ref: int | None = None) -> dict:
    """Information terms of a batch of auxiliary laws.

    ``P[b, q, u, x1] = p(q) p(u, x1 | q)``, ``X2[b, q, x2] = p(x2 | q)``.
    """
    p_q = P.sum(axis=(2, 3))
    p_qu = P.sum(axis=3)
    p_x1 = P.sum(axis=(1, 2))

    p_quy1 = (P[..., None] * V1).sum(axis=-2)
    p_qy1 = p_quy1.sum(axis=2)
    H_q = H(p_q, 1)
    H_qu = H(p_qu, 2)
    H_y1_uq = H(p_quy1, 3) - H_qu
    H_y1_q = H(p_qy1, 2) - H_q
    H_y1_x1 = (p_x1 * _row_entropy(V1)).sum(axis=-1)

    p_qux1x2 = P[..., None] * X2[:, :, None, None, :]
    p_qux2y2 = (p_qux1x2[..., None] * V2).sum(axis=-3)
    p_qux2 = p_qu[..., None] * X2[:, :, None, :]
    p_qx2y2 = p_qux2y2.sum(axis=2)
    p_qx2 = p_q[..., None] * X2
    p_quy2 = p_qux2y2.sum(axis=3)
    p_qy2 = p_quy2.sum(axis=2)

    H_qux2 = H(p_qux2, 3)
    H_qx2 = H(p_qx2, 2)
    H_y2_x2uq = H(p_qux2y2, 4) - H_qux2
    H_y2_x2q = H(p_qx2y2, 3) - H_qx2
    H_y2_uq = H(p_quy2, 3) - H_qu
    H_y2_q = H(p_qy2, 2) - H_q

    t = {
        "H_y1_uq": H_y1_uq,
        "H_y1_x1": H_y1_x1,
        "I_x1y1_uq": H_y1_uq - H_y1_x1,
        "I_uy1_q": H_y1_q - H_y1_uq,
        "I_uy2_x2q": H_y2_x2q - H_y2_x2uq,
        "I_ux2y2_q": H_y2_q - H_y2_x2uq,
        "I_x2y2_uq": H_y2_uq - H_y2_x2uq,
        "I_uy2_q": H_y2_q - H_y2_uq,
        "H_y2_q": H_y2_q,
        "H_y2_x2uq": H_y2_x2uq,
    }
    if x2_ref is not None:
        p_qut = (P[..., None] * V2[:, x2_ref, :]).sum(axis=-2)
        p_qt = p_qut.sum(axis=2)
        H_t_uq = H(p_qut, 3) - H_qu
        H_t_q = H(p_qt, 2) - H_q
        t["H_t_uq"] = H_t_uq
        t["I_tu_q"] = H_t_q - H_t_uq
    return t


def _nonneg(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def inner_corners(t: dict):
    i1 = _nonneg(t["I_x1y1_uq"])
    m = _nonneg(np.minimum(t["I_uy1_q"], t["I_uy2_x2q"]))
    return i1 + m, _nonneg(t["I_x2y2_uq"]), i1 + _nonneg(t["I_ux2y2_q"])


def outer_corners(t: dict):
    i1 = _nonneg(t["I_x1y1_uq"])
    m = _nonneg(np.minimum(t["I_uy1_q"], t["I_uy2_x2q"]))
    b = _nonneg(t["I_ux2y2_q"])
    return i1 + m, b, i1 + b


def thm1_corners(t: dict):
    base = t["H_y1_uq"] - t["H_y1_x1"]
    m = _nonneg(np.minimum(t["I_uy1_q"], t["I_tu_q"]))
    b = t["H_y2_q"] - t["H_t_uq"]
    return _nonneg(base + m), _nonneg(b), _nonneg(base + b)


def capacity_corners(t: dict, tau: float):
    i1 = _nonneg(t["I_x1y1_uq"])
    m = _nonneg(np.minimum(t["I_uy1_q"], t["I_uy2_x2q"]))
    b = _nonneg(tau - t["H_y2_x2uq"])
    return i1 + m, b, i1 + b


def sato_corners(p1: np.ndarray, p2: np.ndarray, V1: np.ndarray, V2: np.ndarray):
    """Rectangle corner (I(X1;Y1), I(X2;Y2|X1)) for batches of product laws."""
    py1 = (p1[..., None] * V1).sum(axis=-2)
    a = H(py1, 1) - (p1 * _row_entropy(V1)).sum(axis=-1)
    # p(y2 | x1) under p2, shape (B, x1, y2)
    py2_x1 = (p2[:, None, :, None] * V2[None]).sum(axis=2)
    h_y2_x1 = (p1 * _row_entropy(py2_x1)).sum(axis=-1)
    hV2 = _row_entropy(V2)
    h_y2_x1x2 = (p1[:, :, None] * p2[:, None, :] * hV2).sum(axis=(1, 2))
    b = _nonneg(h_y2_x1 - h_y2_x1x2)
    a = _nonneg(a)
    return a, b, a + b


def canonical(a, b, c):
    """Clamp a corner triple so that r1, r2 <= sum and sum <= r1 + r2."""
    a2 = np.minimum(a, c)
    b2 = np.minimum(b, c)
    c2 = np.minimum(c, a2 + b2)
    return a2, b2, c2


def support(a, b, c, w1: float, w2: float):
    """max of w1 R1 + w2 R2 over the pentagon {R1<=a, R2<=b, R1+R2<=c}."""
    a, b, c = canonical(a, b, c)
    first = w1 * a + w2 * (c - a)
    second = w1 * (c - b) + w2 * b
    return np.maximum(first, second)
