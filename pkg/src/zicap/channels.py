"""Z-interference channel model, example families and the two channel conditions.

A Z-interference channel is a pair of transition tensors: ``V1[x1, y1]`` for the
interference-free link and ``V2[x1, x2, y2]`` for the link that hears both
transmitters.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .info import DMChannel, ProbVector, _as_stochastic_rows, entropy
from .optim import SearchConfig, child_rng, maximize_concave_simplex, project_simplex

CERT_TOL = 1e-9
OPT_TOL = 1e-6


@dataclass(frozen=True)
class ModAddSpec:
    """Parameters of the modular-additive family: ``Y2 = S + X2 (mod q)``, ``S ~ p(s|x1)``."""

    q: int
    p_y1_given_x1: DMChannel
    p_s_given_x1: DMChannel

    def __post_init__(self):
        if int(self.q) < 2:
            raise ValueError("modulus q must be at least 2")
        if self.p_s_given_x1.out_size != self.q:
            raise ValueError(f"p(s|x1) must have {self.q} outputs, has {self.p_s_given_x1.out_size}")
        if self.p_y1_given_x1.in_size != self.p_s_given_x1.in_size:
            raise ValueError("p(y1|x1) and p(s|x1) disagree on the X1 alphabet")


@dataclass(frozen=True, eq=False)
class ZChannel:
    V1: np.ndarray
    V2: np.ndarray
    modadd: Optional[ModAddSpec] = None

    def __init__(self, V1, V2, modadd: Optional[ModAddSpec] = None):
        V1 = _as_stochastic_rows(V1, "V1")
        V2 = _as_stochastic_rows(V2, "V2")
        if V1.ndim != 2 or V2.ndim != 3:
            raise ValueError("V1 must be indexed [x1][y1] and V2 [x1][x2][y2]")
        if V1.shape[0] != V2.shape[0]:
            raise ValueError("V1 and V2 disagree on the X1 alphabet")
        V1.setflags(write=False)
        V2.setflags(write=False)
        object.__setattr__(self, "V1", V1)
        object.__setattr__(self, "V2", V2)
        object.__setattr__(self, "modadd", modadd)

    @property
    def n_x1(self) -> int:
        return self.V1.shape[0]

    @property
    def n_y1(self) -> int:
        return self.V1.shape[1]

    @property
    def n_x2(self) -> int:
        return self.V2.shape[1]

    @property
    def n_y2(self) -> int:
        return self.V2.shape[2]

    def __repr__(self) -> str:
        kind = f", modadd q={self.modadd.q}" if self.modadd else ""
        return (f"ZChannel(x1={self.n_x1}, x2={self.n_x2}, y1={self.n_y1}, "
                f"y2={self.n_y2}{kind})")


# --- constructors ---------------------------------------------------------

def build_modadd(spec: ModAddSpec) -> ZChannel:
    q = spec.q
    ps = spec.p_s_given_x1.rows
    V2 = np.empty((ps.shape[0], q, q))
    for x2 in range(q):
        # V2[x1, x2, y2] = p(s = y2 - x2 | x1)
        V2[:, x2, :] = np.roll(ps, x2, axis=1)
    return ZChannel(spec.p_y1_given_x1.rows, V2, modadd=spec)


def _cyclic(z: np.ndarray) -> np.ndarray:
    """Matrix ``M[x, y] = z[(y - x) mod q]``."""
    q = z.shape[0]
    return np.stack([np.roll(z, x) for x in range(q)])


def build_benzel(q: int, z1, z2) -> ZChannel:
    """``Y1 = X1 + Z1``, ``Y2 = X1 + X2 + Z1 + Z2`` over Z_q."""
    z1 = ProbVector(z1).values
    z2 = ProbVector(z2).values
    if z1.shape[0] != q or z2.shape[0] != q:
        raise ValueError(f"noise laws must be pmfs over Z_{q}")
    w = np.array([sum(z1[j] * z2[(k - j) % q] for j in range(q)) for k in range(q)])
    spec = ModAddSpec(q, DMChannel(_cyclic(z1)), DMChannel(_cyclic(w)))
    return build_modadd(spec)


def build_elgamal(eps: float) -> ZChannel:
    """Three-input example with deterministic interference map ``{0->0, 1->1, 2->0}``."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    p_y1 = DMChannel([[1.0, 0.0], [0.0, 1.0], [eps, 1.0 - eps]])
    p_s = DMChannel([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    return build_modadd(ModAddSpec(2, p_y1, p_s))


def build_fig4(erasure: float = 0.4, crossover: float = 0.1) -> ZChannel:
    """BEC for the direct link, BSC for the interference ``p(s|x1)``, q = 2."""
    return build_modadd(ModAddSpec(2, DMChannel.bec(erasure), DMChannel.bsc(crossover)))


# --- file format ----------------------------------------------------------

def channel_to_dict(zc: ZChannel) -> dict:
    d = {
        "x1": zc.n_x1, "x2": zc.n_x2, "y1": zc.n_y1, "y2": zc.n_y2,
        "V1": zc.V1.tolist(),
        "V2": zc.V2.tolist(),
    }
    if zc.modadd is not None:
        d["modadd"] = {
            "q": zc.modadd.q,
            "p_y1": zc.modadd.p_y1_given_x1.rows.tolist(),
            "p_s": zc.modadd.p_s_given_x1.rows.tolist(),
        }
    return d


def channel_from_dict(d: dict) -> ZChannel:
    try:
        sizes = [int(d[k]) for k in ("x1", "x2", "y1", "y2")]
        V1 = np.asarray(d["V1"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed channel description: {exc}") from None
    if "modadd" in d and d["modadd"] is not None:
        m = d["modadd"]
        spec = ModAddSpec(int(m["q"]), DMChannel(m["p_y1"]), DMChannel(m["p_s"]))
        zc = build_modadd(spec)
        if zc.V1.shape != V1.shape or np.max(np.abs(zc.V1 - V1)) > CERT_TOL:
            raise ValueError("V1 disagrees with modadd.p_y1")
    else:
        zc = ZChannel(V1, d["V2"])
    if [zc.n_x1, zc.n_x2, zc.n_y1, zc.n_y2] != sizes:
        raise ValueError(f"declared alphabet sizes {sizes} do not match the tensors")
    return zc


def load_channel(path: str | os.PathLike) -> ZChannel:
    with open(path, encoding="utf-8") as fh:
        return channel_from_dict(json.load(fh))


def save_channel(zc: ZChannel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_dict(zc), fh, indent=1)
        fh.write("\n")


# --- Condition 1 ----------------------------------------------------------

def _output_entropies(p_x1: np.ndarray, V2: np.ndarray) -> np.ndarray:
    """H(Y2 | X2 = x2) for every x2, with X1 ~ p_x1."""
    out = np.einsum("a,azy->zy", p_x1, V2)
    return np.array([entropy(row) for row in out])


def _relabeling(V2: np.ndarray, x2: int, tol: float, modadd: Optional[ModAddSpec]):
    """Permutation ``pi`` with ``V2[:, x2, y] == V2[:, 0, pi[y]]`` for all x1, or None."""
    ref = V2[:, 0, :]
    cur = V2[:, x2, :]
    n = ref.shape[1]
    if modadd is not None:
        pi = (np.arange(n) - x2) % modadd.q
        if np.max(np.abs(cur - ref[:, pi])) <= tol:
            return pi
    pi = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    for y in range(n):
        for y2 in range(n):
            if not used[y2] and np.max(np.abs(cur[:, y] - ref[:, y2])) <= tol:
                pi[y] = y2
                used[y2] = True
                break
        else:
            return None
    return pi


def check_condition1(zc: ZChannel, trials: int = 100, seed: int = 0, tol: float = CERT_TOL):
    """Necessary single-letter test plus a sufficient relabeling certificate.

    Returns ``(necessary_pass, certified, certificate)``. The certificate is a list
    of output permutations, one per x2, such that ``V2[x1][x2][y] = V2[x1][0][pi(y)]``
    for every x1; such a family makes every n-letter conditional output entropy
    independent of x2^n.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    V2 = zc.V2
    rng = np.random.default_rng(seed)
    laws = [np.eye(zc.n_x1)[i] for i in range(zc.n_x1)]
    laws += list(rng.dirichlet(np.ones(zc.n_x1), size=trials))
    necessary = True
    for p in laws:
        h = _output_entropies(p, V2)
        if h.max() - h.min() > tol:
            necessary = False
            break
    certificate = []
    for x2 in range(zc.n_x2):
        pi = _relabeling(V2, x2, tol, zc.modadd)
        if pi is None:
            certificate = None
            break
        certificate.append(pi)
    certified = certificate is not None and necessary
    return necessary, certified, (certificate if certified else None)


# --- tau and Condition 2 --------------------------------------------------

def _h_and_grad_p1(p1: np.ndarray, A: np.ndarray):
    """H(p1 @ A) and its gradient in p1 (A is x1-by-y2)."""
    py = p1 @ A
    logs = np.log2(np.maximum(py, 1e-300))
    h = -float(np.sum(py[py > 1e-15] * logs[py > 1e-15]))
    grad = -A @ (logs + 1.0 / math.log(2))
    return h, grad


def _uniformizing_x2(zc: ZChannel) -> Optional[np.ndarray]:
    """A p(x2) that makes Y2 exactly uniform for every vertex p(x1), if one exists."""
    n_x2, n_y2 = zc.n_x2, zc.n_y2
    uni = np.full(n_x2, 1.0 / n_x2)
    target = np.full(n_y2, 1.0 / n_y2)
    if np.max(np.abs(np.einsum("z,azy->ay", uni, zc.V2) - target)) <= 1e-12:
        return uni
    # rows: sum_x2 p(x2) V2[x1, x2, y] = 1/n_y2 for all (x1, y), sum p = 1
    A_eq = np.concatenate([zc.V2.transpose(0, 2, 1).reshape(-1, n_x2), np.ones((1, n_x2))])
    b_eq = np.concatenate([np.full(zc.n_x1 * n_y2, 1.0 / n_y2), [1.0]])
    res = linprog(np.zeros(n_x2), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * n_x2,
                  method="highs")
    if res.status != 0:
        return None
    p = project_simplex(res.x)
    if np.max(np.abs(np.einsum("z,azy->ay", p, zc.V2) - target)) <= 1e-12:
        return p
    return None


def compute_tau(zc: ZChannel, cfg: Optional[SearchConfig] = None):
    """Largest H(Y2) over product input laws p(x1)p(x2).

    Returns ``(tau, p_x1, p_x2)``. Alternates between the two simplex variables;
    each half-step is a concave maximization. Restart ``r`` uses a child seed of
    ``cfg.seed``, so adding restarts never lowers the result.
    """
    cfg = cfg or SearchConfig()
    n_x1, n_x2 = zc.n_x1, zc.n_x2
    p_unif = _uniformizing_x2(zc)
    if p_unif is not None:
        return math.log2(zc.n_y2), ProbVector.uniform(n_x1), ProbVector(p_unif)

    V2 = zc.V2
    best = (-math.inf, None, None)
    for r in range(cfg.restarts):
        if r == 0:
            p1, p2 = np.full(n_x1, 1.0 / n_x1), np.full(n_x2, 1.0 / n_x2)
        else:
            rng = child_rng(cfg.seed, 0x7A0, r)
            p1, p2 = rng.dirichlet(np.ones(n_x1)), rng.dirichlet(np.ones(n_x2))
        val = -math.inf
        for _ in range(cfg.max_iters):
            A1 = np.einsum("z,azy->ay", p2, V2)
            p1, _ = maximize_concave_simplex(lambda x: _h_and_grad_p1(x, A1), p1)
            A2 = np.einsum("a,azy->zy", p1, V2)
            p2, new = maximize_concave_simplex(lambda x: _h_and_grad_p1(x, A2), p2)
            if new - val <= 1e-12:
                val = max(val, new)
                break
            val = new
        if val > best[0]:
            best = (val, p1, p2)
    tau, p1, p2 = best
    return tau, ProbVector(project_simplex(p1)), ProbVector(project_simplex(p2))


def _vertex_deviation(p2: np.ndarray, V2: np.ndarray, tau: float):
    """Per-vertex H(Y2; delta_x1, p2) - tau and its gradient in p2."""
    devs, grads = [], []
    for x1 in range(V2.shape[0]):
        h, g = _h_and_grad_p1(p2, V2[x1])
        devs.append(h - tau)
        grads.append(g)
    return np.array(devs), np.array(grads)


def check_condition2(zc: ZChannel, tau: float, cfg: Optional[SearchConfig] = None,
                     tol: float = OPT_TOL):
    """Search for p*(x2) attaining H(Y2) = tau at every vertex law of X1.

    For fixed p*, H(Y2) is concave in p(x1), so matching the global maximum tau at
    all vertices forces a match on the whole simplex. Tries uniform p(x2) first,
    then multistart projected subgradient descent on the largest vertex deviation.
    Returns ``(found, p_star, max_dev)``; ``found = False`` does not prove that no
    such law exists.
    """
    cfg = cfg or SearchConfig()
    n_x2 = zc.n_x2
    V2 = zc.V2

    def max_dev(p):
        d, _ = _vertex_deviation(p, V2, tau)
        return float(np.max(np.abs(d)))

    uni = np.full(n_x2, 1.0 / n_x2)
    best_p, best_dev = uni, max_dev(uni)
    if best_dev <= tol:
        return True, ProbVector(uni), best_dev

    for r in range(cfg.restarts):
        p = uni.copy() if r == 0 else child_rng(cfg.seed, 0xC2, r).dirichlet(np.ones(n_x2))
        for k in range(cfg.max_iters * 10):
            d, g = _vertex_deviation(p, V2, tau)
            i = int(np.argmax(np.abs(d)))
            dev = abs(d[i])
            if dev < best_dev:
                best_p, best_dev = p.copy(), dev
            if dev <= tol:
                break
            sub = np.sign(d[i]) * g[i]
            sub -= sub.mean()
            norm = np.linalg.norm(sub)
            if norm == 0:
                break
            p = project_simplex(p - (0.5 / math.sqrt(k + 1)) * dev * sub / norm)
        if best_dev <= tol:
            break
    found = best_dev <= tol
    return found, ProbVector(best_p), best_dev


@dataclass
class ConditionReport:
    cond1_necessary_pass: bool
    cond1_certified: bool
    cond1_certificate: Optional[list]
    cond2_found: bool
    p_star: Optional[ProbVector]
    tau: float
    max_dev: float
    tau_argmax: tuple = field(default=(), repr=False)
    note: str = ""

    @property
    def both(self) -> bool:
        return self.cond1_certified and self.cond2_found

    def to_dict(self) -> dict:
        return {
            "cond1_necessary_pass": self.cond1_necessary_pass,
            "cond1_certified": self.cond1_certified,
            "cond1_certificate": (None if self.cond1_certificate is None
                                  else [pi.tolist() for pi in self.cond1_certificate]),
            "cond2_found": self.cond2_found,
            "p_star": None if self.p_star is None else self.p_star.values.tolist(),
            "tau": self.tau,
            "max_dev": self.max_dev,
            "note": self.note,
        }


def check_conditions(zc: ZChannel, cfg: Optional[SearchConfig] = None, trials: int = 100,
                     cert_tol: float = CERT_TOL, opt_tol: float = OPT_TOL) -> ConditionReport:
    cfg = cfg or SearchConfig()
    nec, cert, pis = check_condition1(zc, trials=trials, seed=cfg.seed, tol=cert_tol)
    tau, p1, p2 = compute_tau(zc, cfg)
    found, p_star, dev = check_condition2(zc, tau, cfg, tol=opt_tol)
    notes = []
    if not cert:
        notes.append("Condition 1 not certified: no consistent output relabeling over x2"
                     + ("" if nec else "; the single-letter necessary test failed"))
    if not found:
        notes.append("Condition 2 not established: the search found no p*(x2); "
                     "this is not a proof that none exists")
    return ConditionReport(nec, cert, pis, found, p_star if found else None, tau, dev,
                           tau_argmax=(p1, p2), note="; ".join(notes))
