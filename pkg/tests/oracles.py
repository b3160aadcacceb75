"""Independent oracles used to cross-check the exact kernels.

These deliberately take different routes than the library: linear
programming and least squares for minima over affine sets, and random
sampling with derivative-free polishing for operator-norm lower bounds.
Dual-ball candidate sets for the base norm kinds are recomputed locally.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

from l0limits.indexsets import greatest_element
from l0limits.modules import pointwise_norm
from l0limits.norms import INF, DualOf, FramedP, WeightedP, norm_eval

# ---------------------------------------------------------------------------
# Local dual-ball candidates (max-of-functionals form of each norm).
# ---------------------------------------------------------------------------


def _signs(n):
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def dual_functionals(spec):
    """Rows d with spec(x) = max_d <d, x>, derived independently."""
    if isinstance(spec, WeightedP):
        if spec.p == 1:
            return _signs(spec.dim) * spec.weights
        if spec.p == INF:
            return np.vstack([np.diag(spec.weights), -np.diag(spec.weights)])
    if isinstance(spec, FramedP):
        if spec.p == 1:
            return _signs(spec.matrix.shape[0]) @ spec.matrix
        if spec.p == INF:
            return np.vstack([spec.matrix, -spec.matrix])
    if isinstance(spec, DualOf):
        # The dual of the dual is the original: functionals are the points
        # of the inner ball, approximated here by its own evaluation.
        return spec.dual_ball_candidates()
    raise ValueError(f"no functional form for {spec!r}")


def _euclidean_matrix(spec):
    if isinstance(spec, WeightedP) and spec.p == 2:
        return np.diag(spec.weights)
    if isinstance(spec, FramedP) and spec.p == 2:
        return spec.matrix
    return None


def min_norm_over_affine(spec, particular, nullspace):
    """Exact minimum of spec(particular + nullspace @ t) over t.

    Euclidean norms reduce to least squares; polyhedral norms to a linear
    program in epigraph form solved by HiGHS.
    """
    if nullspace.shape[1] == 0:
        return norm_eval(spec, particular)
    mat = _euclidean_matrix(spec)
    if mat is not None:
        t, *_ = np.linalg.lstsq(mat @ nullspace, -(mat @ particular), rcond=None)
        return norm_eval(spec, particular + nullspace @ t)
    if isinstance(spec, WeightedP) and spec.p == 1:
        # Variables (t, s): minimize sum w_i s_i with s_i >= |x_i|.
        q = nullspace.shape[1]
        n = spec.dim
        c = np.concatenate([np.zeros(q), spec.weights])
        a_ub = np.zeros((2 * n, q + n))
        b_ub = np.zeros(2 * n)
        a_ub[:n, :q] = nullspace
        a_ub[:n, q:] = -np.eye(n)
        b_ub[:n] = -particular
        a_ub[n:, :q] = -nullspace
        a_ub[n:, q:] = -np.eye(n)
        b_ub[n:] = particular
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (q + n),
                      method="highs")
        assert res.success, res.message
        return float(res.fun)
    # Generic polyhedral: minimize s subject to <d_r, x> <= s.
    duals = dual_functionals(spec)
    q = nullspace.shape[1]
    c = np.concatenate([np.zeros(q), [1.0]])
    a_ub = np.hstack([duals @ nullspace, -np.ones((duals.shape[0], 1))])
    b_ub = -(duals @ particular)
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (q + 1),
                  method="highs")
    assert res.success, res.message
    return float(res.fun)


# ---------------------------------------------------------------------------
# Brute-force seminorm of a colimit class: per-atom infimum of the fiber
# norm over every representative at every stage, with representatives
# described as affine solution sets of the forward equations.
# ---------------------------------------------------------------------------


def brute_class_seminorm(system, stage, element, solve_tol=1e-9):
    """Per-atom infimum over all (stage, witness-stage) representative sets.

    A representative of the class of ``element`` at stage j with witness
    stage k is any w solving phi_jk(w) = phi_ik(v) at every atom; its
    contribution at one atom is the exact minimum of the fiber norm over
    the per-atom affine solution set.
    """
    index = system.index
    atoms = system.space.atom_count
    best = np.full(atoms, np.inf)
    pushed_cache = {}
    for k in index.explicit_indices():
        if not index.leq(stage, k):
            continue
        pushed_cache[k] = [
            system.map(stage, k).matrices[a] @ element.coords[a] for a in range(atoms)
        ]
    for j in index.explicit_indices():
        for k in index.explicit_indices():
            if not (index.leq(stage, k) and index.leq(j, k)):
                continue
            fwd = system.map(j, k)
            solutions = []
            feasible = True
            for a in range(atoms):
                mat = fwd.matrices[a]
                rhs = pushed_cache[k][a]
                if mat.shape[1] == 0:
                    if rhs.size and np.max(np.abs(rhs)) > solve_tol:
                        feasible = False
                        break
                    solutions.append((np.zeros(0), np.zeros((0, 0))))
                    continue
                sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
                if rhs.size and np.max(np.abs(mat @ sol - rhs)) > solve_tol:
                    feasible = False
                    break
                _, sv, vt = np.linalg.svd(mat, full_matrices=True)
                rank = int(np.sum(sv > 1e-11 * max(1.0, sv[0] if sv.size else 1.0)))
                solutions.append((sol, vt[rank:].T))
            if not feasible:
                continue
            module = system.modules[j]
            for a in range(atoms):
                particular, null = solutions[a]
                val = min_norm_over_affine(module.fibers[a].norm, particular, null)
                best[a] = min(best[a], val)
    return best


# ---------------------------------------------------------------------------
# Sampled operator-norm lower bound with compass-search polishing.
# ---------------------------------------------------------------------------


def sampled_operator_norm(mat, source_spec, target_spec, samples=10_000, seed=0,
                          polish_starts=24):
    """Lower bound from random unit vectors, sharpened by coordinate search.

    Every iterate is normalized back onto the unit sphere of the source
    norm, so the result never exceeds the true operator norm.
    """
    rng = np.random.default_rng(seed)
    dim = mat.shape[1]
    if dim == 0 or mat.shape[0] == 0:
        return 0.0

    def value(x):
        return norm_eval(target_spec, mat @ x)

    def normalize(x):
        n = norm_eval(source_spec, x)
        return None if n <= 1e-14 else x / n

    pool = []
    for x in rng.standard_normal((samples, dim)):
        u = normalize(x)
        if u is not None:
            pool.append((value(u), u))
    for k in range(dim):
        u = normalize(np.eye(dim)[:, k])
        if u is not None:
            pool.append((value(u), u))
    pool.sort(key=lambda p: -p[0])
    best_val = pool[0][0]
    for start_val, start in pool[:polish_starts]:
        x, val = start.copy(), start_val
        step = 0.5
        while step > 1e-10:
            improved = False
            for k in range(dim):
                for sign in (1.0, -1.0):
                    cand = x.copy()
                    cand[k] += sign * step
                    cand = normalize(cand)
                    if cand is None:
                        continue
                    v = value(cand)
                    if v > val + 1e-15:
                        x, val, improved = cand, v, True
            if not improved:
                step *= 0.5
        best_val = max(best_val, val)
    return best_val


def exhaustive_component_sup(system, thread_components):
    """Literal pointwise supremum of component norms over a finite family."""
    stacked = np.stack(
        [pointwise_norm(v).values for v in thread_components.values()]
    )
    return stacked.max(axis=0)


def poset_top(system):
    return greatest_element(system.index)
