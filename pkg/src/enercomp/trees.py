"""CART regression trees for local surrogate explanation.

Trees split on min-max scaled features (so split quality is unaffected by
affine feature rescaling) by exhaustive variance-reduction search over the
midpoints of consecutive sorted unique values. Thresholds are stored both
in scaled and engineering units; rule paths read entirely in engineering
units. Low-depth trees plus per-leaf linear models turn a local
design-space sample into quantitative what-if rules.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_TIE_REL = 1e-12


class LeafModelError(ValueError):
    pass


@dataclass
class TreeNode:
    depth: int
    prediction: float                 # mean target of the node's samples
    count: int
    sample_indices: np.ndarray
    feature: int | None = None        # None marks a leaf
    threshold_scaled: float | None = None
    threshold: float | None = None    # engineering units
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    dependence_flag: bool = False     # children split on different features

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class RegressionTree:
    root: TreeNode
    feature_names: tuple[str, ...]
    feature_units: tuple[str, ...]
    target_name: str
    target_unit: str
    x_min: np.ndarray
    x_max: np.ndarray
    max_depth: int
    min_leaf: int

    def _scale(self, x: np.ndarray) -> np.ndarray:
        span = np.where(self.x_max > self.x_min, self.x_max - self.x_min, 1.0)
        return (x - self.x_min) / span

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        xs = self._scale(x)
        out = np.empty(len(xs))
        for i, row in enumerate(xs):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold_scaled \
                    else node.right
            out[i] = node.prediction
        return out

    def leaves(self) -> list[TreeNode]:
        out = []

        def rec(n):
            if n.is_leaf:
                out.append(n)
            else:
                rec(n.left)
                rec(n.right)

        rec(self.root)
        return out

    def depth(self) -> int:
        def rec(n):
            return n.depth if n.is_leaf else max(rec(n.left), rec(n.right))
        return rec(self.root)


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold_scaled: float
    cost: float                        # summed child SSE


def _best_split(xs: np.ndarray, y: np.ndarray, idx: np.ndarray,
                min_leaf: int) -> SplitCandidate | None:
    """Exhaustive variance-reduction split over all features and the
    midpoints between consecutive sorted unique values.

    The minimizer of summed child SSE is returned; candidates whose cost is
    within a relative 1e-12 of the best count as ties and resolve to the
    lowest feature index, then the smallest threshold.
    """
    best: SplitCandidate | None = None
    n = len(idx)
    for j in range(xs.shape[1]):
        v = xs[idx, j]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        sy = y[idx][order]
        if sv[0] == sv[-1]:
            continue
        c1 = np.cumsum(sy)
        c2 = np.cumsum(sy * sy)
        total1, total2 = c1[-1], c2[-1]
        # split after position i (left size i+1)
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        cut = cut[(cut + 1 >= min_leaf) & (n - cut - 1 >= min_leaf)]
        if cut.size == 0:
            continue
        nl = cut + 1.0
        nr = n - nl
        sse_l = c2[cut] - c1[cut] ** 2 / nl
        sse_r = (total2 - c2[cut]) - (total1 - c1[cut]) ** 2 / nr
        costs = sse_l + sse_r
        # thresholds ascend with cut, so the first near-minimal candidate is
        # the smallest-threshold tie winner within this feature
        m = float(costs.min())
        tol_j = _TIE_REL * max(1.0, abs(m))
        pos = cut[int(np.argmax(costs <= m + tol_j))]
        thr = 0.5 * (sv[pos] + sv[pos + 1])
        cand = SplitCandidate(j, float(thr), m)
        if best is None:
            best = cand
            continue
        tol = _TIE_REL * max(1.0, abs(best.cost), abs(cand.cost))
        if cand.cost < best.cost - tol:
            best = cand
        elif abs(cand.cost - best.cost) <= tol and \
                (cand.feature, cand.threshold_scaled) < \
                (best.feature, best.threshold_scaled):
            best = cand
    return best


def fit_cart(x: np.ndarray, y: np.ndarray, max_depth: int = 3,
             min_leaf: int = 10,
             feature_names: tuple[str, ...] | None = None,
             feature_units: tuple[str, ...] | None = None,
             target_name: str = "target",
             target_unit: str = "-") -> RegressionTree:
    """Greedy CART fit; a constant target yields a depth-0 tree."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if len(x) != len(y):
        raise ValueError("x and y row counts differ")
    if len(x) < 2 * min_leaf:
        raise ValueError(f"need at least {2 * min_leaf} rows, got {len(x)}")
    d = x.shape[1]
    feature_names = feature_names or tuple(f"x{j}" for j in range(d))
    feature_units = feature_units or ("-",) * d

    x_min = x.min(axis=0)
    x_max = x.max(axis=0)
    span = np.where(x_max > x_min, x_max - x_min, 1.0)
    xs = (x - x_min) / span

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        node = TreeNode(depth=depth, prediction=float(y[idx].mean()),
                        count=len(idx), sample_indices=idx)
        if depth >= max_depth or len(idx) < 2 * min_leaf:
            return node
        if np.all(y[idx] == y[idx][0]):
            return node
        cand = _best_split(xs, y, idx, min_leaf)
        if cand is None:
            return node
        node.feature = cand.feature
        node.threshold_scaled = cand.threshold_scaled
        node.threshold = float(cand.threshold_scaled * span[cand.feature]
                               + x_min[cand.feature])
        mask = xs[idx, cand.feature] <= cand.threshold_scaled
        node.left = build(idx[mask], depth + 1)
        node.right = build(idx[~mask], depth + 1)
        if (not node.left.is_leaf and not node.right.is_leaf
                and node.left.feature != node.right.feature):
            node.dependence_flag = True
        return node

    root = build(np.arange(len(y)), 0)
    return RegressionTree(root=root, feature_names=feature_names,
                          feature_units=feature_units, target_name=target_name,
                          target_unit=target_unit, x_min=x_min, x_max=x_max,
                          max_depth=max_depth, min_leaf=min_leaf)


# ---------------------------------------------------------------------------
# rules

@dataclass(frozen=True)
class RuleCondition:
    feature: str
    unit: str
    comparator: str      # "<=" or ">"
    threshold: float     # engineering units


@dataclass(frozen=True)
class RulePath:
    conditions: tuple[RuleCondition, ...]
    prediction: float
    unit: str
    count: int
    under_dependence: bool    # path crosses a dependence-flagged split

    def text(self) -> str:
        if not self.conditions:
            lhs = "always"
        else:
            lhs = " and ".join(
                f"{c.feature} {c.comparator} {c.threshold:.6g} {c.unit}".rstrip()
                for c in self.conditions)
        return f"if {lhs} then {self.prediction:.6g} {self.unit} (n={self.count})"


def extract_rules(tree: RegressionTree) -> list[RulePath]:
    """One engineering-unit rule per leaf, root conditions first.

    A rule is marked ``under_dependence`` when any split on its path has
    children that continue with different features, the structural hint
    that an engineering rule changes with the branch taken.
    """
    rules: list[RulePath] = []

    def rec(node: TreeNode, conds: tuple[RuleCondition, ...], dep: bool):
        if node.is_leaf:
            rules.append(RulePath(conds, node.prediction, tree.target_unit,
                                  node.count, dep))
            return
        name = tree.feature_names[node.feature]
        unit = tree.feature_units[node.feature]
        dep_here = dep or node.dependence_flag
        rec(node.left, conds + (RuleCondition(name, unit, "<=", node.threshold),),
            dep_here)
        rec(node.right, conds + (RuleCondition(name, unit, ">", node.threshold),),
            dep_here)

    rec(tree.root, (), False)
    return rules


@dataclass(frozen=True)
class LeafLinearModel:
    features: tuple[str, ...]
    units: tuple[str, ...]
    coefficients: tuple[float, ...]   # per engineering unit of each feature
    intercept: float
    target_unit: str
    count: int


def leaf_linear_model(tree: RegressionTree, leaf: TreeNode,
                      features: tuple[str, ...],
                      x: np.ndarray, y: np.ndarray) -> LeafLinearModel:
    """Ordinary least squares on one leaf's samples over named features.

    ``x``/``y`` must be the arrays the tree was fitted on; coefficients are
    per engineering unit.
    """
    cols = []
    for f in features:
        if f not in tree.feature_names:
            raise LeafModelError(f"unknown feature {f!r}")
        cols.append(tree.feature_names.index(f))
    idx = leaf.sample_indices
    if len(idx) < 3 * len(features):
        raise LeafModelError(
            f"leaf has {len(idx)} samples, need >= {3 * len(features)}")
    a = np.column_stack([np.ones(len(idx)), np.asarray(x)[idx][:, cols]])
    rank = np.linalg.matrix_rank(a)
    if rank < a.shape[1]:
        raise LeafModelError(
            "rank-deficient leaf regression over features "
            + ", ".join(features))
    beta, *_ = np.linalg.lstsq(a, np.asarray(y).reshape(-1)[idx], rcond=None)
    return LeafLinearModel(
        features=tuple(features),
        units=tuple(tree.feature_units[c] for c in cols),
        coefficients=tuple(float(b) for b in beta[1:]),
        intercept=float(beta[0]),
        target_unit=tree.target_unit,
        count=len(idx))


# ---------------------------------------------------------------------------
# export

def tree_to_dict(tree: RegressionTree) -> dict:
    def rec(node: TreeNode) -> dict:
        d = {"prediction": node.prediction, "count": node.count,
             "depth": node.depth}
        if not node.is_leaf:
            d["feature"] = tree.feature_names[node.feature]
            d["unit"] = tree.feature_units[node.feature]
            d["threshold"] = node.threshold
            d["dependence_flag"] = node.dependence_flag
            d["left"] = rec(node.left)
            d["right"] = rec(node.right)
        return d

    return {
        "target": {"name": tree.target_name, "unit": tree.target_unit},
        "features": [{"name": n, "unit": u}
                     for n, u in zip(tree.feature_names, tree.feature_units)],
        "max_depth": tree.max_depth,
        "min_leaf": tree.min_leaf,
        "root": rec(tree.root),
    }


def save_tree_json(tree: RegressionTree, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tree_to_dict(tree), indent=2,
                                     sort_keys=True) + "\n")


def rules_text(rules: list[RulePath]) -> str:
    lines = []
    for r in rules:
        mark = " [branch-dependent]" if r.under_dependence else ""
        lines.append(r.text() + mark)
    return "\n".join(lines) + "\n"
