"""CART regression trees over boolean assertion vectors."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

from meloid.learn.features import ASSERTION_IDS, CATALOG_HASH, NUM_FEATURES

MODEL_VERSION = 1


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 8
    min_leaf: int = 5
    min_gain: float = 1e-9

    def __post_init__(self):
        if self.max_depth < 0 or self.min_leaf < 1 or self.min_gain < 0:
            raise ValueError(f"invalid tree parameters {self}")


@dataclass(frozen=True)
class Leaf:
    value: float
    n: int


@dataclass(frozen=True)
class Split:
    feature: str  # assertion ID
    lo: "Node"  # bit false
    hi: "Node"  # bit true


Node = Union[Leaf, Split]


def _mean(ys: Sequence[float]) -> float:
    return math.fsum(ys) / len(ys)


def sse(ys: Sequence[float]) -> float:
    if not ys:
        return 0.0
    m = _mean(ys)
    return math.fsum((y - m) ** 2 for y in ys)


def best_split(rows: Sequence[Sequence[bool]], ys: Sequence[float], params: TreeParams):
    """``(feature index, gain)`` of the best admissible split, or None."""
    parent = sse(ys)
    best: Optional[tuple[int, float]] = None
    for j in range(NUM_FEATURES):
        hi = [y for r, y in zip(rows, ys) if r[j]]
        lo = [y for r, y in zip(rows, ys) if not r[j]]
        if len(hi) < params.min_leaf or len(lo) < params.min_leaf:
            continue
        gain = parent - sse(lo) - sse(hi)
        # strict comparison keeps the lowest assertion ID on ties
        if best is None or gain > best[1]:
            best = (j, gain)
    if best is None or best[1] < params.min_gain:
        return None
    return best


def _grow(rows, ys, params: TreeParams, depth: int) -> Node:
    if depth < params.max_depth:
        split = best_split(rows, ys, params)
        if split is not None:
            j = split[0]
            lo = [i for i, r in enumerate(rows) if not r[j]]
            hi = [i for i, r in enumerate(rows) if r[j]]
            return Split(
                ASSERTION_IDS[j],
                _grow([rows[i] for i in lo], [ys[i] for i in lo], params, depth + 1),
                _grow([rows[i] for i in hi], [ys[i] for i in hi], params, depth + 1),
            )
    return Leaf(_mean(ys), len(ys))


@dataclass(frozen=True)
class RegressionTree:
    root: Node
    params: TreeParams = TreeParams()
    catalog_hash: str = CATALOG_HASH

    def predict(self, features) -> tuple[float, list[tuple[str, bool]]]:
        node, path = self.root, []
        while isinstance(node, Split):
            bit = bool(features[ASSERTION_IDS.index(node.feature)])
            path.append((node.feature, bit))
            node = node.hi if bit else node.lo
        return node.value, path

    def leaves(self) -> list[Leaf]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.extend((node.hi, node.lo))
        return out

    def depth(self) -> int:
        def d(node: Node) -> int:
            return 0 if isinstance(node, Leaf) else 1 + max(d(node.lo), d(node.hi))

        return d(self.root)

    def to_json(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "catalog_hash": self.catalog_hash,
            "params": asdict(self.params),
            "tree": _node_to_json(self.root),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "RegressionTree":
        if data.get("version") != MODEL_VERSION:
            raise ModelError(f"unsupported model version {data.get('version')!r}")
        if data.get("catalog_hash") != CATALOG_HASH:
            raise ModelError("model was trained with a different assertion catalog")
        try:
            params = TreeParams(**data["params"])
            root = _node_from_json(data["tree"])
        except (KeyError, TypeError) as e:
            raise ModelError(f"malformed model: {e}") from None
        return cls(root, params)

    @classmethod
    def loads(cls, text: str) -> "RegressionTree":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelError(f"model is not valid JSON: {e}") from None
        return cls.from_json(data)


def _node_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"value": node.value, "n": node.n}
    return {"split": node.feature, "lo": _node_to_json(node.lo), "hi": _node_to_json(node.hi)}


def _node_from_json(data: dict) -> Node:
    if "split" in data:
        if data["split"] not in ASSERTION_IDS:
            raise ModelError(f"unknown assertion {data['split']!r}")
        return Split(data["split"], _node_from_json(data["lo"]), _node_from_json(data["hi"]))
    return Leaf(float(data["value"]), int(data["n"]))


def train_tree(rows: Sequence[Sequence[bool]], labels: Sequence[float], params: Optional[TreeParams] = None) -> RegressionTree:
    """Greedy CART on ``rows`` (40 bits each) against real ``labels``."""
    params = params or TreeParams()
    if not rows:
        raise ValueError("cannot train on an empty dataset")
    if len(rows) != len(labels):
        raise ValueError("rows and labels differ in length")
    rows = [tuple(bool(b) for b in r) for r in rows]
    if any(len(r) != NUM_FEATURES for r in rows):
        raise ValueError(f"every row needs {NUM_FEATURES} features")
    return RegressionTree(_grow(rows, [float(y) for y in labels], params, 0), params)


def predict(tree: RegressionTree, features) -> tuple[float, list[tuple[str, bool]]]:
    return tree.predict(features)
