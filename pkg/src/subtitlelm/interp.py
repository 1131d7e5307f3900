"""Static linear interpolation of n-gram models.

The mixture probability of a token is ``sum_i lambda_i P_i(w | h)``, where
each component applies its own back-off and maps unknown words to its own
``<unk>``.  Weights are fitted on development text by EM, starting from
uniform weights.  The dev log-likelihood is concave in the weights, so the
fixed point EM reaches does not depend on the starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .arpa import BOS, EOS, ArpaModel


class EmptyDevSet(ValueError):
    pass


class AllZeroLikelihood(ValueError):
    pass


@dataclass
class InterpolationWeights:
    lambdas: tuple[float, ...]
    iterations: int = 0
    final_dev_loglik: float = 0.0  # log10, summed over dev events
    converged: bool = True
    history: list[float] = field(default_factory=list, compare=False)

    def __post_init__(self):
        lam = self.lambdas
        if not lam or any(x < 0 for x in lam) or abs(math.fsum(lam) - 1.0) > 1e-12:
            raise ValueError(f"weights {lam} are not on the probability simplex")


@dataclass
class InterpolatedModel:
    components: list[ArpaModel]
    weights: InterpolationWeights
    names: list[str] | None = None

    def __post_init__(self):
        if not self.components or len(self.components) != len(self.weights.lambdas):
            raise ValueError("need one weight per component and at least one component")

    @property
    def order(self) -> int:
        return max(m.order for m in self.components)

    @property
    def vocab(self) -> set[str]:
        return set().union(*(m.vocab for m in self.components))

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        total = 0.0
        for lam, model in zip(self.weights.lambdas, self.components):
            if lam:
                lp = model.score(word, context)
                if lp != -math.inf:
                    total += lam * 10.0 ** lp
        return total

    def score(self, word: str, context: Sequence[str] = ()) -> float:
        active = [i for i, lam in enumerate(self.weights.lambdas) if lam]
        if len(active) == 1:
            # a degenerate mixture is exactly its one component
            return self.components[active[0]].score(word, context)
        p = self.prob(word, context)
        return math.log10(p) if p > 0 else -math.inf


def score(im: InterpolatedModel, context: Sequence[str], word: str) -> float:
    """Mixture probability of ``word`` after ``context``."""
    return im.prob(word, context)


def component_probs(components: Sequence[ArpaModel], corpus: Iterable[Sequence[str]]) -> np.ndarray:
    """Matrix of P_i(event) with one row per component and one column per
    scored event (every word and the closing ``</s>`` of each sentence)."""
    columns: list[list[float]] = []
    for sentence in corpus:
        history = [BOS]
        for w in list(sentence) + [EOS]:
            row = []
            for m in components:
                lp = m.score(w, history)
                row.append(0.0 if lp == -math.inf else 10.0 ** lp)
            columns.append(row)
            history.append(w)
    return np.array(columns, dtype=np.float64).T.reshape(len(components), len(columns))


def _loglik(lam: np.ndarray, probs: np.ndarray) -> float:
    return math.fsum(np.log10(lam @ probs).tolist())


def fit_em(components: Sequence[ArpaModel], dev_corpus: Iterable[Sequence[str]],
           tol: float = 1e-6, max_iters: int = 200) -> InterpolationWeights:
    """Fit mixture weights on development sentences by EM.

    Stops when the relative gain in dev log-likelihood falls below ``tol``
    or after ``max_iters`` iterations.
    """
    if not components:
        raise ValueError("need at least one component")
    if tol <= 0:
        raise ValueError("tol must be positive")
    probs = component_probs(components, dev_corpus)
    if probs.shape[1] == 0:
        raise EmptyDevSet("development set has no tokens")
    dead = np.flatnonzero(probs.max(axis=0) <= 0)
    if dead.size:
        raise AllZeroLikelihood(
            f"{dead.size} dev events have zero probability under every component "
            "(closed-vocabulary model?)"
        )
    m = len(components)
    lam = np.full(m, 1.0 / m)
    ll = _loglik(lam, probs)
    history = [ll]
    if m == 1:
        return InterpolationWeights((1.0,), 0, ll, True, history)

    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        weighted = lam[:, None] * probs
        resp = weighted / weighted.sum(axis=0)
        new = resp.mean(axis=1)
        new /= math.fsum(new.tolist())
        new_ll = _loglik(new, probs)
        history.append(new_ll)
        gain = new_ll - ll
        lam, ll = new, new_ll
        if gain < tol * abs(ll):
            converged = True
            break
    return InterpolationWeights(tuple(float(x) for x in lam), iterations, ll, converged, history)


def write_weights(path: str | Path, weights: InterpolationWeights, names: Sequence[str]) -> None:
    """One ``name<TAB>lambda`` line per component, then ``#`` diagnostics."""
    lines = [f"{name}\t{lam:.12f}" for name, lam in zip(names, weights.lambdas)]
    lines.append(f"# dev_log10_likelihood\t{weights.final_dev_loglik:.6f}")
    lines.append(f"# iterations\t{weights.iterations}")
    lines.append(f"# converged\t{str(weights.converged).lower()}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_weights(path: str | Path) -> tuple[list[str], InterpolationWeights]:
    names, lambdas = [], []
    meta = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("\t")
            meta[key] = value
            continue
        name, _, value = line.partition("\t")
        names.append(name)
        lambdas.append(float(value))
    total = math.fsum(lambdas)
    # printed weights are rounded; put them back on the simplex
    lambdas = [x / total for x in lambdas]
    weights = InterpolationWeights(
        tuple(lambdas),
        int(meta.get("iterations", 0)),
        float(meta.get("dev_log10_likelihood", 0.0)),
        meta.get("converged", "true") == "true",
    )
    return names, weights
