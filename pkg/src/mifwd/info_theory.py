"""Exact entropies and mutual informations of finite joint distributions.

A :class:`JointPmf` stores the whole table densely, one numpy axis per
variable. All quantities are in nats, and any cell with probability at most
``ZERO_CUTOFF`` counts as an exact zero, so ``0 ln 0 = 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (EmptyArgument, InvalidPmf, OverlappingSets,
                     VariableNotFound)

ZERO_CUTOFF = 1e-15
SUM_TOLERANCE = 1e-9

VarSet = str | Iterable[str]


@dataclass(frozen=True, eq=False)
class JointPmf:
    variables: tuple[str, ...]
    supports: tuple[tuple[Hashable, ...], ...]
    table: np.ndarray

    def __post_init__(self):
        variables = tuple(self.variables)
        supports = tuple(tuple(s) for s in self.supports)
        table = np.array(self.table, dtype=float)
        if len(set(variables)) != len(variables):
            raise InvalidPmf("variable names must be unique", variables=list(variables))
        if len(supports) != len(variables):
            raise InvalidPmf("one support per variable is required")
        for name, sup in zip(variables, supports):
            if not sup:
                raise InvalidPmf(f"variable {name!r} has an empty support", variable=name)
            if len(set(sup)) != len(sup):
                raise InvalidPmf(f"support of {name!r} has repeated values", variable=name)
        if table.shape != tuple(len(s) for s in supports):
            raise InvalidPmf("table shape does not match the supports",
                             shape=list(table.shape))
        if not np.all(np.isfinite(table)) or table.min() < 0 or table.max() > 1:
            raise InvalidPmf("probabilities must lie in [0, 1]")
        total = math.fsum(table.ravel())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidPmf(f"probabilities sum to {total!r}, not 1", total=total)
        table.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_mapping(cls, variables: Sequence[str], supports: Sequence[Sequence[Hashable]],
                     probs: Mapping[tuple, float]) -> "JointPmf":
        """Build from ``{outcome tuple: probability}``; unlisted outcomes get 0."""
        index = [{v: i for i, v in enumerate(sup)} for sup in supports]
        table = np.zeros(tuple(len(s) for s in supports))
        for outcome, p in probs.items():
            outcome = tuple(outcome)
            if len(outcome) != len(variables):
                raise InvalidPmf("outcome arity does not match the variables",
                                 outcome=list(outcome))
            try:
                cell = tuple(idx[v] for idx, v in zip(index, outcome))
            except KeyError:
                raise InvalidPmf("outcome value outside its variable's support",
                                 outcome=list(outcome)) from None
            table[cell] += p
        return cls(tuple(variables), tuple(tuple(s) for s in supports), table)

    @classmethod
    def from_samples(cls, variables: Sequence[str], rows: Iterable[Sequence[Hashable]]) -> "JointPmf":
        """Uniform weight on each row; supports in first-appearance order."""
        rows = [tuple(r) for r in rows]
        supports: list[list] = [[] for _ in variables]
        seen: list[set] = [set() for _ in variables]
        for r in rows:
            for j, v in enumerate(r):
                if v not in seen[j]:
                    seen[j].add(v)
                    supports[j].append(v)
        counts: dict[tuple, int] = {}
        for r in rows:
            counts[r] = counts.get(r, 0) + 1
        n = len(rows)
        return cls.from_mapping(variables, supports, {r: c / n for r, c in counts.items()})

    def __eq__(self, other):
        if not isinstance(other, JointPmf):
            return NotImplemented
        return (self.variables == other.variables and self.supports == other.supports
                and np.array_equal(self.table, other.table))

    __hash__ = None

    def axis(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise VariableNotFound(f"unknown variable {name!r}", variable=name,
                                   known=list(self.variables)) from None

    def items(self):
        """Yield ``(outcome tuple, probability)`` for every cell, zeros included."""
        for cell in itertools.product(*(range(len(s)) for s in self.supports)):
            yield tuple(s[i] for s, i in zip(self.supports, cell)), float(self.table[cell])

    def prob(self, outcome: Sequence[Hashable]) -> float:
        cell = tuple(sup.index(v) for sup, v in zip(self.supports, outcome))
        return float(self.table[cell])

    def marginal(self, names: VarSet) -> "JointPmf":
        axes = _axes(self, names)
        keep = sorted(axes)
        drop = tuple(i for i in range(len(self.variables)) if i not in keep)
        table = self.table.sum(axis=drop)
        return JointPmf(tuple(self.variables[i] for i in keep),
                        tuple(self.supports[i] for i in keep), table)

    def with_derived(self, name: str, fn: Callable[..., Hashable], inputs: Sequence[str],
                     support: Sequence[Hashable] | None = None) -> "JointPmf":
        """Append a variable that is a deterministic function of ``inputs``."""
        if name in self.variables:
            raise InvalidPmf(f"variable {name!r} already exists", variable=name)
        pos = [self.axis(v) for v in inputs]
        values = {}
        for outcome, p in self.items():
            values[outcome] = fn(*(outcome[i] for i in pos))
        if support is None:
            support = list(dict.fromkeys(values.values()))
        return JointPmf.from_mapping(
            self.variables + (name,), self.supports + (tuple(support),),
            {outcome + (values[outcome],): p for outcome, p in self.items()})


def _names(vars: VarSet) -> tuple[str, ...]:
    if isinstance(vars, str):
        return (vars,)
    return tuple(dict.fromkeys(vars))


def _axes(pmf: JointPmf, vars: VarSet, *, allow_empty: bool = False) -> tuple[int, ...]:
    names = _names(vars)
    if not names and not allow_empty:
        raise EmptyArgument("variable set must not be empty")
    return tuple(pmf.axis(n) for n in names)


def _disjoint(*groups: tuple[int, ...]) -> None:
    seen: set[int] = set()
    for g in groups:
        if seen.intersection(g):
            raise OverlappingSets("variable sets must be pairwise disjoint")
        seen.update(g)


def _keep(pmf: JointPmf, axes: Iterable[int]) -> np.ndarray:
    """Marginal over ``axes`` with every other axis kept as size 1 (broadcastable)."""
    axes = set(axes)
    drop = tuple(i for i in range(pmf.table.ndim) if i not in axes)
    return pmf.table.sum(axis=drop, keepdims=True)


def _plogp_ratio(p: np.ndarray, num: list[np.ndarray], den: list[np.ndarray]) -> float:
    """sum over p > cutoff of p * ln(prod(num) / prod(den))."""
    p, *rest = np.broadcast_arrays(p, *num, *den)
    mask = p > ZERO_CUTOFF
    if not mask.any():
        return 0.0
    log = np.zeros(int(mask.sum()))
    for arr in rest[:len(num)]:
        log += np.log(arr[mask])
    for arr in rest[len(num):]:
        log -= np.log(arr[mask])
    return math.fsum(p[mask] * log)


def entropy(pmf: JointPmf, vars: VarSet) -> float:
    p = _keep(pmf, _axes(pmf, vars)).ravel()
    p = p[p > ZERO_CUTOFF]
    return max(0.0, -math.fsum(p * np.log(p)))


def conditional_entropy(pmf: JointPmf, target: VarSet, given: VarSet = ()) -> float:
    t = _axes(pmf, target)
    g = _axes(pmf, given, allow_empty=True)
    _disjoint(t, g)
    if not g:
        return entropy(pmf, target)
    p_tg = _keep(pmf, t + g)
    p_g = _keep(pmf, g)
    return max(0.0, -_plogp_ratio(p_tg, [p_tg], [p_g]))


def conditional_mi(pmf: JointPmf, a: VarSet, b: VarSet, given: VarSet = ()) -> float:
    """MI(a, b | given) as the expectation of ln p(a,b|g) / (p(a|g) p(b|g))."""
    ia = _axes(pmf, a)
    ib = _axes(pmf, b)
    ig = _axes(pmf, given, allow_empty=True)
    _disjoint(ia, ib, ig)
    p_abg = _keep(pmf, ia + ib + ig)
    p_ag = _keep(pmf, ia + ig)
    p_bg = _keep(pmf, ib + ig)
    num = [p_abg]
    if ig:
        num.append(_keep(pmf, ig))
    return max(0.0, _plogp_ratio(p_abg, num, [p_ag, p_bg]))


def mutual_information(pmf: JointPmf, a: VarSet, b: VarSet) -> float:
    return conditional_mi(pmf, a, b, ())


def tmi(pmf: JointPmf, a: VarSet, b: VarSet, c: VarSet) -> float:
    """Triple mutual information MI(a,b) - MI(a,b|c); negative under synergy."""
    _disjoint(_axes(pmf, a), _axes(pmf, b), _axes(pmf, c))
    return mutual_information(pmf, a, b) - conditional_mi(pmf, a, b, c)


def tmi_direct(pmf: JointPmf, a: VarSet, b: VarSet, c: VarSet) -> float:
    """TMI as one expectation, E ln[p(ab) p(ac) p(bc) / (p(a) p(b) p(c) p(abc))]."""
    ia, ib, ic = _axes(pmf, a), _axes(pmf, b), _axes(pmf, c)
    _disjoint(ia, ib, ic)
    k = lambda *g: _keep(pmf, sum(g, ()))
    return _plogp_ratio(k(ia, ib, ic), [k(ia, ib), k(ia, ic), k(ib, ic)],
                        [k(ia), k(ib), k(ic), k(ia, ib, ic)])
