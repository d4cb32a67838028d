"""Greedy forward feature selection under the classical MI filter criteria."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (AlreadySelected, InvalidConfig, NothingToSelect,
                     OverlappingSets, Unsupported)
from .info_theory import (JointPmf, conditional_entropy, conditional_mi,
                          entropy, mutual_information)

EPSILON = 1e-9
TIE_TOLERANCE = 1e-9


class MethodKind(str, enum.Enum):
    MIM = "MIM"
    MIFS = "MIFS"
    MRMR = "mRMR"
    MAXMIFS = "maxMIFS"
    CIFE = "CIFE"
    JMI = "JMI"
    CMIM = "CMIM"
    JMIM = "JMIM"
    TARGET_OF = "TargetOF"
    TARGET_OF_PRIME = "TargetOFPrime"

    @classmethod
    def parse(cls, text: str) -> "MethodKind":
        for kind in cls:
            if text.lower() == kind.value.lower():
                return kind
        raise InvalidConfig(f"unknown method {text!r}", method=text,
                            known=[k.value for k in cls])


PUBLISHED_METHODS = (MethodKind.MIM, MethodKind.MIFS, MethodKind.MRMR, MethodKind.MAXMIFS,
                     MethodKind.CIFE, MethodKind.JMI, MethodKind.CMIM, MethodKind.JMIM)
TARGET_METHODS = (MethodKind.TARGET_OF, MethodKind.TARGET_OF_PRIME)


@dataclass(frozen=True)
class MethodSpec:
    kind: MethodKind
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MethodKind(self.kind))
        if self.kind is MethodKind.MIFS and not self.beta > 0:
            raise InvalidConfig("MIFS needs beta > 0", beta=self.beta)

    @classmethod
    def parse(cls, text: str, beta: float = 1.0) -> "MethodSpec":
        return cls(MethodKind.parse(text), beta)

    @property
    def label(self) -> str:
        if self.kind is MethodKind.MIFS:
            return f"MIFS(beta={self.beta:g})"
        return self.kind.value


class FeatureType(str, enum.Enum):
    IRRELEVANT = "Irrelevant"
    REDUNDANT = "Redundant"
    RELEVANT = "Relevant"
    FULLY_RELEVANT = "FullyRelevant"


@dataclass(frozen=True)
class PairTerms:
    """Pairwise quantities between a candidate X_i and one selected X_s."""

    redundancy: float        # MI(X_i, X_s)
    class_redundancy: float  # MI(X_i, X_s | C)
    relevance_s: float       # MI(C, X_s)


def combine_terms(method: MethodSpec, relevance: float, terms: Sequence[PairTerms]) -> float:
    """Evaluate a published criterion from MI(C, X_i) and the pairwise terms."""
    kind = method.kind
    if kind in TARGET_METHODS:
        raise Unsupported("target objectives are not pairwise decomposable", method=kind.value)
    if not terms or kind is MethodKind.MIM:
        return relevance
    red = [t.redundancy for t in terms]
    # redundancy net of class-relevant redundancy
    net = [t.redundancy - t.class_redundancy for t in terms]
    if kind is MethodKind.MIFS:
        return relevance - method.beta * sum(red)
    if kind is MethodKind.MRMR:
        return relevance - sum(red) / len(red)
    if kind is MethodKind.MAXMIFS:
        return relevance - max(red)
    if kind is MethodKind.CIFE:
        return relevance - sum(net)
    if kind is MethodKind.JMI:
        return relevance - sum(net) / len(net)
    if kind is MethodKind.CMIM:
        return relevance - max(net)
    if kind is MethodKind.JMIM:
        return relevance - max(n - t.relevance_s for n, t in zip(net, terms))
    raise Unsupported(f"unhandled method {kind}")  # pragma: no cover


def _validate(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> None:
    for name in (class_var, candidate, *selected):
        pmf.axis(name)
    if candidate in selected:
        raise AlreadySelected(f"{candidate!r} is already selected", candidate=candidate)
    if candidate == class_var or class_var in selected:
        raise OverlappingSets("the class variable cannot be a feature", class_var=class_var)


def target_of(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> float:
    """H(C) - H(C | candidate, S)."""
    _validate(pmf, class_var, selected, candidate)
    return entropy(pmf, class_var) - conditional_entropy(pmf, class_var, [candidate, *selected])


def target_of_prime(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> float:
    """MI(C, candidate | S)."""
    _validate(pmf, class_var, selected, candidate)
    return conditional_mi(pmf, class_var, candidate, list(selected))


def pair_terms(pmf: JointPmf, class_var: str, selected: Sequence[str],
               candidate: str) -> list[PairTerms]:
    return [PairTerms(mutual_information(pmf, candidate, s),
                      conditional_mi(pmf, candidate, s, class_var),
                      mutual_information(pmf, class_var, s))
            for s in selected]


def objective_value(pmf: JointPmf, method: MethodSpec, class_var: str,
                    selected: Sequence[str], candidate: str) -> float:
    _validate(pmf, class_var, selected, candidate)
    if method.kind is MethodKind.TARGET_OF:
        return target_of(pmf, class_var, selected, candidate)
    if method.kind is MethodKind.TARGET_OF_PRIME:
        return target_of_prime(pmf, class_var, selected, candidate)
    relevance = mutual_information(pmf, class_var, candidate)
    return combine_terms(method, relevance, pair_terms(pmf, class_var, selected, candidate))


def cmim_min_form(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> float:
    """min over X_s of MI(C, X_i | X_s); MI(C, X_i) when S is empty."""
    _validate(pmf, class_var, selected, candidate)
    if not selected:
        return mutual_information(pmf, class_var, candidate)
    return min(conditional_mi(pmf, class_var, candidate, s) for s in selected)


def jmim_min_form(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> float:
    """min over X_s of MI(C, (X_i, X_s)), written as MI(C, X_s) + MI(C, X_i | X_s)."""
    _validate(pmf, class_var, selected, candidate)
    if not selected:
        return mutual_information(pmf, class_var, candidate)
    return min(mutual_information(pmf, class_var, s) + conditional_mi(pmf, class_var, candidate, s)
               for s in selected)


def jmi_average_form(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str) -> float:
    """Average over X_s of MI(C, X_i | X_s)."""
    _validate(pmf, class_var, selected, candidate)
    if not selected:
        return mutual_information(pmf, class_var, candidate)
    return sum(conditional_mi(pmf, class_var, candidate, s) for s in selected) / len(selected)


def classify_feature(pmf: JointPmf, class_var: str, selected: Sequence[str], candidate: str,
                     eps: float = EPSILON) -> FeatureType:
    _validate(pmf, class_var, selected, candidate)
    selected = list(selected)
    if conditional_entropy(pmf, candidate, selected) <= eps:
        return FeatureType.REDUNDANT
    gain = conditional_mi(pmf, class_var, candidate, selected)
    if gain > eps:
        if (conditional_entropy(pmf, class_var, [candidate, *selected]) <= eps
                and conditional_entropy(pmf, class_var, selected) > eps):
            return FeatureType.FULLY_RELEVANT
        return FeatureType.RELEVANT
    return FeatureType.IRRELEVANT


@dataclass(frozen=True)
class StepRecord:
    step: int
    chosen: str
    values: dict[str, float]
    types: dict[str, FeatureType]
    ties: tuple[str, ...]


@dataclass
class SelectionState:
    class_var: str
    method: MethodSpec
    selected: list[str] = field(default_factory=list)
    candidates: list[str] = field(default_factory=list)
    trace: list[StepRecord] = field(default_factory=list)
    stopped_early: bool = False
    # step after which a fully relevant feature was selected, if any
    stop_step: int | None = None

    def to_dict(self) -> dict:
        return {
            "class_var": self.class_var,
            "method": self.method.label,
            "selected": list(self.selected),
            "candidates": list(self.candidates),
            "stopped_early": self.stopped_early,
            "stop_step": self.stop_step,
            "trace": [
                {"step": r.step, "chosen": r.chosen, "ties": list(r.ties),
                 "values": dict(r.values), "types": {k: v.value for k, v in r.types.items()}}
                for r in self.trace
            ],
        }


def _pool(pmf: JointPmf, class_var: str, candidates: Iterable[str] | None) -> list[str]:
    pmf.axis(class_var)
    if candidates is None:
        return [v for v in pmf.variables if v != class_var]
    wanted = set(candidates)
    for name in wanted:
        pmf.axis(name)
    if class_var in wanted:
        raise OverlappingSets("the class variable cannot be a candidate", class_var=class_var)
    # declared variable order drives tie-breaking
    return [v for v in pmf.variables if v in wanted]


def select_step(pmf: JointPmf, method: MethodSpec, class_var: str, selected: Sequence[str],
                candidates: Sequence[str], tie_tolerance: float = TIE_TOLERANCE,
                eps: float = EPSILON) -> StepRecord:
    if not candidates:
        raise NothingToSelect("no candidate features left")
    values = {c: objective_value(pmf, method, class_var, selected, c) for c in candidates}
    types = {c: classify_feature(pmf, class_var, selected, c, eps) for c in candidates}
    best = max(values.values())
    ties = tuple(c for c in candidates if values[c] >= best - tie_tolerance)
    return StepRecord(len(selected) + 1, ties[0], values, types, ties)


def forward_select(pmf: JointPmf, method: MethodSpec, class_var: str,
                   max_steps: int | None = None, candidates: Iterable[str] | None = None,
                   tie_tolerance: float = TIE_TOLERANCE, eps: float = EPSILON,
                   stop_when_fully_relevant: bool = False) -> SelectionState:
    """Greedy argmax selection, recording every candidate's value and type per step.

    Ties within ``tie_tolerance`` go to the earliest variable in declared order;
    the full tie set is kept in the trace. ``stopped_early`` only flags that a
    fully relevant feature was picked, unless ``stop_when_fully_relevant`` is set.
    """
    pool = _pool(pmf, class_var, candidates)
    if not pool:
        raise NothingToSelect("no candidate features to select from")
    if max_steps is None:
        max_steps = len(pool)
    if max_steps < 0 or max_steps > len(pool):
        raise InvalidConfig(f"max_steps must be between 0 and {len(pool)}",
                            max_steps=max_steps, pool_size=len(pool))
    state = SelectionState(class_var, method, [], list(pool))
    for _ in range(max_steps):
        record = select_step(pmf, method, class_var, state.selected, state.candidates,
                             tie_tolerance, eps)
        state.trace.append(record)
        state.selected.append(record.chosen)
        state.candidates.remove(record.chosen)
        if record.types[record.chosen] is FeatureType.FULLY_RELEVANT and not state.stopped_early:
            state.stopped_early = True
            state.stop_step = record.step
            if stop_when_fully_relevant:
                break
    return state


def prune_redundant(pmf: JointPmf, class_var: str, selected: Sequence[str],
                    candidates: Iterable[str], eps: float = EPSILON) -> tuple[str, ...]:
    """Drop candidates already determined by the selected set."""
    return tuple(c for c in candidates
                 if classify_feature(pmf, class_var, selected, c, eps) is not FeatureType.REDUNDANT)


__all__ = [
    "MethodKind", "MethodSpec", "FeatureType", "PairTerms", "StepRecord", "SelectionState",
    "PUBLISHED_METHODS", "TARGET_METHODS", "combine_terms", "target_of", "target_of_prime",
    "objective_value", "cmim_min_form", "jmim_min_form", "jmi_average_form", "pair_terms",
    "classify_feature", "select_step", "forward_select", "prune_redundant",
]
