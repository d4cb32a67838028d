"""Minimum Bayes risk: exhaustive for discrete tables, closed form for the Gaussian setting."""

from __future__ import annotations

import math
from typing import Hashable, Sequence

import numpy as np

from .errors import Unsupported
from .info_theory import JointPmf, VarSet, _axes, _names

BayesRule = dict[tuple[Hashable, ...], Hashable]


def mbr_discrete(pmf: JointPmf, class_var: str, selected: VarSet = ()) -> tuple[float, BayesRule]:
    """Risk of the Bayes classifier that sees only ``selected``, and that classifier.

    The rule maps each outcome of the selected variables (in the given order) to the
    most probable class label; posterior ties go to the label listed first in the
    class support.
    """
    c_axis = pmf.axis(class_var)
    names = _names(selected)
    s_axes = _axes(pmf, names, allow_empty=True)
    if c_axis in s_axes:
        raise Unsupported("the class variable cannot be among the selected features")
    drop = tuple(i for i in range(pmf.table.ndim) if i != c_axis and i not in s_axes)
    joint = pmf.table.sum(axis=drop)
    # reorder to (selected..., class)
    kept = [i for i in range(pmf.table.ndim) if i == c_axis or i in s_axes]
    order = [kept.index(a) for a in s_axes] + [kept.index(c_axis)]
    joint = np.transpose(joint, order).reshape(-1, len(pmf.supports[c_axis]))
    best = joint.argmax(axis=1)  # first maximum -> earliest label on ties
    risk = math.fsum(joint.sum(axis=1) - joint.max(axis=1))
    rule: BayesRule = {}
    cells = np.ndindex(*(len(pmf.supports[a]) for a in s_axes))
    labels = pmf.supports[c_axis]
    for row, cell in enumerate(cells):
        rule[tuple(pmf.supports[a][i] for a, i in zip(s_axes, cell))] = labels[best[row]]
    return max(0.0, risk), rule


def mbr_x(k: float) -> float:
    """Bayes risk of predicting C_k from X alone with the sign rule: arctan(k) / pi."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    return math.atan(k) / math.pi


def mbr2(first_two: Sequence[str], k: float) -> float:
    """Risk based on the first two features of a setting ordering.

    Accepts feature labels ("X", "X-k'Y", "Z", "Xdisc") or Feature members.
    """
    labels = [getattr(f, "value", f) for f in first_two]
    if len(labels) != 2 or labels[0] != "X":
        raise Unsupported("orderings must start with X", ordering=labels)
    second = labels[1]
    if second == "X-k'Y":
        return 0.0
    if second in ("Z", "Xdisc"):
        return mbr_x(k)
    raise Unsupported(f"unknown second feature {second!r}", ordering=labels)
