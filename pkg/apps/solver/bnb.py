"""
Branch-and-bound exato com propagação de limites

Toda a aritmética de viabilidade é inteira; apenas o objetivo usa Fraction.
A busca é em profundidade e ramifica primeiro nas variáveis de decisão:
binários de custo positivo (RBs) do último ao primeiro com 0 antes de 1,
binários de ganho (períodos) do maior ganho ao menor com 1 antes de 0, os
demais binários em ordem de declaração e os inteiros pelo menor valor.

Inícios de TTI, offsets e seletores de disjunção sem peso no objetivo ficam
fora dessa ordem: com as decisões fixadas, o candidato é o vetor de limites
inferiores e só se ramifica num seletor cuja disjunção o candidato viola com
os dois valores (1 antes de 0). O objetivo não depende dessas variáveis, então
a primeira folha viável de cada subárvore basta.
"""

import logging
import time
from collections import deque
from dataclasses import dataclass, field, replace
from enum import StrEnum
from fractions import Fraction
from typing import Optional

from django.conf import settings

from apps.scheduling.ilp import IlpModel, Sense

logger = logging.getLogger(__name__)

PREFERS_ONE = frozenset({"b", "s"})
SCHEDULE_ROLES = frozenset({"c", "o", "s"})


class SolveStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class SolveLimits:
    """Limite de nós e, opcionalmente, de tempo de parede em segundos"""

    max_nodes: int = 500_000
    max_wall_time: Optional[float] = 60.0

    @classmethod
    def from_settings(cls) -> "SolveLimits":
        return cls(
            max_nodes=getattr(settings, "SOLVER_MAX_NODES", cls.max_nodes),
            max_wall_time=getattr(settings, "SOLVER_MAX_WALL_TIME", cls.max_wall_time),
        )

    def without_wall_time(self) -> "SolveLimits":
        """Mesmos limites só com nós: o resultado não depende da carga da máquina"""
        return replace(self, max_wall_time=None)

    def exhausted(self, nodes: int, elapsed: float) -> bool:
        if nodes >= self.max_nodes:
            return True
        return self.max_wall_time is not None and elapsed > self.max_wall_time


@dataclass(frozen=True)
class Solution:
    status: SolveStatus
    assignment: dict[str, int] = field(default_factory=dict)
    objective: Optional[Fraction] = None
    nodes: int = 0
    wall_time: float = 0.0
    infeasible_family: Optional[str] = None

    @property
    def has_incumbent(self) -> bool:
        return bool(self.assignment) or self.objective is not None

    @property
    def stats(self) -> dict:
        return {"nodes": self.nodes, "wall_time": round(self.wall_time, 6)}


class CompiledModel:
    """Representação indexada do modelo com linhas na forma Σ a·v ≤ rhs"""

    def __init__(self, model: IlpModel):
        self.model = model
        variables = model.variables
        self.names = [var.name for var in variables]
        self.lower = [var.lower for var in variables]
        self.upper = [var.upper for var in variables]
        self.rows: list[tuple[tuple[int, ...], tuple[int, ...], int]] = []
        self.row_family: list[str] = []
        self.var_rows: list[list[int]] = [[] for _ in variables]

        for constraint in model.constraints:
            indices = tuple(model.index_of(name) for name, _ in constraint.terms)
            coefs = tuple(coef for _, coef in constraint.terms)
            if constraint.sense in (Sense.LE, Sense.EQ):
                self._add_row(indices, coefs, constraint.rhs, constraint.family)
            if constraint.sense in (Sense.GE, Sense.EQ):
                self._add_row(
                    indices, tuple(-coef for coef in coefs), -constraint.rhs, constraint.family
                )

        self.objective = [
            (model.index_of(name), coef) for name, coef in model.objective_terms.items()
        ]
        weight = [Fraction(0)] * len(variables)
        for index, coef in self.objective:
            weight[index] = coef

        self.binary = [var.is_binary for var in variables]
        self.prefers_one = [var.role in PREFERS_ONE for var in variables]
        lazy = [var.role in SCHEDULE_ROLES and weight[i] == 0 for i, var in enumerate(variables)]
        self.selectors = [i for i, var in enumerate(variables) if lazy[i] and var.role == "s"]
        self.branch_order = self._branch_order(weight, lazy)
        self.propagation_budget = 20 * len(self.rows) + 1_000

    def _add_row(self, indices, coefs, rhs, family):
        row = len(self.rows)
        self.rows.append((indices, coefs, rhs))
        self.row_family.append(family)
        for index in indices:
            self.var_rows[index].append(row)

    def _branch_order(self, weight: list[Fraction], lazy: list[bool]) -> list[int]:
        variables = self.model.variables
        decisions = [i for i in range(len(variables)) if not lazy[i]]
        costs, gains, binaries, integers = [], [], [], []
        for index in decisions:
            var = variables[index]
            if not var.is_binary:
                integers.append(index)
            elif weight[index] > 0 or var.role == "y":
                costs.append(index)
            elif weight[index] < 0 or var.role == "b":
                gains.append(index)
            else:
                binaries.append(index)
        # custos do último ao primeiro: os primeiros recursos ficam abertos por último
        costs.reverse()
        gains.sort(key=lambda index: (weight[index], -index))
        for index in costs:
            self.prefers_one[index] = False
        for index in gains:
            self.prefers_one[index] = True
        return costs + gains + binaries + integers

    def propagate(self, lb: list[int], ub: list[int], changed: Optional[int]) -> Optional[int]:
        """
        Aperta os limites até o ponto fixo ou o orçamento de avaliações.

        Returns:
            Índice da linha que provou inviabilidade, ou None
        """
        if changed is None:
            queue = deque(range(len(self.rows)))
        else:
            queue = deque(self.var_rows[changed])
        queued = set(queue)
        budget = self.propagation_budget

        while queue and budget > 0:
            budget -= 1
            row = queue.popleft()
            queued.discard(row)
            indices, coefs, rhs = self.rows[row]

            min_activity = 0
            for index, coef in zip(indices, coefs):
                min_activity += coef * (lb[index] if coef > 0 else ub[index])
            if min_activity > rhs:
                return row
            slack = rhs - min_activity

            for index, coef in zip(indices, coefs):
                if coef > 0:
                    bound = lb[index] + slack // coef
                    if bound >= ub[index]:
                        continue
                    ub[index] = bound
                else:
                    bound = ub[index] - slack // -coef
                    if bound <= lb[index]:
                        continue
                    lb[index] = bound
                if lb[index] > ub[index]:
                    return row
                for other in self.var_rows[index]:
                    if other != row and other not in queued:
                        queued.add(other)
                        queue.append(other)
        return None

    def objective_bound(self, lb: list[int], ub: list[int]) -> Fraction:
        bound = self.model.objective_constant
        for index, coef in self.objective:
            bound += coef * (lb[index] if coef > 0 else ub[index])
        return bound

    def row_holds(self, row: int, values: list[int]) -> bool:
        indices, coefs, rhs = self.rows[row]
        return sum(coef * values[index] for index, coef in zip(indices, coefs)) <= rhs

    def first_violation(self, values: list[int]) -> Optional[int]:
        for row in range(len(self.rows)):
            if not self.row_holds(row, values):
                return row
        return None

    def is_feasible(self, values: list[int]) -> bool:
        return self.first_violation(values) is None

    def next_branch(self, lb: list[int], ub: list[int], start: int) -> tuple[Optional[int], int]:
        order = self.branch_order
        for position in range(start, len(order)):
            index = order[position]
            if lb[index] < ub[index]:
                return index, position
        return None, len(order)

    def active_selectors(self, lb: list[int], ub: list[int]) -> list[int]:
        """Seletores livres cujas linhas não ficam satisfeitas por um valor fixo em todo o domínio"""
        active = []
        for selector in self.selectors:
            if lb[selector] == ub[selector]:
                continue
            if not any(self._always_holds(selector, value, lb, ub) for value in (1, 0)):
                active.append(selector)
        return active

    def _always_holds(self, selector: int, value: int, lb: list[int], ub: list[int]) -> bool:
        for row in self.var_rows[selector]:
            indices, coefs, rhs = self.rows[row]
            max_activity = 0
            for index, coef in zip(indices, coefs):
                if index == selector:
                    max_activity += coef * value
                else:
                    max_activity += coef * (ub[index] if coef > 0 else lb[index])
            if max_activity > rhs:
                return False
        return True

    def settle(self, selector: int, values: list[int]) -> bool:
        """Atribui ao seletor o primeiro valor (1, depois 0) que satisfaz as suas linhas"""
        for value in (1, 0):
            values[selector] = value
            if all(self.row_holds(row, values) for row in self.var_rows[selector]):
                return True
        values[selector] = 0
        return False

    def first_conflict(
        self, values: list[int], lb: list[int], ub: list[int], pending: list[int]
    ) -> tuple[Optional[int], list[int]]:
        """
        Primeiro seletor pendente violado pelo candidato com os dois valores.

        Returns:
            O seletor em conflito (ou None) e a lista de pendentes ainda livres
        """
        remaining = [selector for selector in pending if lb[selector] < ub[selector]]
        for selector in remaining:
            if not self.settle(selector, values):
                return selector, remaining
        return None, remaining


def split(lb: list[int], ub: list[int], index: int, binary: bool, prefers_one: bool):
    """Filhos de uma ramificação na ordem em que devem ser explorados"""
    if binary:
        children = []
        for value in (1, 0) if prefers_one else (0, 1):
            child_lb, child_ub = list(lb), list(ub)
            child_lb[index] = child_ub[index] = value
            children.append((child_lb, child_ub))
        return children
    low_ub, high_lb = list(ub), list(lb)
    low_ub[index] = lb[index]
    high_lb[index] = lb[index] + 1
    return [(list(lb), low_ub), (high_lb, list(ub))]


def bisect(lb: list[int], ub: list[int], index: int):
    middle = (lb[index] + ub[index]) // 2
    low_ub, high_lb = list(ub), list(lb)
    low_ub[index] = middle
    high_lb[index] = middle + 1
    return [(list(lb), low_ub), (high_lb, list(ub))]


def solve(model: IlpModel, limits: Optional[SolveLimits] = None) -> Solution:
    """
    Resolve o modelo até a otimalidade ou até esgotar os limites.

    Args:
        model: Modelo com todas as variáveis de domínio finito
        limits: Limite de nós e de tempo de parede (segundos)

    Returns:
        Solution com status Optimal, Infeasible ou TimedOut (com incumbente se houver)
    """
    limits = limits or SolveLimits.from_settings()
    started = time.monotonic()
    compiled = CompiledModel(model)

    best_value: Optional[Fraction] = None
    best: Optional[list[int]] = None
    first_failure: Optional[str] = None
    timed_out = False
    nodes = 0

    # (lb, ub, variável alterada, posição na ordem, seletores pendentes)
    stack = [(list(compiled.lower), list(compiled.upper), None, 0, None)]
    while stack:
        if limits.exhausted(nodes, time.monotonic() - started):
            timed_out = True
            break
        lb, ub, changed, start, pending = stack.pop()
        nodes += 1
        if best_value is not None and compiled.objective_bound(lb, ub) >= best_value:
            continue

        failed = compiled.propagate(lb, ub, changed)
        if failed is not None:
            if first_failure is None:
                first_failure = compiled.row_family[failed]
            continue

        bound = compiled.objective_bound(lb, ub)
        if best_value is not None and bound >= best_value:
            continue

        index, position = compiled.next_branch(lb, ub, start)
        if index is not None:
            children = split(lb, ub, index, compiled.binary[index], compiled.prefers_one[index])
            stack.extend(
                (child_lb, child_ub, index, position, None)
                for child_lb, child_ub in reversed(children)
            )
            continue

        if pending is None:
            pending = compiled.active_selectors(lb, ub)
        values = list(lb)
        conflict, pending = compiled.first_conflict(values, lb, ub, pending)
        if conflict is not None:
            children = split(lb, ub, conflict, True, True)
            stack.extend(
                (child_lb, child_ub, conflict, position, pending)
                for child_lb, child_ub in reversed(children)
            )
            continue

        for selector in compiled.selectors:
            if lb[selector] < ub[selector]:
                compiled.settle(selector, values)
        violated = compiled.first_violation(values)
        if violated is None:
            best_value, best = bound, values
            logger.debug("Novo incumbente %s após %d nós", best_value, nodes)
            continue

        indices = compiled.rows[violated][0]
        free = next((i for i in indices if lb[i] < ub[i]), None)
        if free is None:
            if first_failure is None:
                first_failure = compiled.row_family[violated]
            continue
        stack.extend(
            (child_lb, child_ub, free, position, pending)
            for child_lb, child_ub in reversed(bisect(lb, ub, free))
        )

    elapsed = time.monotonic() - started
    assignment = dict(zip(compiled.names, best)) if best is not None else {}

    if timed_out:
        logger.warning(
            "Solver interrompido após %d nós e %.2fs (incumbente: %s)",
            nodes,
            elapsed,
            best_value,
        )
        return Solution(SolveStatus.TIMED_OUT, assignment, best_value, nodes, elapsed)
    if best is None:
        logger.info("Modelo %s inviável (%d nós, família %s)", model.name, nodes, first_failure)
        return Solution(
            SolveStatus.INFEASIBLE, {}, None, nodes, elapsed, infeasible_family=first_failure
        )

    logger.info("Modelo %s resolvido: objetivo %s em %d nós", model.name, best_value, nodes)
    return Solution(SolveStatus.OPTIMAL, assignment, best_value, nodes, elapsed)
