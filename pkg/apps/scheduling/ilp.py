"""
Modelo de programação linear inteira neutro em relação ao solver

Coeficientes, limites e lado direito das restrições são inteiros exatos;
apenas os pesos do objetivo são racionais (Fraction).
"""

from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union


class VarKind(StrEnum):
    BINARY = "binary"
    INTEGER = "integer"


class Sense(StrEnum):
    LE = "<="
    GE = ">="
    EQ = "="


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind
    lower: int
    upper: int
    role: str = ""

    @property
    def is_binary(self) -> bool:
        return self.kind == VarKind.BINARY


@dataclass(frozen=True)
class Constraint:
    tag: str
    terms: tuple[tuple[str, int], ...]
    sense: Sense
    rhs: int

    @property
    def family(self) -> str:
        return self.tag.split(":", 1)[0]

    def activity(self, assignment: Mapping[str, int]) -> int:
        return sum(coef * assignment[name] for name, coef in self.terms)

    def residual(self, assignment: Mapping[str, int]) -> int:
        """Quanto a restrição está violada (0 quando satisfeita)"""
        gap = self.activity(assignment) - self.rhs
        if self.sense == Sense.LE:
            return max(gap, 0)
        if self.sense == Sense.GE:
            return max(-gap, 0)
        return abs(gap)


class LinExpr:
    """Expressão linear inteira usada durante a montagem do modelo"""

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Optional[dict[str, int]] = None, constant: int = 0):
        self.terms = dict(terms or {})
        self.constant = constant

    @classmethod
    def of(cls, name: str, coef: int = 1) -> "LinExpr":
        return cls({name: coef})

    def _combine(self, other: Union["LinExpr", int], sign: int) -> "LinExpr":
        result = LinExpr(self.terms, self.constant)
        if isinstance(other, LinExpr):
            for name, coef in other.terms.items():
                result.terms[name] = result.terms.get(name, 0) + sign * coef
            result.constant += sign * other.constant
        else:
            result.constant += sign * other
        return result

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self * -1

    def __mul__(self, factor: int) -> "LinExpr":
        return LinExpr(
            {name: coef * factor for name, coef in self.terms.items()},
            self.constant * factor,
        )

    __rmul__ = __mul__

    def bounds(self, model: "IlpModel") -> tuple[int, int]:
        """Menor e maior valor possíveis dados os limites das variáveis"""
        low = high = self.constant
        for name, coef in self.terms.items():
            var = model.variable(name)
            if coef >= 0:
                low += coef * var.lower
                high += coef * var.upper
            else:
                low += coef * var.upper
                high += coef * var.lower
        return low, high


class IlpModel:
    """
    Variáveis, restrições lineares e objetivo de minimização.

    A ordem de declaração é preservada e define a ordem de ramificação do
    solver e a exportação em formato LP.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective_terms: dict[str, Fraction] = {}
        self.objective_constant = Fraction(0)
        self._index: dict[str, int] = {}
        self._tags: set[str] = set()
        self._selector_count = 0

    def __repr__(self):
        return (
            f"IlpModel({self.name!r}, variables={len(self.variables)}, "
            f"constraints={len(self.constraints)})"
        )

    def add_variable(
        self, name: str, kind: VarKind, lower: int, upper: int, role: str = ""
    ) -> LinExpr:
        if name in self._index:
            raise ValueError(f"Variável já declarada: {name}")
        if lower > upper:
            raise ValueError(f"Domínio vazio para {name}: [{lower}, {upper}]")
        if kind == VarKind.BINARY:
            lower, upper = max(lower, 0), min(upper, 1)
        self._index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, lower, upper, role))
        return LinExpr.of(name)

    def add_binary(self, name: str, role: str = "") -> LinExpr:
        return self.add_variable(name, VarKind.BINARY, 0, 1, role)

    def add_integer(self, name: str, lower: int, upper: int, role: str = "") -> LinExpr:
        return self.add_variable(name, VarKind.INTEGER, lower, upper, role)

    def new_selector(self) -> LinExpr:
        """Cria um binário seletor novo para uma disjunção de dois ramos"""
        name = f"s_{self._selector_count}"
        self._selector_count += 1
        return self.add_binary(name, role="s")

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def variable(self, name: str) -> Variable:
        return self.variables[self._index[name]]

    def index_of(self, name: str) -> int:
        return self._index[name]

    def add_constraint(self, tag: str, expr: LinExpr, sense: Sense, rhs: int = 0) -> Constraint:
        """
        Adiciona a restrição expr (sense) rhs, movendo a constante para a direita.

        Args:
            tag: Identificador único no esquema familia:fluxoA[:fluxoB]:enlace[...]
            expr: Expressão linear
            sense: Sentido da restrição
            rhs: Lado direito inteiro
        """
        if tag in self._tags:
            raise ValueError(f"Tag de restrição duplicada: {tag}")
        for name in expr.terms:
            if name not in self._index:
                raise ValueError(f"Variável não declarada em {tag}: {name}")
        terms = tuple(
            sorted(
                ((name, coef) for name, coef in expr.terms.items() if coef != 0),
                key=lambda item: self._index[item[0]],
            )
        )
        constraint = Constraint(tag, terms, Sense(sense), rhs - expr.constant)
        self._tags.add(tag)
        self.constraints.append(constraint)
        return constraint

    def set_objective(self, terms: Mapping[str, Fraction], constant: Fraction = Fraction(0)):
        for name in terms:
            if name not in self._index:
                raise ValueError(f"Variável não declarada no objetivo: {name}")
        self.objective_terms = {
            name: Fraction(coef) for name, coef in terms.items() if coef != 0
        }
        self.objective_constant = Fraction(constant)

    def objective_value(self, assignment: Mapping[str, int]) -> Fraction:
        return self.objective_constant + sum(
            (coef * assignment[name] for name, coef in self.objective_terms.items()),
            Fraction(0),
        )

    def families(self) -> set[str]:
        return {constraint.family for constraint in self.constraints}

    def constraints_of(self, family: str) -> list[Constraint]:
        return [c for c in self.constraints if c.family == family]

    def variables_with_role(self, role: str) -> list[Variable]:
        return [var for var in self.variables if var.role == role]

    def variable_names(self) -> Iterable[str]:
        return (var.name for var in self.variables)
