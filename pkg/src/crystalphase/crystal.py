"""Crystallographic group catalog: lattices, point actions, presentations.

Groups are stored in ``data/catalog.json`` as integer point-group matrices
acting in lattice coordinates, together with an exact rational Gram matrix
of a compatible basis.  Everything here is symmorphic: the full group is
the semidirect product of the translation lattice with the point group, so
the matrices and the defining relators are a complete description.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from crystalphase.exactlinalg import IntMatrix

__all__ = [
    "CrystalGroup",
    "GroupDataError",
    "change_basis",
    "exponent_sum_rows",
    "list_group_names",
    "load_group",
    "reciprocal_action",
    "validate_group",
]


class GroupDataError(ValueError):
    """Catalog data is malformed or internally inconsistent."""


@dataclass(frozen=True)
class CrystalGroup:
    """One symmorphic group: point action on the lattice plus metadata.

    ``generators`` maps generator names to their integer matrices in the
    direct lattice basis.  ``relators`` are words in those names whose
    matrix products must equal the identity; together with the implicit
    lattice relations they present the point group.
    """

    name: str
    dimension: int
    lattice: str
    point_symbol: str
    point_order: int
    generators: tuple[tuple[str, IntMatrix], ...]
    relators: tuple[tuple[str, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[float, ...], ...]

    @property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    def generator(self, name: str) -> IntMatrix:
        for gname, mat in self.generators:
            if gname == name:
                return mat
        raise GroupDataError(f"{self.name!r} has no generator {name!r}")

    def reciprocal_generators(self) -> tuple[tuple[str, IntMatrix], ...]:
        """Generator action on reciprocal lattice coordinates."""
        return tuple((name, reciprocal_action(m)) for name, m in self.generators)

    def point_group_elements(self) -> tuple[IntMatrix, ...]:
        """All point group elements, by closure of the generators."""
        elements = [IntMatrix.identity(self.dimension)]
        frontier = list(elements)
        gens = [m for _, m in self.generators]
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    cand = g @ e
                    if cand not in elements:
                        elements.append(cand)
                        nxt.append(cand)
            frontier = nxt
            if len(elements) > 4 * self.point_order:
                raise GroupDataError(f"{self.name!r}: closure exceeds stated order")
        return tuple(elements)


def _adjugate(m: IntMatrix) -> IntMatrix:
    n = m.rows
    rows = []
    idx = list(range(n))
    for i in range(n):
        row = []
        for j in range(n):
            minor = m.submatrix([r for r in idx if r != j], [c for c in idx if c != i])
            row.append((-1) ** (i + j) * minor.det())
        rows.append(row)
    return IntMatrix.from_rows(rows)


def reciprocal_action(m: IntMatrix) -> IntMatrix:
    """Inverse transpose of an integer matrix with det +-1.

    A point operation acting on direct lattice coordinates acts on
    reciprocal coordinates by the inverse transpose; unimodularity keeps
    the result integral.
    """
    if m.rows != m.cols:
        raise GroupDataError("point matrices must be square")
    det = m.det()
    if det not in (1, -1):
        raise GroupDataError(f"point matrix must be unimodular, det={det}")
    # inverse = adjugate / det, and det is +-1
    return _adjugate(m).scale(det).transpose()


@functools.cache
def _catalog() -> dict:
    text = resources.files("crystalphase.data").joinpath("catalog.json").read_text()
    return json.loads(text)


def list_group_names() -> tuple[str, ...]:
    return tuple(_catalog().keys())


@functools.cache
def load_group(name: str) -> CrystalGroup:
    raw = _catalog().get(name)
    if raw is None:
        known = ", ".join(list_group_names())
        raise GroupDataError(f"unknown group {name!r}; catalog has: {known}")
    generators = tuple(
        (gname, IntMatrix.from_rows(rows)) for gname, rows in raw["generators"].items()
    )
    group = CrystalGroup(
        name=name,
        dimension=raw["dimension"],
        lattice=raw["lattice"],
        point_symbol=raw["point_symbol"],
        point_order=raw["point_order"],
        generators=generators,
        relators=tuple(tuple(word) for word in raw["relators"]),
        gram=tuple(tuple(Fraction(x) for x in row) for row in raw["gram"]),
        basis=tuple(tuple(float(x) for x in row) for row in raw["basis"]),
    )
    validate_group(group)
    return group


def validate_group(group: CrystalGroup) -> None:
    """Check internal consistency; raises GroupDataError on any failure."""
    d = group.dimension
    ident = IntMatrix.identity(d)

    gram = group.gram
    if len(gram) != d or any(len(row) != d for row in gram):
        raise GroupDataError(f"{group.name!r}: gram must be {d}x{d}")
    for i in range(d):
        for j in range(d):
            if gram[i][j] != gram[j][i]:
                raise GroupDataError(f"{group.name!r}: gram not symmetric")

    for name, m in group.generators:
        if m.rows != d or m.cols != d:
            raise GroupDataError(f"{group.name!r}.{name}: wrong shape")
        if m.det() not in (1, -1):
            raise GroupDataError(f"{group.name!r}.{name}: not unimodular")
        # exact isometry: m^T gram m == gram, in rational arithmetic
        for i in range(d):
            for j in range(d):
                acc = Fraction(0)
                for a in range(d):
                    for b in range(d):
                        acc += m.get(a, i) * gram[a][b] * m.get(b, j)
                if acc != gram[i][j]:
                    raise GroupDataError(
                        f"{group.name!r}.{name}: does not preserve the lattice metric"
                    )

    for word in group.relators:
        prod = ident
        for gname in word:
            prod = prod @ group.generator(gname)
        if prod != ident:
            raise GroupDataError(f"{group.name!r}: relator {'.'.join(word)} fails")

    if len(group.point_group_elements()) != group.point_order:
        raise GroupDataError(
            f"{group.name!r}: closure size {len(group.point_group_elements())} "
            f"!= stated order {group.point_order}"
        )

    # the float basis must reproduce the rational gram
    basis = group.basis
    if len(basis) != d or any(len(row) != d for row in basis):
        raise GroupDataError(f"{group.name!r}: basis must be {d}x{d}")
    for i in range(d):
        for j in range(d):
            dot = sum(basis[i][a] * basis[j][a] for a in range(d))
            if abs(dot - float(gram[i][j])) > 1.0e-9:
                raise GroupDataError(f"{group.name!r}: basis does not match gram")


def change_basis(group: CrystalGroup, matrix: IntMatrix) -> CrystalGroup:
    """The same group presented in a new lattice basis.

    ``matrix`` holds the new basis vectors as integer rows in the old
    basis and must be unimodular.  Lattice coordinates transform by the
    inverse transpose, so every point matrix conjugates accordingly while
    the Gram matrix and the embedded basis follow the rows.  Anything
    computed from the group alone (classification, graded pieces) must
    not change; this is how basis independence gets tested.
    """
    d = group.dimension
    if matrix.rows != d or matrix.cols != d:
        raise GroupDataError(f"change of basis must be {d}x{d}, got {matrix.rows}x{matrix.cols}")
    if matrix.det() not in (1, -1):
        raise GroupDataError(f"change of basis must be unimodular, det={matrix.det()}")
    inv_t = reciprocal_action(matrix)
    m_t = matrix.transpose()
    generators = tuple(
        (name, inv_t @ mat @ m_t) for name, mat in group.generators
    )
    gram = tuple(
        tuple(
            sum(
                Fraction(matrix.get(i, a)) * group.gram[a][b] * matrix.get(j, b)
                for a in range(d)
                for b in range(d)
            )
            for j in range(d)
        )
        for i in range(d)
    )
    basis = tuple(
        tuple(
            sum(matrix.get(i, j) * group.basis[j][a] for j in range(d))
            for a in range(d)
        )
        for i in range(d)
    )
    return CrystalGroup(
        name=group.name,
        dimension=d,
        lattice=group.lattice,
        point_symbol=group.point_symbol,
        point_order=group.point_order,
        generators=generators,
        relators=group.relators,
        gram=gram,
        basis=basis,
    )


def exponent_sum_rows(group: CrystalGroup) -> IntMatrix:
    """Abelianized relator matrix: one row per relator, one column per generator.

    Entry (i, j) counts occurrences of generator j in relator i; group
    inverses never appear in catalog relators so no signs are needed.
    """
    names = group.generator_names
    rows = [[word.count(n) for n in names] for word in group.relators]
    if not rows:
        return IntMatrix.zeros(0, len(names))
    return IntMatrix.from_rows(rows)
