"""Quadratic arithmetic programs built from circuits by Lagrange interpolation over 1..d."""
from __future__ import annotations

from .circuit import Circuit, Witness
from .errors import FieldTooSmall, UnsatisfiedWitness
from .polynomial import ConsecutiveInterpolator, Polynomial


class QapInstance:
    """Variable polynomials l_i, r_i, o_i and target t(x) = (x-1)...(x-d).

    The variable polynomials are kept as sparse columns (their values at
    x = 1..d) and interpolated on demand; ``evaluate_at`` gives all of them at
    one point in O(d + nonzeros).
    """

    def __init__(self, circuit: Circuit):
        field = circuit.field
        d = circuit.num_ops
        if d == 0:
            raise ValueError("circuit has no operations")
        if d >= field.p:
            raise FieldTooSmall(f"{d} operations need {d} distinct nonzero points; field has {field.p}")
        self.circuit = circuit
        self.field = field
        self.d = d
        self.m = circuit.num_public
        self.n = circuit.num_vars
        self.circuit_id = circuit.circuit_id
        n = self.n
        self.columns: tuple[list[dict[int, int]], ...] = ([{} for _ in range(n + 1)],
                                                           [{} for _ in range(n + 1)],
                                                           [{} for _ in range(n + 1)])
        left, right, out = self.columns
        for j, op in enumerate(circuit.operations, 1):
            for var, c in op.left:
                left[var][j] = c
            for var, c in op.right:
                right[var][j] = c
            out[op.output][j] = 1
        self.interp = ConsecutiveInterpolator(d, field)
        self._polys: dict[tuple[int, int], Polynomial] = {}

    @property
    def target(self) -> Polynomial:
        return self.interp.target

    def _poly(self, family: int, i: int) -> Polynomial:
        key = (family, i)
        poly = self._polys.get(key)
        if poly is None:
            values = [0] * self.d
            for j, c in self.columns[family][i].items():
                values[j - 1] = c
            poly = self._polys[key] = self.interp.interpolate(values)
        return poly

    def l(self, i: int) -> Polynomial:
        return self._poly(0, i)

    def r(self, i: int) -> Polynomial:
        return self._poly(1, i)

    def o(self, i: int) -> Polynomial:
        return self._poly(2, i)

    def evaluate_at(self, s: int) -> tuple[list[int], list[int], list[int]]:
        """(l_i(s), r_i(s), o_i(s)) for i = 0..n; s must lie outside 1..d."""
        p = self.field.p
        basis = self.interp.basis_at(s)
        result = []
        for cols in self.columns:
            vals = []
            for col in cols:
                acc = 0
                for j, c in col.items():
                    acc += c * basis[j - 1]
                vals.append(acc % p)
            result.append(vals)
        return tuple(result)

    def operand_values(self, values) -> tuple[list[int], list[int], list[int]]:
        """L(j), R(j), O(j) for j = 1..d under an assignment."""
        p = self.field.p
        ops = self.circuit.operations
        L = [sum(c * values[v] for v, c in op.left) % p for op in ops]
        R = [sum(c * values[v] for v, c in op.right) % p for op in ops]
        O = [values[op.output] % p for op in ops]
        return L, R, O

    def export(self) -> str:
        """Text dump of t(x) and every nonzero variable polynomial (coefficients low to high)."""
        lines = [f"zkpol-qap v1 d {self.d} m {self.m} n {self.n}",
                 "t " + " ".join(map(str, self.target.coeffs))]
        for tag, fam in (("l", 0), ("r", 1), ("o", 2)):
            for i in range(self.n + 1):
                if self.columns[fam][i]:
                    lines.append(f"{tag} {i} " + " ".join(map(str, self._poly(fam, i).coeffs)))
        return "\n".join(lines) + "\n"


def circuit_to_qap(circuit: Circuit) -> QapInstance:
    return QapInstance(circuit)


def assemble(q: QapInstance, w: Witness) -> tuple[Polynomial, Polynomial, Polynomial, Polynomial]:
    """L, R, O as witness-weighted sums of variable polynomials, and h = (L*R - O) / t.

    Raises UnsatisfiedWitness when t does not divide L*R - O.
    """
    if len(w.values) != q.n + 1:
        raise UnsatisfiedWitness(f"witness has {len(w.values)} values, circuit needs {q.n + 1}")
    Lv, Rv, Ov = q.operand_values(w.values)
    L = q.interp.interpolate(Lv)
    R = q.interp.interpolate(Rv)
    O = q.interp.interpolate(Ov)
    h, rem = (L * R - O).divmod(q.target)
    if not rem.is_zero():
        raise UnsatisfiedWitness("L*R - O is not divisible by the target polynomial")
    return L, R, O, h
