"""Pauli strings and stabilizer tableau simulation with symbolic signs.

Signs are affine GF(2) forms over prior measurement outcomes, so a single
tableau pass through a circuit yields, for every deterministic measurement,
the parity of earlier outcomes it must equal. Randomness that is collapsed
but never recorded (qubit resets of entangled qubits) is tracked through
hidden symbols that can never appear in a reported form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf2 import BitMatrix

CLIFFORD_GATES = ("H", "S", "X", "Y", "Z", "CNOT", "CZ")


@dataclass(frozen=True)
class SymbolicSign:
    """Affine GF(2) form ``constant XOR sum(m_i)`` over measurement outcomes.

    ``measurement_terms`` hold 1-based recorded measurement indices;
    ``hidden_terms`` hold unrecorded randomness (resets of entangled qubits).
    """

    constant: int = 0
    measurement_terms: frozenset[int] = frozenset()
    hidden_terms: frozenset[int] = frozenset()

    def __xor__(self, other: "SymbolicSign") -> "SymbolicSign":
        return SymbolicSign(
            self.constant ^ other.constant,
            self.measurement_terms ^ other.measurement_terms,
            self.hidden_terms ^ other.hidden_terms,
        )

    def flip(self) -> "SymbolicSign":
        return SymbolicSign(self.constant ^ 1, self.measurement_terms, self.hidden_terms)

    @property
    def is_concrete(self) -> bool:
        return not self.measurement_terms and not self.hidden_terms

    def evaluate(self, outcomes: dict[int, int]) -> int:
        if self.hidden_terms:
            raise ValueError("sign depends on unrecorded randomness")
        v = self.constant
        for t in self.measurement_terms:
            v ^= outcomes[t] & 1
        return v

    def __repr__(self) -> str:
        parts = [str(self.constant)] if self.constant or self.is_concrete else []
        parts += [f"m{t}" for t in sorted(self.measurement_terms)]
        parts += [f"h{t}" for t in sorted(self.hidden_terms)]
        return "(" + "^".join(parts) + ")"


PLUS = SymbolicSign()
MINUS = SymbolicSign(1)

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


class PauliString:
    """Hermitian Pauli operator ``(-1)^sign * prod_q {I,X,Y,Z}_q``."""

    __slots__ = ("n", "x_bits", "z_bits", "sign")

    def __init__(self, n: int, x_bits=None, z_bits=None, sign: SymbolicSign = PLUS):
        self.n = n
        self.x_bits = np.zeros(n, dtype=np.uint8) if x_bits is None else np.asarray(x_bits, dtype=np.uint8) & 1
        self.z_bits = np.zeros(n, dtype=np.uint8) if z_bits is None else np.asarray(z_bits, dtype=np.uint8) & 1
        if self.x_bits.shape != (n,) or self.z_bits.shape != (n,):
            raise ValueError("x/z bit vectors must have length n")
        self.sign = sign

    @classmethod
    def from_label(cls, label: str, n: int, sign: SymbolicSign = PLUS) -> "PauliString":
        """Build from a product label like ``'Z0*Z1'`` or ``'X2'``."""
        p = cls(n, sign=sign)
        if label.strip() and label.strip() != "I":
            for term in label.split("*"):
                term = term.strip()
                kind, q = term[0].upper(), int(term[1:])
                if kind not in "XYZ":
                    raise ValueError(f"bad Pauli term {term!r}")
                if not 0 <= q < n:
                    raise ValueError(f"qubit {q} out of range for n={n}")
                if p.x_bits[q] or p.z_bits[q]:
                    raise ValueError(f"duplicate qubit {q} in Pauli product")
                if kind in "XY":
                    p.x_bits[q] = 1
                if kind in "ZY":
                    p.z_bits[q] = 1
        return p

    @classmethod
    def single(cls, n: int, q: int, kind: str, sign: SymbolicSign = PLUS) -> "PauliString":
        return cls.from_label(f"{kind}{q}", n, sign)

    def label(self) -> str:
        terms = [
            f"{_LETTER[(int(self.x_bits[q]), int(self.z_bits[q]))]}{q}"
            for q in range(self.n)
            if self.x_bits[q] or self.z_bits[q]
        ]
        return "*".join(terms) if terms else "I"

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    @property
    def x_weight(self) -> int:
        return int(np.count_nonzero(self.x_bits))

    @property
    def z_weight(self) -> int:
        return int(np.count_nonzero(self.z_bits))

    def is_identity(self) -> bool:
        return self.weight == 0

    def commutes(self, other: "PauliString") -> int:
        """1 if the symplectic inner product vanishes, else 0."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        overlap = int(np.sum(self.x_bits & other.z_bits) + np.sum(self.z_bits & other.x_bits))
        return 1 - (overlap & 1)

    def mul(self, other: "PauliString") -> "PauliString":
        """Product of two commuting Hermitian Paulis (result is Hermitian)."""
        if self.n != other.n:
            raise ValueError("size mismatch")
        phase = _phase_exponent(self.x_bits, self.z_bits, other.x_bits, other.z_bits)
        if phase % 2:
            raise ValueError("product of anticommuting Paulis is not Hermitian")
        sign = self.sign ^ other.sign
        if (phase // 2) % 2:
            sign = sign.flip()
        return PauliString(self.n, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, sign)

    def copy(self) -> "PauliString":
        return PauliString(self.n, self.x_bits.copy(), self.z_bits.copy(), self.sign)

    def __repr__(self) -> str:
        return f"{self.sign}{self.label()}"


def _phase_exponent(x1, z1, x2, z2) -> int:
    """Exponent k (mod 4) in B(x1,z1) B(x2,z2) = i^k B(x1^x2, z1^z2).

    B is the Hermitian base operator with per-qubit letters I, X, Z, Y.
    Uses the standard per-qubit phase table accumulated mod 4.
    """
    x1 = x1.astype(np.int8)
    z1 = z1.astype(np.int8)
    x2 = x2.astype(np.int8)
    z2 = z2.astype(np.int8)
    # per-qubit contribution g in {-1, 0, 1}
    g = np.zeros_like(x1)
    # from X (x1=1, z1=0): z2 * (2*x2 - 1)
    mx = (x1 == 1) & (z1 == 0)
    g[mx] = (z2 * (2 * x2 - 1))[mx]
    # from Y (x1=1, z1=1): z2 - x2
    my = (x1 == 1) & (z1 == 1)
    g[my] = (z2 - x2)[my]
    # from Z (x1=0, z1=1): x2 * (1 - 2*z2)
    mz = (x1 == 0) & (z1 == 1)
    g[mz] = (x2 * (1 - 2 * z2))[mz]
    return int(g.sum()) % 4


def commutes(a: PauliString, b: PauliString) -> int:
    return a.commutes(b)


@dataclass
class MeasureOutcome:
    """Result of measuring a Pauli on a tableau.

    ``deterministic`` outcomes carry the predicted parity as a symbolic sign;
    random outcomes record which fresh symbol now labels the result.
    """

    random: bool
    sign: SymbolicSign

    @property
    def deterministic(self) -> bool:
        return not self.random


class Tableau:
    """Stabilizer group generators of the current state.

    The generator list may have fewer than ``n`` entries (mixed states);
    measuring an undetermined Pauli then appends a fresh generator. A tableau
    is owned by one execution context; copies are cheap.
    """

    def __init__(self, n: int, generators: Iterable[PauliString] | None = None):
        self.n = n
        if generators is None:
            generators = [PauliString.single(n, q, "Z") for q in range(n)]
        self.generators: list[PauliString] = [g.copy() for g in generators]
        self._hidden_counter = 0

    @classmethod
    def from_labels(cls, n: int, labels: Iterable[str]) -> "Tableau":
        gens = []
        for lab in labels:
            sign = PLUS
            lab = lab.strip()
            if lab.startswith("-"):
                sign = MINUS
                lab = lab[1:]
            elif lab.startswith("+"):
                lab = lab[1:]
            gens.append(PauliString.from_label(lab, n, sign))
        return cls(n, gens)

    def copy(self) -> "Tableau":
        t = Tableau(self.n, self.generators)
        t._hidden_counter = self._hidden_counter
        return t

    # -- gate application ----------------------------------------------------

    def apply_clifford(self, gate: str, targets: Sequence[int] | tuple[int, ...]) -> None:
        gate = gate.upper()
        if gate not in CLIFFORD_GATES:
            raise ValueError(f"unknown gate {gate!r}")
        one_qubit = gate in ("H", "S", "X", "Y", "Z")
        if one_qubit and len(targets) != 1 or not one_qubit and len(targets) != 2:
            raise ValueError(f"{gate} expects {1 if one_qubit else 2} target(s)")
        for q in targets:
            if not 0 <= q < self.n:
                raise ValueError(f"target {q} out of range")
        if not one_qubit and targets[0] == targets[1]:
            raise ValueError(f"{gate} targets must be distinct")
        for g in self.generators:
            _conjugate(g, gate, targets)

    def conjugated(self, p: PauliString, gates: Iterable[tuple[str, tuple[int, ...]]]) -> PauliString:
        out = p.copy()
        for gate, targets in gates:
            _conjugate(out, gate, targets)
        return out

    # -- measurement ----------------------------------------------------------

    def measure(self, p: PauliString, meas_index: int) -> MeasureOutcome:
        """Measure Pauli ``p`` (sign must be +1) and record index ``meas_index``.

        After a deterministic measurement the measured operator re-enters the
        generator list carrying its own record symbol, so a later repeat of
        the same measurement is predicted relative to this one (the
        comparison-with-previous-round detector style) rather than relative
        to the start of the circuit.
        """
        if p.sign != PLUS:
            raise ValueError("measured Pauli must carry a concrete +1 sign")
        fresh = SymbolicSign(0, frozenset([meas_index]))
        outcome = self._collapse(p, fresh)
        if outcome.deterministic and outcome.sign.hidden_terms:
            # Deterministic in the group, but conditioned on unrecorded
            # randomness: the observer sees a fresh random bit. Recording it
            # pins down one hidden symbol, which is eliminated everywhere.
            self._eliminate_hidden(outcome.sign, fresh)
            return MeasureOutcome(random=True, sign=fresh)
        if outcome.deterministic:
            combo = self._in_group(p)
            if combo:
                replaced = p.copy()
                replaced.sign = fresh
                self.generators[combo[-1]] = replaced
        return outcome

    def reset(self, q: int) -> None:
        """Reset qubit ``q`` to |0>, reintroducing a fresh +Z generator."""
        z = PauliString.single(self.n, q, "Z")
        self._hidden_counter += 1
        hidden = SymbolicSign(0, hidden_terms=frozenset([self._hidden_counter]))
        outcome = self._collapse(z, hidden)
        # Conditionally flip (classically controlled X^outcome) so that +Z_q
        # stabilizes afterwards; the flip toggles signs of z-supported
        # generators by the outcome's symbolic value.
        value = outcome.sign
        if not value.is_concrete or value.constant:
            for g in self.generators:
                if g.z_bits[q]:
                    g.sign = g.sign ^ value

    def _collapse(self, p: PauliString, fresh: SymbolicSign) -> MeasureOutcome:
        anti = [i for i, g in enumerate(self.generators) if not g.commutes(p)]
        if anti:
            pivot = anti[0]
            gp = self.generators[pivot]
            for i in anti[1:]:
                self.generators[i] = self.generators[i].mul(gp)
            new_gen = p.copy()
            new_gen.sign = fresh
            self.generators[pivot] = new_gen
            return MeasureOutcome(random=True, sign=fresh)
        combo = self._in_group(p)
        if combo is None:
            # Undetermined direction of a mixed state: outcome is fresh and
            # the group grows by the measured operator.
            new_gen = p.copy()
            new_gen.sign = fresh
            self.generators.append(new_gen)
            return MeasureOutcome(random=True, sign=fresh)
        acc = PauliString(self.n)
        for i in combo:
            acc = acc.mul(self.generators[i])
        # acc == (+/-)^sign p as bit patterns; outcome parity is acc.sign
        return MeasureOutcome(random=False, sign=acc.sign)

    def _in_group(self, p: PauliString) -> list[int] | None:
        """Indices of generators whose product matches p's bit pattern, or None."""
        k = len(self.generators)
        if k == 0:
            return None if p.weight else []
        rows = np.zeros((k, 2 * self.n), dtype=np.uint8)
        for i, g in enumerate(self.generators):
            rows[i, : self.n] = g.x_bits
            rows[i, self.n:] = g.z_bits
        target = np.concatenate([p.x_bits, p.z_bits])
        sol = BitMatrix.from_array(rows.T).solve(target)
        if sol is None:
            return None
        return [i for i in range(k) if sol[i]]

    def _eliminate_hidden(self, form: SymbolicSign, fresh: SymbolicSign) -> None:
        """Substitute one hidden symbol of ``form`` using ``form == fresh``."""
        h = min(form.hidden_terms)
        # h == fresh ^ (form without h)
        rest = SymbolicSign(
            form.constant,
            form.measurement_terms,
            form.hidden_terms ^ frozenset([h]),
        ) ^ fresh
        for g in self.generators:
            if h in g.sign.hidden_terms:
                stripped = SymbolicSign(
                    g.sign.constant,
                    g.sign.measurement_terms,
                    g.sign.hidden_terms ^ frozenset([h]),
                )
                g.sign = stripped ^ rest

    # -- invariants -------------------------------------------------------------

    def generators_commute(self) -> bool:
        gens = self.generators
        return all(gens[i].commutes(gens[j]) for i in range(len(gens)) for j in range(i + 1, len(gens)))

    def generators_independent(self) -> bool:
        k = len(self.generators)
        if k == 0:
            return True
        rows = np.zeros((k, 2 * self.n), dtype=np.uint8)
        for i, g in enumerate(self.generators):
            rows[i, : self.n] = g.x_bits
            rows[i, self.n:] = g.z_bits
        return BitMatrix.from_array(rows).rank() == k


def _conjugate(g: PauliString, gate: str, targets) -> None:
    x, z = g.x_bits, g.z_bits
    if gate == "H":
        q = targets[0]
        if x[q] & z[q]:
            g.sign = g.sign.flip()
        x[q], z[q] = z[q], x[q]
    elif gate == "S":
        q = targets[0]
        if x[q] & z[q]:
            g.sign = g.sign.flip()
        z[q] ^= x[q]
    elif gate == "X":
        q = targets[0]
        if z[q]:
            g.sign = g.sign.flip()
    elif gate == "Y":
        q = targets[0]
        if x[q] ^ z[q]:
            g.sign = g.sign.flip()
    elif gate == "Z":
        q = targets[0]
        if x[q]:
            g.sign = g.sign.flip()
    elif gate == "CNOT":
        c, t = targets
        if x[c] & z[t] & (x[t] ^ z[c] ^ 1):
            g.sign = g.sign.flip()
        x[t] ^= x[c]
        z[c] ^= z[t]
    elif gate == "CZ":
        a, b = targets
        # CZ = H(b) CNOT(a,b) H(b)
        _conjugate(g, "H", (b,))
        _conjugate(g, "CNOT", (a, b))
        _conjugate(g, "H", (b,))
    else:  # pragma: no cover
        raise ValueError(f"unknown gate {gate!r}")
