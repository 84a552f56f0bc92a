"""Exact convex decompositions of SR states of ``K_n`` into DR states.

An SR state is split into two SR states with a larger maximum (when every
entry is below ``n - 1``), or, once the maximum is ``n - 1``, reduced to a
smaller complete graph by keeping the tail of its sorted form fixed. The
resulting certificates use exact rationals only.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .complete import is_dr_complete, is_sr_complete, stochastic_burning
from .dynamics import Config
from .errors import NotRecurrentError
from .graph import complete_graph
from .recurrence import dhar_burning


@dataclass
class DecompositionCertificate:
    target: Config
    components: list[tuple[Fraction, Config]]

    def to_json(self) -> dict:
        return {
            "target": list(self.target),
            "components": [
                {"weight": f"{w.numerator}/{w.denominator}", "state": list(s)}
                for w, s in self.components
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> DecompositionCertificate:
        return cls(
            tuple(data["target"]),
            [(Fraction(c["weight"]), tuple(c["state"])) for c in data["components"]],
        )


@dataclass
class CertificateCheck:
    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _check_stable(n: int, c: Sequence[int]) -> Config:
    c = tuple(c)
    if len(c) != n:
        raise ValueError(f"configuration has {len(c)} entries, expected {n}")
    if any(not isinstance(v, int) for v in c):
        raise TypeError("configuration entries must be integers")
    if any(not 0 <= v < n for v in c):
        raise ValueError(f"configuration is not stable on K_{n}")
    return c


def _require_sr(n: int, c: Config) -> None:
    if not is_sr_complete(n, c):
        k, report = stochastic_burning(n, c)
        raise NotRecurrentError(f"configuration is not SR on K_{n}", report)


def _max_pair(c: Config) -> tuple[int, int]:
    """0-based indices of the maximum and the next maximum (lowest index first)."""
    top = max(range(len(c)), key=lambda i: (c[i], -i))
    rest = [i for i in range(len(c)) if i != top]
    nxt = max(rest, key=lambda i: (c[i], -i))
    return top, nxt


def split_superstable(n: int, c: Sequence[int]) -> tuple[Config, Config, tuple[Fraction, Fraction]]:
    """Move one grain from the runner-up to the maximum (and the mirrored swap).

    Returns ``(c1, c2, (w1, w2))`` with ``c == w1*c1 + w2*c2``; both parts are
    SR and have a strictly larger maximum than ``c``.
    """
    c = _check_stable(n, c)
    if n < 3:
        raise ValueError("splitting needs n >= 3")
    if max(c) >= n - 1:
        raise ValueError("configuration is not superstable")
    _require_sr(n, c)
    top, nxt = _max_pair(c)
    k = c[top] - c[nxt] + 1
    c1 = list(c)
    c1[top] += 1
    c1[nxt] -= 1
    c2 = list(c)
    c2[top] = c[nxt] - 1
    c2[nxt] = c[top] + 1
    return tuple(c1), tuple(c2), (Fraction(k, k + 1), Fraction(1, k + 1))


def _decompose(n: int, c: Config) -> dict[Config, Fraction]:
    if n <= 2 or is_dr_complete(n, c):
        return {c: Fraction(1)}
    if max(c) < n - 1:
        c1, c2, (w1, w2) = split_superstable(n, c)
        out: dict[Config, Fraction] = {}
        for part, w in ((c1, w1), (c2, w2)):
            for s, ws in _decompose(n, part).items():
                out[s] = out.get(s, 0) + w * ws
        return out
    perm = sorted(range(n), key=c.__getitem__)  # perm[pos] = original index
    inc = tuple(c[i] for i in perm)
    j = max(i for i in range(1, n + 1) if inc[i - 1] < i - 1)
    head, tail = inc[:j], inc[j:]
    out = {}
    for s, w in _decompose(j, head).items():
        extended = s + tail
        state = [0] * n
        for pos, idx in enumerate(perm):
            state[idx] = extended[pos]
        state = tuple(state)
        out[state] = out.get(state, 0) + w
    return out


def decompose(n: int, c: Sequence[int]) -> DecompositionCertificate:
    """Write an SR state of ``K_n`` as an exact convex combination of DR states.

    Raises :class:`NotRecurrentError` (carrying the stochastic-burning report)
    when ``c`` is not SR.
    """
    c = _check_stable(n, c)
    _require_sr(n, c)
    parts = _decompose(n, c)
    comps = sorted((s, w) for s, w in parts.items() if w != 0)
    return DecompositionCertificate(c, [(w, s) for s, w in comps])


def decompose_level_restricted(n: int, c: Sequence[int]) -> DecompositionCertificate:
    """As :func:`decompose`, additionally asserting every component has the level of ``c``."""
    cert = decompose(n, c)
    total = sum(cert.target)
    if any(sum(s) != total for _, s in cert.components):
        raise RuntimeError("component level differs from target level")
    return cert


def verify_certificate(n: int, cert: DecompositionCertificate) -> CertificateCheck:
    """Independently re-check a certificate; never raises."""
    reasons = []
    try:
        target = tuple(cert.target)
        if len(target) != n:
            reasons.append(f"target has {len(target)} entries, expected {n}")
        if not cert.components:
            reasons.append("no components")
        graph = complete_graph(n)
        total = Fraction(0)
        acc = [Fraction(0)] * len(target)
        for w, s in cert.components:
            w = Fraction(w)
            s = tuple(s)
            if w <= 0:
                reasons.append(f"non-positive weight {w} on {s}")
            if len(s) != n:
                reasons.append(f"component {s} has wrong length")
                continue
            total += w
            if any(not 0 <= v < n for v in s):
                reasons.append(f"component {s} is not stable")
            elif dhar_burning(graph, s).remain:
                reasons.append(f"component {s} is not DR")
            for i, v in enumerate(s[: len(acc)]):
                acc[i] += w * v
        if total != 1:
            reasons.append(f"weights sum to {total}, not 1")
        if tuple(acc) != tuple(Fraction(v) for v in target):
            reasons.append("weighted sum of components differs from target")
    except Exception as exc:  # malformed input of any shape
        reasons.append(f"malformed certificate: {exc}")
    return CertificateCheck(not reasons, reasons)


@dataclass
class Membership:
    """Lattice-point membership answer: a certificate when inside, burning evidence otherwise."""

    member: bool
    certificate: DecompositionCertificate | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.member


def is_in_dr_polytope(n: int, c: Sequence[int]) -> Membership:
    """Decide whether an integer point lies in the convex hull of DR states of ``K_n``."""
    c = tuple(c)
    if any(not isinstance(v, int) for v in c):
        raise TypeError("only integer points are supported")
    if len(c) != n:
        raise ValueError(f"point has {len(c)} coordinates, expected {n}")
    if any(not 0 <= v < n for v in c):
        return Membership(False)
    try:
        cert = decompose(n, c)
    except NotRecurrentError as exc:
        return Membership(False, witness=exc.witness)
    return Membership(True, certificate=cert)
