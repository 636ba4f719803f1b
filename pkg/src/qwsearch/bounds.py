"""Ceiling on the marked-vertex probability for exceptional pair configurations.

For an equal-degree adjacent pair only the component ``psi(0) - phi_stat`` moves,
and it has squared norm ``2 a^2 d^2``.  Spreading that norm symmetrically over
the ``d - 1`` outward arcs (``x1``) and the facing arc (``x2``) of each marked
vertex, the marked probability

    2 (d - 1) (a + x1)^2 + 2 ((d - 1) a + x2)^2,
    subject to 2 (d - 1) x1^2 + 2 x2^2 = 2 a^2 d^2,

peaks at ``2 a^2 (2 sqrt((d - 1) d^3) + d (2d - 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InvalidParameter
from .graphs import Graph
from .walk import marked_arc_mask, trajectory, uniform_state


@dataclass(frozen=True)
class BoundResult:
    ceiling: float
    optimizer: tuple[float, float]
    norm_budget: float

    def constraint_residual(self, d: int) -> float:
        x1, x2 = self.optimizer
        return abs(2 * (d - 1) * x1 ** 2 + 2 * x2 ** 2 - self.norm_budget)


def pair_pm_bound(d: int, m: int) -> float:
    """Closed-form p_M ceiling for an adjacent equal-degree pair, ``a = 1/sqrt(2m)``."""
    if d < 2:
        raise InvalidParameter(f"degree must be >= 2, got {d}")
    if m < d:
        raise InvalidParameter(f"edge count {m} is smaller than degree {d}")
    a2 = 1.0 / (2 * m)
    return 2 * a2 * (2 * np.sqrt((d - 1) * d ** 3) + d * (2 * d - 1))


def _pair_objective(theta, d: int, a: float):
    x1 = a * d / np.sqrt(d - 1) * np.cos(theta)
    x2 = a * d * np.sin(theta)
    return 2 * (d - 1) * (a + x1) ** 2 + 2 * (-(d - 1) * a - x2) ** 2


def maximize_pm_bruteforce(d: int, a: float, samples: int = 1_000_000) -> BoundResult:
    """Numerically maximise the pair objective on its constraint ellipse.

    Dense sweep in ``theta`` followed by golden-section refinement around the
    best sample.  Independent of :func:`pair_pm_bound`.
    """
    if d < 2:
        raise InvalidParameter(f"degree must be >= 2, got {d}")
    if a <= 0:
        raise InvalidParameter(f"baseline amplitude must be positive, got {a}")
    thetas = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    vals = _pair_objective(thetas, d, a)
    best = int(np.argmax(vals))
    h = 2 * np.pi / samples
    t0 = thetas[best]
    theta = optimize.golden(lambda t: -_pair_objective(t, d, a),
                            brack=(t0 - h, t0, t0 + h), tol=1e-12)
    if _pair_objective(theta, d, a) < vals[best]:
        theta = t0
    x1 = a * d / np.sqrt(d - 1) * np.cos(theta)
    x2 = a * d * np.sin(theta)
    return BoundResult(float(_pair_objective(theta, d, a)), (float(x1), float(x2)),
                       2 * a ** 2 * d ** 2)


def partition_pm_bound(graph: Graph, partition) -> float:
    """Ceiling for any partition into stationary groups: ``(||P phi|| + ||psi0 - phi||)^2``.

    ``P`` projects onto marked arcs.  For a single equal-degree pair this equals
    :func:`pair_pm_bound`; it holds for every group family because ``phi`` is
    fixed and the moving remainder keeps its norm.
    """
    from .stationary import MarkedConfig, partition_state

    groups = tuple(tuple(g) for g in partition)
    marked = MarkedConfig(tuple(v for g in groups for v in g), groups)
    phi = partition_state(graph, marked).amplitudes(graph)
    psi0 = uniform_state(graph).amplitudes
    mask = marked_arc_mask(graph, marked)
    return float((np.linalg.norm(phi[mask]) + np.linalg.norm(psi0 - phi)) ** 2)


def empirical_pm_max(graph: Graph, marked, steps: int) -> float:
    """``max_{0 <= t <= steps} p_M(psi(t))`` starting from the uniform state."""
    if steps < 1:
        raise InvalidParameter(f"steps must be >= 1, got {steps}")
    mask = marked_arc_mask(graph, marked)
    if not mask.any():
        return 0.0
    best = 0.0
    for x in trajectory(uniform_state(graph), marked, steps):
        xm = x[mask]
        best = max(best, float(np.dot(xm, xm)))
    return best
