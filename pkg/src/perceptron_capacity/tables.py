"""Reference rows for the lowered capacity bounds and their recomputation.

Each reference row lists, for a margin ``kappa`` and error fraction ``f_wb``:
the lifted residual xi_hat, the optimizing (c3, gamma, nu), the lifted bound
alpha_low, nu_hat of the c3 -> 0 bound and that bound alpha_u.
"""

from dataclasses import dataclass
from typing import Optional

from .error_capacity import alpha_upper, nu_hat
from .lifted import alpha_lower_lifted, lift_objective, xi_lift
from .types import LiftPoint, PerceptronParams

__all__ = ["ReferenceRow", "REFERENCE", "TABLE_KAPPA", "ComputedRow", "compute_row", "compute_table"]


@dataclass(frozen=True)
class ReferenceRow:
    table: int
    kappa: float
    f_wb: float
    xi_hat: float
    c3: float
    gamma: float
    nu: float
    alpha_low: float
    nu_c3to0: float
    alpha_u: float
    label: Optional[str] = None


TABLE_KAPPA = {1: 0.0, 2: 0.0, 3: 0.5, 4: 0.5, 5: 1.0, 6: 1.0}

# (f_wb, xi_hat, c3, gamma, nu, alpha_low, nu_c3to0, alpha_u)
_RAW = {
    1: [
        (0.05, 0.0, 0.0, 0.5, 2.7055, 3.5669, 2.7055, 3.5669),
        (0.08, 0.0, 0.0, 0.5, 1.9742, 4.7368, 1.9742, 4.7368),
        (0.10, 5.475e-07, 0.7907, 0.3400, 1.0056, 5.5910, 1.6423, 5.7113),
        (0.12, 3.389e-06, 1.1211, 0.2929, 0.7055, 6.6138, 1.3806, 6.8987),
    ],
    2: [
        (0.13, 7.155e-06, 1.2827, 0.2733, 0.5971, 7.1892, 1.2687, 7.5920),
        (0.15, 3.165e-06, 1.6059, 0.2398, 0.4338, 8.4974, 1.0741, 9.2296),
        (0.18, 3.785e-06, 2.1064, 0.1996, 0.2748, 10.9700, 0.8379, 12.5300),
        (0.20, 7.876e-07, 2.4613, 0.1775, 0.2043, 13.0802, 0.7083, 15.5332),
    ],
    3: [
        (0.15, 0.0, 0.0, 0.5, 2.3606, 2.6452, 2.3606, 2.6452),
        (0.20, 1.161e-06, 0.2694, 0.4372, 1.5159, 3.6298, 1.7999, 3.6393),
        (0.23, 1.325e-06, 0.6225, 0.3680, 1.0425, 4.3850, 1.5347, 4.4472),
        (0.25, 2.548e-06, 0.85038, 0.3307, 0.8225, 4.9772, 1.3794, 5.1086),
    ],
    4: [
        (0.28, 4.632e-06, 1.1921, 0.2841, 0.5830, 6.0383, 1.1725, 6.3476),
        (0.30, 2.195e-06, 1.4254, 0.2576, 0.4656, 6.8916, 1.0494, 7.3889),
        (0.33, 2.778e-06, 1.7919, 0.2234, 0.3329, 8.4625, 0.8834, 9.398),
        (0.35, 1.422e-06, 2.0525, 0.2033, 0.2659, 9.7620, 0.7838, 11.1434),
    ],
    5: [
        (0.20, 0.0, 0.0, 0.5, 3.3916, 1.3715, 3.3916, 1.3715),
        (0.25, 0.0, 0.0, 0.5, 2.8039, 1.7398, 2.8039, 1.7398),
        (0.30, 0.0, 0.0, 0.5, 2.3238, 2.2374, 2.3238, 2.2374),
        (0.35, 3.320e-06, 0.2127, 0.4496, 1.6771, 2.9259, 1.9191, 2.9313),
    ],
    6: [
        (0.40, 3.358e-06, 0.6596, 0.3616, 1.0496, 3.8664, 1.5709, 3.9355),
        (0.43, 1.476e-06, 0.9322, 0.3186, 0.7950, 4.6040, 1.3839, 4.7662),
        (0.47, 5.605e-06, 1.3155, 0.2696, 0.5470, 5.8853, 1.1562, 6.2858),
        (0.50, 2.594e-06, 1.6281, 0.2377, 0.4103, 7.1643, 1.0000, 7.8879),
    ],
}

# the source labels this column 0.01 although every other entry in it
# (alpha_u, nu_hat) corresponds to f_wb = 0.10
_LABELS = {(1, 0.10): "0.01"}


def _build():
    rows = {}
    for table, entries in _RAW.items():
        kappa = TABLE_KAPPA[table]
        rows[table] = tuple(
            ReferenceRow(table, kappa, *entry, label=_LABELS.get((table, entry[0]))) for entry in entries
        )
    return rows


REFERENCE = _build()


@dataclass(frozen=True)
class ComputedRow:
    reference: ReferenceRow
    xi_hat: float
    point: LiftPoint
    alpha_low: float
    nu_c3to0: float
    alpha_u: float
    xi_at_reference_alpha: float
    reference_objective: float
    converged: bool

    @property
    def kappa(self):
        return self.reference.kappa

    @property
    def f_wb(self):
        return self.reference.f_wb


def compute_row(ref):
    """Recompute both bounds for one reference row.

    ``xi_hat`` is the lifted residual at the computed bound (zero up to the
    optimizer tolerance), ``xi_at_reference_alpha`` the residual at the
    tabulated alpha_low, and ``reference_objective`` the lifted objective
    evaluated at the tabulated (c3, gamma, nu) and alpha_low.
    """
    params = PerceptronParams(ref.kappa, ref.f_wb)
    upper = alpha_upper(params)
    lower = alpha_lower_lifted(ref.kappa, ref.f_wb)
    at_reference = params.with_alpha(ref.alpha_low)
    xi_ref, _ = xi_lift(at_reference)
    if ref.c3 > 0.0:
        objective = lift_objective(LiftPoint(ref.c3, ref.gamma, ref.nu), at_reference)
    else:
        objective = float("nan")
    return ComputedRow(
        reference=ref,
        xi_hat=-lower.residual,
        point=lower.optimizer_point,
        alpha_low=lower.alpha_bound,
        nu_c3to0=nu_hat(params),
        alpha_u=upper.alpha_bound,
        xi_at_reference_alpha=xi_ref,
        reference_objective=objective,
        converged=lower.converged and upper.converged,
    )


def compute_table(table):
    return [compute_row(ref) for ref in REFERENCE[table]]
