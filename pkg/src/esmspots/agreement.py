"""Chance-corrected multi-rater agreement for category assignments.

Operates on a count table with one row per rated item and one column per
category; cell (i, c) is how many raters put item i into category c. Every
row must sum to the same number of raters.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateMarginals, InputMismatch


def fleiss_kappa(table: np.ndarray) -> tuple[float, np.ndarray]:
    """Fleiss' kappa and its per-category decomposition.

    The overall statistic is (P_obs - P_exp) / (1 - P_exp), where P_obs is
    the mean per-item pairwise agreement and P_exp the agreement expected
    from the marginal category proportions. Per-category values follow the
    standard category-wise form

        kappa_c = 1 - sum_i n_ic (n - n_ic) / (N n (n-1) p_c (1 - p_c)),

    which combines back to the overall kappa when weighted by p_c (1 - p_c).
    Categories never used by any rater get NaN.
    """
    counts = np.asarray(table, dtype=float)
    if counts.ndim != 2:
        raise InputMismatch("rating table must be 2-dimensional")
    n_items, n_categories = counts.shape
    if n_items < 2:
        raise InputMismatch("need at least 2 rated items")
    if np.any(counts < 0) or not np.all(np.isfinite(counts)):
        raise InputMismatch("cell counts must be finite and non-negative")

    row_sums = counts.sum(axis=1)
    n_raters = row_sums[0]
    if not np.all(row_sums == n_raters):
        raise InputMismatch("every item must be rated by the same number of raters")
    if n_raters < 2:
        raise InputMismatch("need at least 2 raters")

    total = counts.sum()
    p_cat = counts.sum(axis=0) / total
    p_exp = float(np.sum(p_cat**2))
    if p_exp >= 1.0:
        raise DegenerateMarginals("all ratings fall into a single category")

    per_item = ((counts**2).sum(axis=1) - n_raters) / (n_raters * (n_raters - 1.0))
    p_obs = float(per_item.mean())
    kappa = (p_obs - p_exp) / (1.0 - p_exp)

    disagree = (counts * (n_raters - counts)).sum(axis=0)
    pq = p_cat * (1.0 - p_cat)
    denom = n_items * n_raters * (n_raters - 1.0) * pq
    with np.errstate(invalid="ignore", divide="ignore"):
        per_category = np.where(pq > 0, 1.0 - disagree / denom, np.nan)

    return kappa, per_category
