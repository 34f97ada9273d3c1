"""Shared test helpers."""


def cofactor_det(rows):
    """Exact integer determinant by cofactor expansion.

    Deliberately naive and independent of the package's own elimination
    routines; used as ground truth for small integer matrices.
    """
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, v in enumerate(rows[0]):
        if v == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        total += (-1) ** j * v * cofactor_det(minor)
    return total
