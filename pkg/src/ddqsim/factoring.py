"""Classical post-processing for order finding.

Measured counting-register values approximate s/r scaled by 2^m; the
continued-fraction expansion recovers candidate periods, each verified
classically before the gcd step.  RETRY is an ordinary value: it means
"measure again", not an error.
"""

from __future__ import annotations

import math

RETRY = "RETRY"


def convergent_denominators(y: int, m_bits: int, limit: int) -> list[int]:
    """Denominators of the continued-fraction convergents of y / 2^m.

    Only denominators <= limit are returned, in expansion order.
    """
    if y == 0:
        return [1]
    denominators: list[int] = []
    a_num, a_den = y, 1 << m_bits
    k_mm, k_m = 1, 0  # k_{-2}, k_{-1}
    while a_den != 0:
        a = a_num // a_den
        a_num, a_den = a_den, a_num - a * a_den
        k_mm, k_m = k_m, a * k_m + k_mm
        if k_m > limit:
            break
        denominators.append(k_m)
    return denominators


def candidate_periods(y: int, m_bits: int, number: int) -> list[int]:
    """Deduplicated convergent denominators for one measurement."""
    seen: list[int] = []
    for r in convergent_denominators(y, m_bits, number):
        if r not in seen:
            seen.append(r)
    return seen


def factors_from_period(number: int, base: int, period: int):
    """gcd step: returns a sorted nontrivial factor pair or None."""
    if period % 2 != 0:
        return None
    half = pow(base, period // 2, number)
    if half == number - 1:
        return None
    f1 = math.gcd(half - 1, number)
    f2 = math.gcd(half + 1, number)
    for f in (f1, f2):
        if 1 < f < number:
            return tuple(sorted((f, number // f)))
    return None


def shor_postprocess(histogram: dict[str, int], number: int, base: int):
    """Extract factors from a sampled histogram, or RETRY.

    Histogram keys are full logical bitstrings (most significant qubit
    first); the counting value is the top 2n bits, matching the generated
    circuit's register layout.  Measured values are tried in descending
    frequency; the first verified period that yields a nontrivial split
    wins.
    """
    m_bits = 2 * number.bit_length()
    by_value: dict[int, int] = {}
    for bits, count in histogram.items():
        y = int(bits[:m_bits], 2)
        by_value[y] = by_value.get(y, 0) + count
    for y, _count in sorted(by_value.items(), key=lambda kv: (-kv[1], kv[0])):
        for period in candidate_periods(y, m_bits, number):
            got = factors_from_period(number, base, period)
            if got is not None:
                return got
    return RETRY
