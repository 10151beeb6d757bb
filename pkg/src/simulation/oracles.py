"""Exact hitting-time law of the symmetric ±1 walk absorbed at 0."""
import numpy as np

from src.models import WalkEncoding


def exact_walk_tail(start: int, horizon: int) -> np.ndarray:
    """
    Survival of the walk started at ``start``.

    :param start: initial position, positions <= 0 are already absorbed
    :param horizon: last time index
    :return: array ``s`` with ``s[t] = P(tau > t)`` for t = 0..horizon
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    survival = np.zeros(horizon + 1)
    if start <= 0:
        return survival
    # mass[j] is the probability of sitting at position j without having hit 0
    mass = np.zeros(start + horizon + 2)
    mass[start] = 1.0
    survival[0] = 1.0
    for t in range(1, horizon + 1):
        moved = np.zeros_like(mass)
        moved[:-1] += 0.5 * mass[1:]
        moved[1:] += 0.5 * mass[:-1]
        moved[0] = 0.0
        mass = moved
        survival[t] = mass.sum()
    return survival


def program_steps_for_walk(tau: int, encoding: WalkEncoding) -> int:
    """MDP steps of the walk programs for walk time ``tau``: loop 2*tau + 1, recursion 3*tau + 2."""
    encoding = WalkEncoding(encoding)
    return 2 * tau + 1 if encoding is WalkEncoding.LOOP else 3 * tau + 2


def walk_program_tail(start: int, k: int, encoding: WalkEncoding) -> float:
    """
    Exact P(T >= k) for the walk programs started at their entry with ``n = start``.

    :param start: initial value of n, at least 1
    :param k: step threshold
    :param encoding: loop or recursive program
    :return: probability
    """
    encoding = WalkEncoding(encoding)
    per_round, offset = (2, 1) if encoding is WalkEncoding.LOOP else (3, 2)
    # T >= k iff tau >= ceil((k - offset) / per_round)
    rounds = max(0, -(-(k - offset) // per_round))
    if rounds == 0:
        return 1.0
    return float(exact_walk_tail(start, rounds - 1)[rounds - 1])
