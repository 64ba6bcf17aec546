"""
Operator calculus f(dD) on d-series

The kernels all have rational Taylor coefficients, so every operator acts
exactly on series with rational polynomial coefficients.
"""
import math
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from algebra.tau_basis import apply_D
from cache.lru_cache import LRUCache
from models.polynomial import ZERO, Polynomial, combine_parity
from models.series import DSeries, OperatorKernel

_HALF = Fraction(1, 2)


def _exp_coeff(i: int) -> Fraction:
    return Fraction(1, math.factorial(i))


def _exp_neg_coeff(i: int) -> Fraction:
    return Fraction((-1) ** i, math.factorial(i))


def _cosh_half_coeff(i: int) -> Fraction:
    return _HALF ** i / math.factorial(i) if i % 2 == 0 else Fraction(0)


def _sinh_half_coeff(i: int) -> Fraction:
    return _HALF ** i / math.factorial(i) if i % 2 == 1 else Fraction(0)


def _cosh_coeff(i: int) -> Fraction:
    return _exp_coeff(i) if i % 2 == 0 else Fraction(0)


def _sinh_coeff(i: int) -> Fraction:
    return _exp_coeff(i) if i % 2 == 1 else Fraction(0)


def _sinh_half_over_z_coeff(i: int) -> Fraction:
    # sinh(z/2)/z = Σ_{k even} (1/2)^(k+1) z^k / (k+1)!
    return _HALF ** (i + 1) / math.factorial(i + 1) if i % 2 == 0 else Fraction(0)


def _half_step_remainder_coeff(i: int) -> Fraction:
    # (z - 2 sinh(z/2)) / z^2 = -Σ_{k odd >= 3} z^(k-2) / (2^(k-1) k!)
    if i % 2 == 0:
        return Fraction(0)
    k = i + 2
    return -Fraction(1, 2 ** (k - 1) * math.factorial(k))


def _z_coeff(i: int) -> Fraction:
    return Fraction(1) if i == 1 else Fraction(0)


KERNEL_GENERATORS: Dict[str, Callable[[int], Fraction]] = {
    "exp": _exp_coeff,
    "exp_neg": _exp_neg_coeff,
    "cosh_half": _cosh_half_coeff,
    "sinh_half": _sinh_half_coeff,
    "cosh": _cosh_coeff,
    "sinh": _sinh_coeff,
    "sinh_half_over_z": _sinh_half_over_z_coeff,
    "half_step_remainder": _half_step_remainder_coeff,
    "z": _z_coeff,
}

_kernel_cache = LRUCache(max_size=256, name="kernels")
_d_chain_cache = LRUCache(max_size=8192, name="d_chains")


def kernel(name: str, order: int) -> OperatorKernel:
    """Taylor table of a named kernel through z^order"""
    if name not in KERNEL_GENERATORS:
        raise KeyError(f"unknown operator kernel '{name}'")
    generator = KERNEL_GENERATORS[name]
    return _kernel_cache.get_or_compute(
        (name, order),
        lambda: OperatorKernel(name, tuple(generator(i) for i in range(order + 1))),
    )


def d_chain(p: Polynomial, length: int) -> Tuple[Polynomial, ...]:
    """p, Dp, D^2 p, ... D^length p"""
    cached = _d_chain_cache.get(p)
    if cached is not None and len(cached) > length:
        return cached[: length + 1]
    chain: List[Polynomial] = list(cached) if cached else [p]
    while len(chain) <= length:
        chain.append(apply_D(chain[-1]) if not chain[-1].is_zero() else ZERO)
    chain_tuple = tuple(chain)
    _d_chain_cache.put(p, chain_tuple)
    return chain_tuple


def apply_f_of_dD(k: OperatorKernel, Q: DSeries) -> DSeries:
    """
    Apply f(dD) to Q; coefficient n is Σ_{i=0}^{n} f_i D^i Q_{n-i}.

    Args:
        k: kernel with Taylor table at least as long as Q's order
        Q: series with polynomial coefficients

    Returns:
        f(dD)Q truncated at Q's order
    """
    order = Q.order
    if k.order < order:
        k = kernel(k.name, order) if k.name in KERNEL_GENERATORS else k
    nonzero_taylor = [(i, k.coefficient(i)) for i in range(order + 1) if k.coefficient(i) != 0]
    out = [ZERO] * (order + 1)
    for m, q in Q.nonzero_terms():
        reach = order - m
        if reach < 0:
            break
        chain = d_chain(q, max((i for i, _ in nonzero_taylor if i <= reach), default=0))
        for i, f in nonzero_taylor:
            if i > reach:
                break
            if not chain[i].is_zero():
                out[m + i] = out[m + i] + chain[i].scale(f)

    kernel_parity = k.parity()
    return DSeries(
        tuple(out),
        d_parity=combine_parity(Q.d_parity, kernel_parity),
        u_parity=combine_parity(Q.u_parity, kernel_parity),
        bounded_degree=Q.bounded_degree,
    )


def _named(name: str) -> Callable[[DSeries], DSeries]:
    def operator(Q: DSeries) -> DSeries:
        return apply_f_of_dD(kernel(name, Q.order), Q)
    operator.__name__ = f"op_{name}"
    return operator


# Half-step and full-step hyperbolic operators
op_C = _named("cosh_half")
op_S = _named("sinh_half")
op_C1 = _named("cosh")
op_S1 = _named("sinh")
op_J = _named("sinh_half_over_z")
op_exp = _named("exp")
op_exp_neg = _named("exp_neg")


def op_dD(Q: DSeries) -> DSeries:
    return apply_f_of_dD(kernel("z", Q.order), Q)


def op_half_step_remainder(Q: DSeries) -> DSeries:
    return apply_f_of_dD(kernel("half_step_remainder", Q.order), Q)


def cache_stats() -> List[dict]:
    return [_kernel_cache.get_stats(), _d_chain_cache.get_stats()]

