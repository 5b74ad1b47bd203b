"""Multivariate normal approximation by exchangeable pairs.

Thin wrapper over the C++ core: Haar samplers and exact entry-moment
oracles, the four exchangeable-pair models with conditional-moment audits,
Wasserstein error bounds, a numerical Stein-equation solver, and empirical
W1 transport distances.
"""

import json as _json

from ._core import (  # noqa: F401
    RngStream,
    SteinSolution,
    PairModel,
    __version__,
    characterizing_check,
    gaussian_self_distance,
    gram_schmidt_hs,
    haar_battery_queries,
    hs_inner,
    hs_inner_complex,
    make_iid_sum_pair,
    make_orthogonal_projection_pair,
    make_spherical_pair,
    make_stein_solution,
    make_unitary_projection_pair,
    mc_moment_estimate,
    moment_oracle,
    op_norm,
    op_norm_complex,
    qr_decompose,
    random_orthonormal_family,
    sample_orthogonal,
    sample_unitary,
    stein_evaluate,
    stein_residual,
    w1_exact,
    w1_sliced_lb,
)
from . import _core as _c


def audit_pair(model, samples, epsilon, seed, threads=4):
    """Audit a pair model; returns the audit record as a dict."""
    return _json.loads(_c.audit_pair(model, samples, epsilon, seed, threads))


def run_experiment(config_text):
    """Run a preset experiment; returns (report dict, pass flag)."""
    report, ok = _c.run_experiment(config_text)
    return _json.loads(report), ok


def _wrap_bound(name):
    fn = getattr(_c, name)

    def wrapper(*args):
        return _json.loads(fn(*args))

    wrapper.__name__ = name
    wrapper.__doc__ = f"{name}; returns the bound report as a dict."
    return wrapper


bound_discrete = _wrap_bound("bound_discrete")
bound_cont = _wrap_bound("bound_cont")
bound_complex = _wrap_bound("bound_complex")
bound_basic = _wrap_bound("bound_basic")
bound_ksphere = _wrap_bound("bound_ksphere")
bound_mix = _wrap_bound("bound_mix")
bound_uthm = _wrap_bound("bound_uthm")
