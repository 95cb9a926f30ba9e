# Copyright (c) 2026 memexplorer contributors
# SPDX-License-Identifier: Apache-2.0
"""Python interface to the memexplorer co-design models.

Dict-in / dict-out wrappers around the compiled core. See the README for the
design and workload schemas (they match the CLI file formats).
"""

import json as _json

try:
    from ._core import (  # type: ignore
        InfeasibleError,
        ParseError,
        ValidationError,
        __version__,
        default_catalog_json,
        ehvi,
        eval_stage_json,
        footprints_json,
        hypervolume,
        max_stacks,
        run_dse_json,
        transfer_time_json,
        validate_oracle_json,
    )
except ImportError:  # in-tree test layout: module next to the package
    from _core import (  # type: ignore
        InfeasibleError,
        ParseError,
        ValidationError,
        __version__,
        default_catalog_json,
        ehvi,
        eval_stage_json,
        footprints_json,
        hypervolume,
        max_stacks,
        run_dse_json,
        transfer_time_json,
        validate_oracle_json,
    )

__all__ = [
    "InfeasibleError",
    "ParseError",
    "ValidationError",
    "__version__",
    "default_catalog",
    "ehvi",
    "eval_stage",
    "footprints",
    "hypervolume",
    "max_stacks",
    "run_dse",
    "transfer_time",
    "validate_oracle",
]


def default_catalog():
    """Bundled memory technology registry as a list of dicts."""
    return _json.loads(default_catalog_json())


def footprints(workload, batch=1):
    """Weight/KV/activation byte footprints for a workload dict."""
    return _json.loads(footprints_json(_json.dumps(workload), batch))


def eval_stage(design, workload, stage="prefill", catalog=None):
    """Evaluate a design dict on a workload dict; returns the result dict."""
    cat = "" if catalog is None else _json.dumps(catalog)
    return _json.loads(
        eval_stage_json(_json.dumps(design), _json.dumps(workload), stage, cat)
    )


def transfer_time(tiers, bytes_, placement):
    """Analytic and simulated transfer time for ``tiers`` (list of dicts
    with ``tech``/``units``) moving ``bytes_`` placed by ``placement``."""
    return _json.loads(transfer_time_json(_json.dumps(tiers), bytes_, placement))


def validate_oracle(cases=50, seed=7, tolerance=0.02, chunk_bytes=1 << 20):
    """Analytic-vs-simulator agreement report over random hierarchies."""
    return _json.loads(validate_oracle_json(cases, seed, tolerance, chunk_bytes))


def run_dse(workload, stage="prefill", method="ehvi", budget=40, n_init=10,
            seed=0, tdp=700.0, pool_size=256):
    """Small-scale design space exploration; returns history and front."""
    return _json.loads(
        run_dse_json(_json.dumps(workload), stage, method, budget, n_init,
                     seed, tdp, pool_size)
    )
