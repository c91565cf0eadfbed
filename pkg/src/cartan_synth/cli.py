"""Batch command-line front end.

Reads a unitary from a JSON file, runs a scheme decomposition, writes the
factorization (and, with --verify, a verification report computed from the
serialized file, not from memory).

Exit codes: 0 verified success, 2 verification failure (report still
written), 1 input or solver error.
"""

import argparse
import json
import sys

import numpy as np

from .config import env_default_tol
from .errors import CartanSynthError
from .matcore import mabs, unitarity_defect
from .schemes import get_scheme
from .synth import (decompose, factorization_from_dict, factorization_to_dict)

__all__ = ["JobConfig", "run", "main", "read_matrix", "write_matrix"]


class JobConfig:
    """Parsed CLI options for one decomposition job."""

    def __init__(self, args):
        self.scheme_name = args.scheme
        self.qubits = args.qubits
        self.dims = tuple(args.dims) if args.dims else None
        self.pq_schedule = _parse_schedule(args.pq_schedule)
        self.input_path = args.input
        self.output_path = args.output
        self.tol = args.tol if args.tol is not None else env_default_tol()
        self.prune_tol = args.prune_tol
        self.verify = args.verify
        self.emit_matrices = args.emit_matrices


def _parse_schedule(raw):
    if not raw:
        return None
    rounds = []
    for part in raw.split(";"):
        vals = [int(v) for v in part.split(",")]
        if len(vals) != 4:
            raise ValueError(
                "each schedule round needs 4 integers p1,q1,p2,q2")
        rounds.append(((vals[0], vals[1]), (vals[2], vals[3])))
    return rounds


def read_matrix(path):
    with open(path) as fh:
        data = json.load(fh)
    n = data["n"]
    rows = data["matrix"]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"matrix shape does not match n={n}")
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def write_matrix(path, m):
    m = np.asarray(m, dtype=complex)
    data = {"n": m.shape[0],
            "matrix": [[[float(f"{v.real:.17g}"), float(f"{v.imag:.17g}")]
                        for v in row] for row in m]}
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True)
        fh.write("\n")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="cartan-synth",
        description="Factor a unitary into exponentials of tensor-product "
                    "generators via a recursive KAK scheme.")
    ap.add_argument("--scheme", required=True,
                    choices=["ccd-new", "kg", "bipartite"])
    ap.add_argument("--qubits", type=int, help="qubit count for ccd-new/kg")
    ap.add_argument("--dims", type=int, nargs=2, metavar=("N1", "N2"),
                    help="subsystem dimensions for bipartite")
    ap.add_argument("--pq-schedule", default=None,
                    help="bipartite rounds 'p1,q1,p2,q2[;...]'")
    ap.add_argument("--input", required=True, help="input unitary (JSON)")
    ap.add_argument("--output", default=None, help="output path (JSON)")
    ap.add_argument("--tol", type=float, default=None,
                    help="tolerance (default: $CARTAN_SYNTH_TOL or 1e-9)")
    ap.add_argument("--prune-tol", type=float, default=1e-10,
                    help="drop leaves this close to the identity")
    ap.add_argument("--verify", action="store_true",
                    help="re-multiply from the serialized file and compare")
    ap.add_argument("--emit-matrices", action="store_true",
                    help="include dense leaf matrices in the output")
    return ap


def _dump(payload, path):
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def run(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = JobConfig(args)
        x = read_matrix(cfg.input_path)
        scheme = get_scheme(cfg.scheme_name, qubits=cfg.qubits,
                            dims=cfg.dims, pq_schedule=cfg.pq_schedule)
        if scheme.n != x.shape[0]:
            raise ValueError(
                f"scheme dimension {scheme.n} != input dimension {x.shape[0]}")
        defect = unitarity_defect(x)
        if defect > max(cfg.tol, 1e-8):
            raise ValueError(f"input is not unitary (defect {defect:.3e})")
        fact = decompose(x, scheme, tol=cfg.tol, prune_tol=cfg.prune_tol)
        payload = factorization_to_dict(fact, emit_matrices=cfg.emit_matrices)
    except (CartanSynthError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_path = cfg.output_path or (cfg.input_path + ".factorization.json")
    _dump(payload, out_path)
    if not cfg.verify:
        print(f"wrote {len(fact.leaves)} leaves ({fact.pruned} pruned) "
              f"to {out_path}")
        return 0

    # verification re-multiplies from the serialized file
    with open(out_path) as fh:
        reread = factorization_from_dict(json.load(fh))
    err = mabs(reread.product() - x)
    check_tol = max(cfg.tol, 1e-8) * 10
    payload["verification"] = {
        "reconstruction_error": float(f"{err:.17g}"),
        "tolerance": check_tol,
        "passed": bool(err <= check_tol),
    }
    _dump(payload, out_path)
    status = "ok" if err <= check_tol else "FAILED"
    print(f"wrote {len(fact.leaves)} leaves ({fact.pruned} pruned) to "
          f"{out_path}; verification {status} (error {err:.3e})")
    return 0 if err <= check_tol else 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
