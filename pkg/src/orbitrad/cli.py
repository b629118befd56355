"""Thin command-line client for the orbitrad service.

Every command is an HTTP call: against `--server URL` when given,
otherwise against an in-process instance of the app.  All file handling
stays client-side; the service itself is stateless.

Exit codes: 0 success / all suite trials passed, 1 suite failure,
2 input error (malformed JSON, dimension mismatch, singular input, ...).
"""

import argparse
import json
import sys
from pathlib import Path

from . import matio

_EXIT_OK = 0
_EXIT_SUITE_FAIL = 1
_EXIT_INPUT = 2


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class _ClientError(Exception):
    pass


def _make_client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise _ClientError(f"{path} failed ({resp.status_code}): {detail}")
    return resp.json()


def _load_matrix(path: str) -> dict:
    m = matio.read_matrix(path)
    return matio.matrix_to_dict(m)


def _parse_dims(text: str) -> list:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        dims = list(range(int(lo), int(hi) + 1))
    elif "," in text:
        dims = [int(p) for p in text.split(",") if p.strip()]
    else:
        dims = [int(text)]
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"invalid dimension list: {text!r}")
    return dims


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_radius(client, args) -> int:
    payload = {
        "c": _load_matrix(args.c_file),
        "a": _load_matrix(args.a_file),
        "starts": args.starts,
        "max_iters": args.max_iters,
        "seed": args.seed,
        "oracle": args.oracle,
    }
    out = _post(client, "/radius", payload)
    print(_fmt(out["value"]))
    if args.oracle != "none":
        print(f"oracle {args.oracle} {_fmt(out['oracle_value'])}")
    return _EXIT_OK


def _cmd_spectrum(client, args) -> int:
    out = _post(client, "/spectrum", {"t": _load_matrix(args.t_file)})
    for re, im in zip(out["eigenvalues_re"], out["eigenvalues_im"]):
        print(f"{_fmt(re)} {_fmt(im)}")
    return _EXIT_OK


def _cmd_aluthge(client, args) -> int:
    payload = {
        "t": _load_matrix(args.t_file),
        "lam": args.lam,
        "iterate": args.iterate,
    }
    out = _post(client, "/aluthge", payload)
    print(matio.dumps_matrix(matio.matrix_from_dict(out["transformed"])))
    print(f"similarity_defect {_fmt(out['similarity_defect'])}", file=sys.stderr)
    if out.get("iteration"):
        it = out["iteration"]
        print("iteration,normality_defect,spectrum_drift")
        for j, (nd, sd) in enumerate(zip(it["normality_defects"], it["spectrum_drifts"])):
            print(f"{j},{_fmt(nd)},{_fmt(sd)}")
        if it.get("truncated_at") is not None:
            print(f"truncated_at {it['truncated_at']}", file=sys.stderr)
        if args.out:
            seq = [matio.matrix_to_dict(matio.matrix_from_dict(m)) for m in it["sequence"]]
            Path(args.out).write_text(json.dumps(seq) + "\n", encoding="utf-8")
    return _EXIT_OK


def _cmd_membership(client, args) -> int:
    payload = {
        "a": _load_matrix(args.a_file),
        "b": _load_matrix(args.b_file),
        "max_fw_iters": args.budget,
        "member_tol": args.tol,
        "seed": args.seed,
    }
    out = _post(client, "/membership", payload)
    print(
        f"{out['verdict']} distance={_fmt(out['final_distance'])} "
        f"margin={_fmt(out['separation_margin'])} iterations={out['iterations']}"
    )
    text = json.dumps(out)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return _EXIT_OK


def _cmd_witness(client, args) -> int:
    payload = {
        "a": _load_matrix(args.a_file),
        "b": _load_matrix(args.b_file),
        "seed": args.seed,
    }
    out = _post(client, "/witness", payload)
    print(_fmt(out["commutator_norm"]))
    print(matio.dumps_matrix(matio.matrix_from_dict(out["u"])))
    return _EXIT_OK


def _cmd_verify(client, args) -> int:
    payload = {
        "suite": args.suite,
        "trials": args.trials,
        "dims": _parse_dims(args.n),
        "seed": args.seed,
    }
    out = _post(client, "/verify", payload)
    for rep in out["reports"]:
        print(f"{rep['suite']}: {rep['passes']}/{len(rep['trials'])} passed")
    if args.out:
        out_path = Path(args.out)
        out_path.write_text(
            json.dumps({"reports": out["reports"]}, indent=2) + "\n", encoding="utf-8"
        )
        csv_path = out_path.with_suffix(".csv")
        csv_path.write_text(out["csv"], encoding="utf-8")
        print(f"report written to {out_path}, summary to {csv_path}")
    else:
        sys.stdout.write(out["csv"])
    return _EXIT_OK if out["passed"] else _EXIT_SUITE_FAIL


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return _EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitrad",
        description="Orbit radii, orbit-hull membership, Aluthge transforms.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running orbitrad service (default: in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radius", help="best found |tau(C U A U*)| over unitaries")
    p.add_argument("c_file")
    p.add_argument("a_file")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--oracle", choices=["grid", "hermitian", "none"], default="none")

    p = sub.add_parser("spectrum", help="eigenvalue multiset")
    p.add_argument("t_file")

    p = sub.add_parser("aluthge", help="weighted Aluthge transform")
    p.add_argument("t_file")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--iterate", type=int, default=0)
    p.add_argument("--out", default=None, help="write the iterate sequence as JSON")

    p = sub.add_parser("membership", help="orbit-hull membership of A vs B")
    p.add_argument("a_file")
    p.add_argument("b_file")
    p.add_argument("--budget", type=int, default=300, help="max projection iterations")
    p.add_argument("--tol", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="write the full outcome as JSON")

    p = sub.add_parser("witness", help="search U making [U A U*, B] large")
    p.add_argument("a_file")
    p.add_argument("b_file")
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["t51", "p52", "p53", "c41", "all"])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n", default="2..3", help="dimensions, e.g. 2..4 or 2,4 or 3")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="report JSON path (CSV lands next to it)")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


_COMMANDS = {
    "radius": _cmd_radius,
    "spectrum": _cmd_spectrum,
    "aluthge": _cmd_aluthge,
    "membership": _cmd_membership,
    "witness": _cmd_witness,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    try:
        client = _make_client(args.server)
    except Exception as exc:  # pragma: no cover - connection setup
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT
    try:
        with client:
            return _COMMANDS[args.command](client, args)
    except (_ClientError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
