"""Command line front end: ``ciext run experiment.txt`` or ``ciext depth-grid experiment.txt``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import degreewise
from .asymptotics import (GridResult, RecurrenceSpec, bass_grid, check_recurrence, depth_grid,
                          detect_stabilization, ext_length_series, fit_bivariate_polynomial,
                          format_value, grade_grid, grid_with_retry, length_grid, report_json,
                          series_recurrence_onset)
from .errors import CiExtError, NoFit, TailOutsideGrid, WindowTooSmall
from .groebner import buchberger
from .modules import INFINITE
from .polyring import format_poly
from .resolution import eisenbud_operators, ext, extend_resolution, t_action
from .specfile import (SUBCOMMANDS, Command, ExperimentSpec, SpecError, family_kind, parse_list,
                       parse_poly_value, parse_spec)

OK, FAILED, NOT_STABLE = 0, 1, 2


class Runner:
    def __init__(self, spec: ExperimentSpec, outdir: Path, threads: int = 1,
                 probe_degree: int = 8, seed: int = 0, out=None):
        self.spec = spec
        self.ring = spec.ring
        self.outdir = outdir
        self.threads = threads
        self.probe_degree = probe_degree
        self.seed = seed
        self.out = out

    # -- helpers --------------------------------------------------------------------

    def say(self, text: str) -> None:
        print(text, file=self.out or sys.stdout)

    def write(self, cmd: Command, key: str, text: str) -> None:
        name = cmd.str(key)
        if name is None:
            return
        path = Path(name)
        if not path.is_absolute():
            path = self.outdir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)

    def module(self, cmd: Command, key: str):
        return self.spec.modules[cmd.str(key)]

    def ideal(self, cmd: Command, key: str):
        return self.spec.ideals[cmd.str(key)]

    def header(self, cmd: Command) -> dict:
        return {"command": cmd.name, "line": cmd.line,
                "args": {k: v.text for k, v in sorted(cmd.args.items()) if k not in ("out", "report")}}

    def _grid(self, cmd: Command, n_range, i_range) -> GridResult:
        M, N, I = self.module(cmd, "M"), self.module(cmd, "N"), self.ideal(cmd, "I")
        t = cmd.int("t")
        if "j" in cmd.args:
            return bass_grid(M, N, I, t, cmd.int("j"), n_range, i_range, threads=self.threads)
        return length_grid(M, N, I, t, n_range, i_range, threads=self.threads)

    # -- subcommands ----------------------------------------------------------------

    def run(self, cmd: Command) -> int:
        return getattr(self, "cmd_" + cmd.name.replace("-", "_"))(cmd)

    def _stability_command(self, cmd: Command, compute) -> int:
        margin = cmd.int("margin", 3)
        n_range, i_range = cmd.range("n"), cmd.range("i")
        G, rep = grid_with_retry(compute, n_range, i_range, margin)
        retried = (G.n_range, G.i_range) != (n_range, i_range)
        self.write(cmd, "out", G.to_csv())
        payload = self.header(cmd)
        payload.update({"quantity": G.quantity, "t": G.t, "kind": G.kind,
                        "n_range": list(G.n_range), "i_range": list(G.i_range),
                        "margin_requested": margin, "retried_with_doubled_ranges": retried,
                        "stability": rep.to_json()})
        self.write(cmd, "report", report_json(payload))
        if rep.stable:
            self.say(f"{cmd.name} (line {cmd.line}): stable value {format_value(rep.stable_value)} "
                     f"from onset {rep.onset}, margin {rep.margin}")
            return OK
        self.say(f"{cmd.name} (line {cmd.line}): not stable within n={G.n_range}, i={G.i_range}")
        return NOT_STABLE

    def cmd_depth_grid(self, cmd: Command) -> int:
        M, N, I = self.module(cmd, "M"), self.module(cmd, "N"), self.ideal(cmd, "I")
        t = cmd.int("t")
        return self._stability_command(
            cmd, lambda nr, ir: depth_grid(M, N, I, t, nr, ir, threads=self.threads))

    def cmd_grade_grid(self, cmd: Command) -> int:
        M, N, I, J = self.module(cmd, "M"), self.module(cmd, "N"), self.ideal(cmd, "I"), self.ideal(cmd, "J")
        t = cmd.int("t")
        kind = family_kind(cmd)
        return self._stability_command(
            cmd, lambda nr, ir: grade_grid(M, N, I, J, t, nr, ir, kind=kind, threads=self.threads))

    def _recurrence(self, cmd: Command, G: GridResult) -> dict:
        spec = RecurrenceSpec(self.ring.c, self.ideal(cmd, "I").r)
        tail = cmd.pair("tail", (G.n_range[0], G.i_range[0]))
        try:
            res = check_recurrence(G, spec, tail).to_json()
        except TailOutsideGrid as e:
            res = {"holds": False, "error": str(e)}
        res.update({"c": spec.c, "r": spec.r, "tail_onset": list(tail)})
        return res

    def _fit(self, cmd: Command, G: GridResult) -> dict:
        fn = cmd.range("fit_n", G.n_range)
        fi = cmd.range("fit_i", G.i_range)
        validation = [c for c in G.cells() if c[0] >= fn[0] and c[1] >= fi[0]
                      and not (c[0] <= fn[1] and c[1] <= fi[1])]
        try:
            return {"ok": True, **fit_bivariate_polynomial(G, (fn, fi), validation).to_json()}
        except NoFit as e:
            return {"ok": False, "reason": str(e), "max_order": e.max_order}

    def cmd_bass_grid(self, cmd: Command) -> int:
        G = self._grid(cmd, cmd.range("n"), cmd.range("i"))
        self.write(cmd, "out", G.to_csv())
        payload = self.header(cmd)
        payload.update({"quantity": G.quantity, "t": G.t, "n_range": list(G.n_range),
                        "i_range": list(G.i_range), "recurrence": self._recurrence(cmd, G)})
        try:
            payload["stability"] = detect_stabilization(G, cmd.int("margin", 3)).to_json()
        except WindowTooSmall as e:
            payload["stability"] = {"stable": False, "error": str(e)}
        ok = payload["recurrence"]["holds"]
        if "fit_n" in cmd.args or "fit_i" in cmd.args:
            payload["fit"] = self._fit(cmd, G)
            ok = ok and payload["fit"]["ok"]
        self.write(cmd, "report", report_json(payload))
        self.say(f"{cmd.name} (line {cmd.line}): recurrence {'holds' if payload['recurrence']['holds'] else 'fails'}"
                 + (f", fit {'found' if payload['fit']['ok'] else 'not found'}" if "fit" in payload else ""))
        return OK if ok else NOT_STABLE

    def cmd_series_check(self, cmd: Command) -> int:
        payload = self.header(cmd)
        if "upto" in cmd.args:
            M = self.module(cmd, "M")
            seq = ext_length_series(M, cmd.int("upto"))
            onset = series_recurrence_onset(seq, self.ring.c)
            limit = cmd.int("onset_max", 6)
            ok = onset is not None and onset <= limit
            payload.update({"lengths": [format_value(x) for x in seq], "c": self.ring.c,
                            "onset": onset, "onset_max": limit, "holds": ok})
            self.write(cmd, "out", "i,value\n" + "".join(f"{i},{format_value(x)}\n" for i, x in enumerate(seq)))
            self.say(f"series-check (line {cmd.line}): lengths {seq}, onset {onset}")
        else:
            G = self._grid(cmd, cmd.range("n"), cmd.range("i"))
            self.write(cmd, "out", G.to_csv())
            payload["recurrence"] = self._recurrence(cmd, G)
            ok = payload["recurrence"]["holds"]
            self.say(f"series-check (line {cmd.line}): recurrence {'holds' if ok else 'fails'}")
        self.write(cmd, "report", report_json(payload))
        return OK if ok else NOT_STABLE

    def cmd_fit(self, cmd: Command) -> int:
        G = self._grid(cmd, cmd.range("n"), cmd.range("i"))
        self.write(cmd, "out", G.to_csv())
        payload = self.header(cmd)
        payload["fit"] = self._fit(cmd, G)
        self.write(cmd, "report", report_json(payload))
        fit = payload["fit"]
        if fit["ok"]:
            terms = " + ".join(f"{c['value']}*n^{c['n_power']}*i^{c['i_power']}" for c in fit["coefficients"]) or "0"
            self.say(f"fit (line {cmd.line}): {terms}")
            return OK
        self.say(f"fit (line {cmd.line}): no fit ({fit['reason']})")
        return NOT_STABLE

    def _format_module(self, P) -> list[str]:
        Q = self.ring.Q
        lines = [f"generators in degrees {list(P.degrees)}"]
        for r in P.relations:
            entries = []
            for k in range(P.rank):
                e = {t & Q.mono_mask: c for t, c in r.items() if t >> Q.mono_bits == k}
                entries.append(format_poly(Q, e))
            lines.append("relation [" + ", ".join(entries) + "]")
        return lines

    def cmd_ext(self, cmd: Command) -> int:
        M, D = self.module(cmd, "M"), self.module(cmd, "D")
        i = cmd.int("i")
        E = ext(M, D, i).value
        length = E.length()
        if length == INFINITE:
            lo = min(E.degrees)
            hf = dict(zip(range(lo, lo + self.probe_degree + 1),
                          E.hilbert_function(lo + self.probe_degree, lo)))
        else:
            hf = E.hilbert_dict()
        payload = self.header(cmd)
        payload.update({"generator_degrees": list(E.degrees), "relations": self._format_module(E)[1:],
                        "length": format_value(length),
                        "hilbert_function": {str(d): h for d, h in sorted(hf.items())}})
        self.write(cmd, "report", report_json(payload))
        self.say(f"Ext^{i}({cmd.str('M')}, {cmd.str('D')}): length {format_value(length)}")
        for line in self._format_module(E):
            self.say("  " + line)
        self.say("  hilbert function " + ", ".join(f"{d}:{h}" for d, h in sorted(hf.items())))
        return OK

    def cmd_resolve(self, cmd: Command) -> int:
        M = self.module(cmd, "M")
        upto = cmd.int("upto", 4)
        R = extend_resolution(M, upto)
        ranks = [R.betti(i) for i in range(upto + 1)]
        checks = {"d_squared_zero": R.is_complex(upto), "minimal": not R.has_unit_entries(upto)}
        exact = True
        for i in range(1, upto):
            for d in range(min(R.degrees(i + 1), default=0), min(R.degrees(i + 1), default=0) + self.probe_degree + 1):
                if degreewise.homology_dim(R.differential(i), R.differential(i + 1), d):
                    exact = False
        checks["exact_through_probe_degree"] = exact
        if self.ring.c and upto >= 2 and any(ranks[2:]):
            E = eisenbud_operators(R)
            Ep = eisenbud_operators(R, perturb_seed=self.seed)
            checks["eisenbud_identity"] = all(E.check_identity(i) for i in range(upto - 1))
            k = self.spec.modules["k"]
            checks["t_action_independent_of_lift"] = all(
                t_action(E, k, j, i).equals(t_action(Ep, k, j, i))
                for j in range(1, self.ring.c + 1) for i in range(upto - 1))
        payload = self.header(cmd)
        payload.update({"ranks": ranks, "degrees": [list(R.degrees(i)) for i in range(upto + 1)],
                        "checks": checks})
        self.write(cmd, "report", report_json(payload))
        self.say(f"ranks {','.join(map(str, ranks))}")
        self.say("checks " + ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in checks.items()))
        return OK if all(checks.values()) else FAILED

    def cmd_gb(self, cmd: Command) -> int:
        Q = self.ring.Q
        gens = [parse_poly_value(self.ring, v, cmd.line) for v in parse_list(cmd.args["gens"], cmd.line)]
        gb = buchberger(gens, Q)
        polys = [format_poly(Q, v) for v in gb.generators]
        self.write(cmd, "report", report_json({**self.header(cmd), "basis": polys}))
        self.say("{" + ", ".join(polys) + "}")
        return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ciext", description="Ext asymptotics over graded complete intersections")
    ap.add_argument("command", choices=("run",) + SUBCOMMANDS,
                    help="'run' executes every cmd block; a subcommand runs only matching blocks")
    ap.add_argument("spec", help="experiment file")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for grid cells")
    ap.add_argument("--probe-degree", type=int, default=8, help="degree bound for degreewise checks")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized lift perturbations")
    ap.add_argument("--outdir", default=".", help="directory for relative output paths")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return FAILED
    try:
        text = Path(args.spec).read_text()
    except OSError as e:
        print(f"error: cannot read {args.spec}: {e.strerror}", file=sys.stderr)
        return FAILED
    try:
        spec = parse_spec(text)
    except SpecError as e:
        print(f"{args.spec}:{e.line}:{e.column}: {e.label}: {e.message}", file=sys.stderr)
        return FAILED
    runner = Runner(spec, Path(args.outdir), args.threads, args.probe_degree, args.seed)
    status = OK
    for cmd in spec.commands:
        if args.command != "run" and cmd.name != args.command:
            continue
        try:
            rc = runner.run(cmd)
        except SpecError as e:
            print(f"{args.spec}:{e.line}:{e.column}: {e.label}: {e.message}", file=sys.stderr)
            return FAILED
        except CiExtError as e:
            print(f"{args.spec}:{cmd.line}: {type(e).__name__}: {e}", file=sys.stderr)
            return FAILED
        status = max(status, rc)
    return status


if __name__ == "__main__":
    sys.exit(main())
