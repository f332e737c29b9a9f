"""Command line: ``residual-calc run <config>`` and ``residual-calc series``.

Exit codes: 0 all tasks pass, 1 a check or computation failed, 2 the config
does not parse, 3 the config does not validate.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import family, nodal, randgen, scheme
from .class_ring import (
    GradedClass, RingContext, VirtualBundle, projective_pushforward, segre_total, top_chern,
    twist_by_line,
)
from .config import ConfigParseError, ConfigValidationError, JobConfig, Task, load_path
from .errors import CalculusError
from .lattice import (
    LatticeClass, adjunction_delta, expected_dimension, is_exceptional, pair, typeI_codimension,
)

REPORT_VERSION = "1.0"
DEFAULT_INSTANCES = 50


def class_json(c: GradedClass) -> dict:
    return {"expr": str(c), **c.to_json()}


def lattice_json(name: str, c: LatticeClass) -> dict:
    return {"name": name, "coords": list(c.coords), "degree_rel": c.degree_rel,
            "febd": c.febd.value, "type": c.type_tag.value}


def check(name: str, lhs, rhs) -> dict:
    def enc(x):
        return class_json(x) if isinstance(x, GradedClass) else x
    return {"name": name, "pass": lhs == rhs, "lhs": enc(lhs), "rhs": enc(rhs)}


class TaskRunner:
    """Evaluates one task at a time against a validated config."""

    def __init__(self, config: JobConfig, seed: int):
        self.cfg = config
        self.seed = seed

    def rng(self, task: Task) -> random.Random:
        return random.Random(f"{self.seed}:{task.index}:{task.kind}")

    def run(self, task: Task) -> dict:
        entry = {"index": task.index, "kind": task.kind, "inputs": self.echo(task)}
        try:
            results, checks = getattr(self, f"do_{task.kind}")(task)
        except CalculusError as exc:
            entry.update(status="error", error=exc.to_dict(), results={}, checks=[])
            return entry
        entry["results"] = results
        entry["checks"] = checks
        entry["status"] = "pass" if all(c["pass"] for c in checks) else "fail"
        return entry

    def echo(self, task: Task) -> dict:
        out = {}
        for key, value in task.params.items():
            if isinstance(value, str) and value in self.cfg.classes and key not in ("twist", "pushforward", "pg_class"):
                out[key] = lattice_json(value, self.cfg.classes[value])
            elif isinstance(value, list) and value and all(
                    isinstance(v, str) and v in self.cfg.classes for v in value) and key in ("es", "candidates"):
                out[key] = [lattice_json(v, self.cfg.classes[v]) for v in value]
            else:
                out[key] = value
        return out

    def C(self, name) -> LatticeClass:
        return self.cfg.classes[name]

    def bundle(self, spec) -> VirtualBundle:
        return VirtualBundle.honest(spec["rank"], self.cfg.expr(spec.get("ctotal", "1")))

    # --- lattice ----------------------------------------------------------
    def do_pair(self, t):
        g = self.cfg.geometry
        a, b = self.C(t.params["a"]), self.C(t.params["b"])
        v = pair(a, b, g)
        return {"value": v}, [check("symmetry", v, pair(b, a, g))]

    def do_is_exceptional(self, t):
        return {"value": is_exceptional(self.C(t.params["e"]), self.cfg.geometry)}, []

    def do_expected_dimension(self, t):
        return {"value": expected_dimension(self.C(t.params["e"]), self.cfg.geometry)}, []

    def do_typeI_codimension(self, t):
        return {"value": typeI_codimension(self.C(t.params["e"]), self.cfg.geometry)}, []

    def do_adjunction_delta(self, t):
        L = t.params["L_sq"]
        d = adjunction_delta(L)
        return {"delta": d}, [check("round trip 2*delta - 2", 2 * d - 2, L)]

    def do_chi_line(self, t):
        g = self.cfg.geometry
        return {"chi": family.chi_line(self.C(t.params["c"]), g),
                "chi_O": family.chi_structure_sheaf(g)}, []

    # --- family -----------------------------------------------------------
    def do_rank_omega(self, t):
        g = self.cfg.geometry
        c = self.C(t.params["c"])
        es = [self.C(n) for n in t.params["es"]]
        d = self.C(t.params["d"]) if "d" in t.params else LatticeClass.basis(g.rank, 0)
        lat = family.rank_omega_lattice(c, es, g)
        poly = family.rank_omega_chi(c, es, g, d)
        value = family.rank_omega(c, es, g, d)
        return ({"rank_omega": value, "chi_polynomial": class_json(poly)},
                [check("lattice formula = Riemann-Roch constant term", lat, int(poly.constant_term())),
                 check("Riemann-Roch free of n", poly.involves("n"), False)])

    def do_dimension_triple(self, t):
        g = self.cfg.geometry
        c = self.C(t.params["c"])
        es = [self.C(n) for n in t.params["es"]]
        a1, a2, a3 = family.dimension_triple(c, es, g)
        rhs = 2 * g.dim_base - g.q + g.p_g + (pair(c, c, g) - pair(g.canonical_class, c, g)) // 2
        return {"a1": a1, "a2": a2, "a3": a3}, [check("a1 + a2 - a3", a1 + a2 - a3, rhs)]

    def do_w_prime_ranks(self, t):
        g = self.cfg.geometry
        r1, r2 = family.w_prime_ranks(self.C(t.params["c"]), self.C(t.params["e"]),
                                      self.C(t.params["d"]), t.params["n"], g)
        return {"rank_W_II_prime": r1, "rank_W_prime": r2}, [check("equal ranks", r1, r2)]

    def do_bundle(self, t):
        p = t.params
        b = VirtualBundle.honest(p["rank"], self.cfg.expr(p["ctotal"]))
        s = segre_total(b)
        res = {"segre_total": class_json(s), "top_chern": class_json(top_chern(b))}
        checks = [check("segre * chern = 1", s * b.ctotal, self.cfg.ring.one())]
        if "twist" in p:
            res["twisted_ctotal"] = class_json(twist_by_line(b, p["twist"]).ctotal)
        if "pushforward" in p:
            z = p["pushforward"]
            if b.ctotal.involves(z):
                raise CalculusError("bundle for pushforward must not involve the hyperplane class")
            zc = self.cfg.ring.var(z)
            pushed = {str(k): class_json(projective_pushforward(zc ** k, b, z))
                      for k in range(self.cfg.truncation + 1)}
            res["pushforward_of_z_powers"] = pushed
        return res, checks

    def do_localized_class(self, t):
        p = t.params
        k = family.KuranishiModel(self.bundle(p["v"]), self.bundle(p["w"]), p["base_dim"],
                                  self.cfg.expr(p["moduli_segre"]))
        loc = family.localized_class(k, "z")
        res = {"ed": k.ed, "localized_class": class_json(loc)}
        checks = []
        if "stabilize_by" in p:
            k2 = family.stabilize(k, self.bundle(p["stabilize_by"]), "z")
            loc2 = family.localized_class(k2, "z")
            res["stabilized_localized_class"] = class_json(loc2)
            checks.append(check("stabilization invariance", loc2, loc))
        return res, checks

    def do_residual_expansion(self, t):
        p = t.params
        g = self.cfg.geometry
        es = [self.C(n) for n in p["es"]]
        ring = self.cfg.ring
        opt = (lambda key: self.cfg.expr(p[key]) if key in p else None)
        inp = family.ExpansionInputs(
            ctx=ring, h=tuple(p.get("h", ())),
            d=self.C(p["d"]) if "d" in p else None, n0=p.get("n0", 10),
            v_chern=tuple(self.cfg.expr(x) for x in p.get("v_chern", ())),
            v_prime_chern=opt("v_prime_chern"), rnd_chern=opt("rnd_chern"),
            r1_chern=opt("r1_chern"), pg_class=p.get("pg_class"),
            r2_trivial=bool(p.get("r2_trivial", False)),
            special_assumption=bool(p.get("special_assumption", True)),
            eta_tilde=opt("eta_tilde"),
        )
        rep = family.residual_expansion(self.C(p["c"]), es, g, inp)
        res = {
            "a1": rep.a1, "a2": rep.a2, "a3": rep.a3, "rank_omega": rep.rank_omega,
            "symbols": list(rep.symbols),
            "dominating": class_json(rep.dominating),
            "tau_by_power": {str(r): class_json(c) for r, c in rep.tau_by_power.items()},
            "corrections": [{"label": lbl, "class": class_json(c)} for lbl, c in rep.corrections],
            "conditional": rep.conditional, "notes": rep.notes,
        }
        checks = [check("dominating + corrections reassemble", rep.reassemble("z"), rep.full)]
        hs = inp.h or tuple(f"h{i + 1}" for i in range(len(es)))
        checks.append(check("dominating term free of h_i",
                            any(rep.dominating.involves(h) for h in hs), False))
        return res, checks

    # --- series and schemes -----------------------------------------------
    def do_yau_zaslow(self, t):
        c2 = t.params.get("c2", self.cfg.geometry.c2)
        s = nodal.yau_zaslow_series(c2, t.params["delta_max"])
        checks = [check("n_1 = c2", s[1], c2)] if s.delta_max >= 1 else []
        return {"c2": c2, "coefficients": list(s.coeffs)}, checks

    def do_virtual_count(self, t):
        c2 = t.params.get("c2", self.cfg.geometry.c2)
        d, n = nodal.virtual_count_report(t.params["L_sq"], c2)
        return {"delta": d, "n_delta": n}, []

    def do_k3_vanishing(self, t):
        p = t.params
        pg = p.get("pg", self.cfg.geometry.p_g)
        return {"vanishes": nodal.k3_type2_vanishing(pg, bool(p.get("r2_trivial", False)), p["p"])}, []

    def do_schedule(self, t):
        g = self.cfg.geometry
        names = t.params["candidates"]
        cands = [self.C(n) for n in names]
        cs, po, sch = scheme.schedule(self.C(t.params["c"]), cands, g, t.params["max_size"])
        named = lambda ix: [names[i] for i in ix]
        return {
            "collections": [named(c.indices) for c in cs],
            "order_edges": [list(e) for e in po],
            "ordered": [named(c.indices) for c in sch.ordered],
            "blowup_order": [named(c.indices) for c in sch.blowup_order],
        }, [check("collections admissible",
                  all(scheme.is_admissible(self.C(t.params["c"]), c.members, g) for c in cs), True)]

    # --- randomized property tasks ----------------------------------------
    def _instances(self, t):
        return t.params.get("instances", DEFAULT_INSTANCES)

    def do_stabilization_check(self, t):
        rng = self.rng(t)
        ctx = RingContext.build(6, z=1, a=1, b=1, c=2)
        base = ("a", "b", "c")
        bad = []
        n = self._instances(t)
        for i in range(n):
            k = randgen.rand_kuranishi(rng, ctx, base)
            g = randgen.rand_honest(rng, ctx, base, 3)
            before = family.localized_class(k, "z")
            after = family.localized_class(family.stabilize(k, g, "z"), "z")
            if before != after:
                bad.append({"instance": i, "before": class_json(before), "after": class_json(after)})
        return {"instances": n, "failures": bad}, [check("stabilization invariance", len(bad), 0)]

    def do_whitney_segre_check(self, t):
        rng = self.rng(t)
        ctx = RingContext.build(6, a=1, b=1, c=2)
        base = ("a", "b", "c")
        bad = []
        n = self._instances(t)
        for i in range(n):
            e = randgen.rand_honest(rng, ctx, base, 4)
            f = randgen.rand_honest(rng, ctx, base, 4)
            lhs = segre_total(e + f)
            rhs = segre_total(e) * segre_total(f)
            if lhs != rhs:
                bad.append({"instance": i, "lhs": class_json(lhs), "rhs": class_json(rhs)})
        return {"instances": n, "failures": bad}, [check("s(E+F) = s(E) s(F)", len(bad), 0)]

    def do_rank_omega_check(self, t):
        rng = self.rng(t)
        n = self._instances(t)
        bad = []
        for i in range(n):
            g, c, es = randgen.rand_instance(rng)
            d = randgen.rand_vector(rng, g.rank)
            try:
                family.rank_omega(c, es, g, d)
            except CalculusError as exc:
                bad.append({"instance": i, "error": exc.to_dict()})
        return {"instances": n, "failures": bad}, [check("dual rank(omega)", len(bad), 0)]

    def do_dimension_identity_check(self, t):
        rng = self.rng(t)
        n = self._instances(t)
        bad = []
        for i in range(n):
            g, c, es = randgen.rand_instance(rng)
            try:
                family.dimension_triple(c, es, g)
            except CalculusError as exc:
                bad.append({"instance": i, "error": exc.to_dict()})
        return {"instances": n, "failures": bad}, [check("a1 + a2 - a3 identity", len(bad), 0)]

    def do_tau_check(self, t):
        rng = self.rng(t)
        ctx = RingContext.build(6, z=1, n=0, x=1, y=1, w=2)
        base = ("x", "y", "w")
        n = self._instances(t)
        bad = []
        done = 0
        while done < n:
            pieces = randgen.rand_omega_pieces(rng, ctx, base, "n", "z")
            omega = randgen.assemble_omega(ctx, pieces, "z")
            if not 0 <= omega.vrank <= ctx.truncation:
                continue
            shifted = [(s, r, b, randgen.rand_n_part(rng, ctx, base, "n", r), tw)
                       for s, r, b, _, tw in pieces]
            tau, _ = family.tau_class(omega, "z", "n")
            tau2, _ = family.tau_class(randgen.assemble_omega(ctx, shifted, "z"), "z", "n")
            tau0, _ = family.tau_class(randgen.assemble_omega(ctx, pieces, "z", with_n=False), "z", "n")
            if not (tau == tau2 == tau0):
                bad.append({"instance": done, "tau": class_json(tau), "shifted": class_json(tau2)})
            done += 1
        return {"instances": n, "failures": bad}, [check("tau independent of nD terms", len(bad), 0)]


def run_config(config: JobConfig, seed: int = 0, parallel: bool = False,
               source: str = "") -> dict:
    runner = TaskRunner(config, seed)
    if parallel:
        with ThreadPoolExecutor() as pool:
            entries = list(pool.map(runner.run, config.tasks))
    else:
        entries = [runner.run(t) for t in config.tasks]
    passed = sum(e["status"] == "pass" for e in entries)
    return {
        "report_version": REPORT_VERSION,
        "config": source,
        "seed": seed,
        "ring": config.ring.to_json(),
        "geometry": {"gram": [list(r) for r in config.geometry.gram],
                     "canonical": list(config.geometry.canonical),
                     "p_g": config.geometry.p_g, "q": config.geometry.q,
                     "c2": config.geometry.c2, "dim_base": config.geometry.dim_base},
        "classes": [lattice_json(n, c) for n, c in config.classes.items()],
        "tasks": entries,
        "summary": {"tasks": len(entries), "passed": passed, "failed": len(entries) - passed},
        "status": "pass" if passed == len(entries) else "fail",
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="residual-calc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute the tasks of a config file")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=0, help="seed for randomized property tasks")
    run.add_argument("--parallel", action="store_true", help="run tasks concurrently")
    run.add_argument("--check-only", action="store_true", help="validate the config and stop")
    run.add_argument("--output", help="report path (overrides output_path)")
    ser = sub.add_parser("series", help="print Yau-Zaslow coefficients as 'delta n_delta' lines")
    ser.add_argument("--c2", type=int, default=24)
    ser.add_argument("--delta-max", type=int, default=10)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "series":
        sys.stdout.write(nodal.yau_zaslow_series(args.c2, args.delta_max).to_text())
        return 0
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: --seed must fit in an unsigned 64-bit integer", file=sys.stderr)
        return 3
    try:
        config = load_path(args.config)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ConfigValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    if args.check_only:
        print(f"{args.config}: ok ({len(config.tasks)} tasks)")
        return 0
    report = run_config(config, args.seed, args.parallel, source=Path(args.config).name)
    out = Path(args.output or config.output_path)
    out.write_text(dumps_report(report), encoding="utf-8")
    s = report["summary"]
    print(f"{s['passed']}/{s['tasks']} tasks passed; report written to {out}")
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
