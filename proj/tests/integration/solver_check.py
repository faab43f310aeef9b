"""Solves emitted programs with clingo and compares the stable models with the
repairs and causes whydb computes natively.

Exits 77 (skipped) when the clingo Python module is unavailable.
"""

import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import clingo
except ImportError:
    print("clingo not available; skipping")
    sys.exit(77)


def run(binary, *args):
    out = subprocess.run([binary, *args], capture_output=True, text=True, check=True)
    return out.stdout


def stable_models(program, optimal_only=False):
    args = ["0", "--opt-mode=optN"] if optimal_only else ["0"]
    ctl = clingo.Control(args, logger=lambda code, message: None)
    ctl.add("base", [], program)
    ctl.ground([("base", [])])
    models = []
    with ctl.solve(yield_=True) as handle:
        for m in handle:
            models.append((list(m.cost), [str(s) for s in m.symbols(atoms=True)]))
    if optimal_only and models:
        best = min(cost for cost, _ in models)
        models = [(cost, atoms) for cost, atoms in models if cost == best]
    return [atoms for _, atoms in models]


def deleted_of(atoms):
    out = set()
    for a in atoms:
        sym = clingo.parse_term(a)
        if sym.name.endswith("_x") and sym.arguments[-1].name == "d":
            out.add(sym.arguments[0].number)
    return frozenset(out)


def brave(models, name):
    out = set()
    for atoms in models:
        for a in atoms:
            sym = clingo.parse_term(a)
            if sym.name == name:
                out.add(sym.arguments[0].number)
    return out


def check_case(binary, facts, query, hard=None):
    args = ["--db", str(facts), "--query-file", str(query)]
    if hard:
        args += ["--hard", str(hard)]

    if subprocess.run([binary, "repairs", *args], capture_output=True).returncode == 1:
        return False  # irreparable: nothing to compare
    program = run(binary, "emit-asp", *args)
    models = stable_models(program)
    from_solver = {deleted_of(m) for m in models}
    native = json.loads(run(binary, "repairs", *args, "--format", "json"))["repairs"]
    expected = {frozenset(r["deleted"]) for r in native}
    assert from_solver == expected, (facts.read_text(), query.read_text(), from_solver, expected)

    causes = json.loads(run(binary, "causes", *args, "--format", "json"))["causes"]
    assert brave(models, "ans") == {c["tuple"]["tid"] for c in causes}, (facts.read_text(), query.read_text())

    weak = run(binary, "emit-asp", *args, "--weak-constraints")
    optimal = {deleted_of(m) for m in stable_models(weak, optimal_only=True)}
    native_c = json.loads(run(binary, "repairs", *args, "--kind", "c", "--format", "json"))["repairs"]
    assert optimal == {frozenset(r["deleted"]) for r in native_c}, (facts.read_text(), query.read_text())

    normalized = run(binary, "emit-asp", *args, "--dialect", "core_normalized")
    assert {deleted_of(m) for m in stable_models(normalized)} == expected, (facts.read_text(), query.read_text())
    return True


def random_case(rng, tmp, index):
    preds = [(chr(ord("P") + i), rng.randint(1, 3)) for i in range(rng.randint(1, 3))]
    facts = set()
    for _ in range(rng.randint(1, 8)):
        name, arity = rng.choice(preds)
        facts.add(f"{name}({','.join(rng.choice('abc') for _ in range(arity))})")
    rules = []
    for _ in range(rng.choice([1, 1, 2])):
        atoms, used = [], []
        for _ in range(rng.randint(1, 3)):
            name, arity = rng.choice(preds)
            terms = [rng.choice("xyz") for _ in range(arity)]
            used += [t for t in terms if t not in used]
            atoms.append(f"{name}({','.join(terms)})")
        if len(used) >= 2 and rng.random() < 0.5:
            atoms.append(f"{used[0]} != {used[1]}")
        rules.append("q :- " + ", ".join(atoms) + ".")
    f = tmp / f"r{index}.facts"
    q = tmp / f"r{index}.query"
    f.write_text("".join(("@exo " if rng.random() < 0.15 else "") + fact + ".\n" for fact in sorted(facts)))
    q.write_text("\n".join(rules) + "\n")
    return f, q


def main():
    binary, data = sys.argv[1], Path(sys.argv[2])
    check_case(binary, data / "ex1.facts", data / "ex1.query")
    check_case(binary, data / "ex1.facts", data / "ex1.query", data / "ex1_ref.hard")

    rng = random.Random(7)
    with tempfile.TemporaryDirectory() as d:
        tmp = Path(d)
        compared = sum(check_case(binary, *random_case(rng, tmp, i)) for i in range(150))
    assert compared > 100, compared
    print(f"solver models agree with native results on {compared + 2} cases")


if __name__ == "__main__":
    main()
