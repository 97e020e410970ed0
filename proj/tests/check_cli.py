"""Exit codes and output files of the hodomap CLI."""
import os
import pathlib
import subprocess
import sys
import tempfile


def run(*args):
    return subprocess.run(list(args), capture_output=True, text=True)


def main():
    cli, scenarios = sys.argv[1], pathlib.Path(sys.argv[2])
    failures = []

    def expect(what, proc, code):
        if proc.returncode != code:
            failures.append(f"{what}: exit {proc.returncode}, expected {code}\n{proc.stdout}{proc.stderr}")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        identity = scenarios / "halfdisk-identity.ini"
        expect("verify identity", run(cli, "verify", str(identity)), 0)

        out = tmp / "identity"
        expect("run identity", run(cli, "run", str(identity), "--out", str(out), "--seed", "3"), 0)
        for name in ("report.json", "points.csv", "curves.csv", "figure.svg"):
            if not (out / name).is_file():
                failures.append(f"missing {name}")
        if '"seed": 3' not in (out / "report.json").read_text():
            failures.append("--seed not applied")

        bowtie = tmp / "bowtie.ini"
        bowtie.write_text("[scenario]\nname = bowtie\n[domain]\nkind = polygon\n"
                          "vertices = 0 0, 1 0, 0 1, 1 1\nnodal_edges = 1\nanchor = 0.5 0\n"
                          "[v]\nbumps = 0.1:0.5:0.9:1\n[u]\nclosed_form = y\n")
        proc = run(cli, "run", str(bowtie), "--out", str(tmp / "bowtie"))
        expect("self-intersecting domain", proc, 1)
        if "geometry" not in proc.stdout:
            failures.append("hard error does not name its stage:\n" + proc.stdout)
        if not (tmp / "bowtie" / "report.json").is_file():
            failures.append("hard error wrote no report")

        bad = tmp / "bad.ini"
        bad.write_text("[scenario]\nname = bad\n[solver]\ncharges = -4\n")
        expect("invalid config", run(cli, "run", str(bad)), 1)
        expect("missing config", run(cli, "run", str(tmp / "nope.ini")), 1)
        expect("no subcommand", run(cli), 1)
        expect("help", run(cli, "--help"), 0)

    for f in failures:
        print("FAIL", f)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
