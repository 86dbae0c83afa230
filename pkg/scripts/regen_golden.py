"""Regenerate corpus/golden.json from the command list below.

Review the diff before committing: the golden file is the reference the
CLI tests compare against.
"""

import contextlib
import io
import json
import os
from pathlib import Path

from wtasim.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

COMMANDS = [
    ["eval", "-a", "m_two.wta", "-t", "sigma(alpha,alpha)"],
    ["eval", "-a", "m_two.wta", "-t", "sigma(alpha,sigma(alpha,alpha))", "--vector"],
    ["eval", "-a", "rat_c.wta", "-t", "alpha", "--json"],
    ["eval", "-a", "m_one.wta", "-t", "sigma(alpha)"],
    ["enumerate", "-a", "m_two.wta", "--max-size", "5"],
    ["enumerate", "-a", "nat_reduce_b.wta", "--max-size", "3", "--json"],
    ["support", "-a", "int_cancel.wta"],
    ["trim", "-a", "unreachable.wta"],
    ["trim", "-a", "m_one.wta"],
    ["check-sim", "-a", "m_two.wta", "-b", "m_two.wta", "-x", "identity_q.mat"],
    ["check-sim", "-a", "merge_split.wta", "-b", "m_two.wta", "-x", "merge_map.mat"],
    ["check-sim", "-a", "merge_split.wta", "-b", "m_two.wta", "-x", "bad_map.mat"],
    ["check-sim", "-a", "merge_split.wta", "-b", "m_two.wta", "-x", "bad_map.mat", "--json"],
    ["find-fsim", "-a", "merge_split.wta", "-b", "m_two.wta"],
    ["find-fsim", "-a", "m_two.wta", "-b", "m_one.wta"],
    ["find-bsim", "-a", "m_two.wta", "-b", "m_two_renamed.wta", "--json"],
    ["decompose-sim", "-a", "merge_split.wta", "-b", "m_two.wta", "-x", "merge_map.mat"],
    ["sum", "-a", "m_one.wta", "-b", "m_two.wta"],
    ["hadamard", "-a", "m_two.wta", "-b", "m_three.wta"],
    ["s0-product", "-a", "m_one.wta", "-b", "m_two.wta", "--symbol", "alpha"],
    ["s0-star", "-a", "rat_c.wta", "--symbol", "alpha"],
    ["equiv", "-a", "m_two.wta", "-b", "m_one.wta"],
    ["equiv", "-a", "m_two.wta", "-b", "m_two_renamed.wta"],
    ["equiv", "-a", "merge_split.wta", "-b", "m_two.wta", "--json"],
    ["equiv", "-a", "int_m.wta", "-b", "int_cancel.wta"],
    ["equiv", "-a", "nat_reduce_a.wta", "-b", "nat_reduce_b.wta"],
    ["equiv", "-a", "rat_a.wta", "-b", "rat_b.wta", "--json"],
    ["equiv", "-a", "rat_a.wta", "-b", "rat_c.wta"],
    ["equiv", "-a", "bool_a.wta", "-b", "bool_b.wta"],
    ["equiv", "-a", "bool_a.wta", "-b", "bool_b.wta", "--via-nat"],
    ["joint-reduce", "-a", "nat_reduce_a.wta", "-b", "nat_reduce_b.wta"],
    ["joint-reduce", "-a", "int_m.wta", "-b", "int_cancel.wta", "--json"],
    ["eval", "-a", "bad_arity.wta", "-t", "alpha"],
    ["eval", "-a", "bad_carrier.wta", "-t", "alpha"],
    ["eval", "-a", "missing.wta", "-t", "alpha"],
    ["equiv", "-a", "m_one.wta", "-b", "int_m.wta"],
    ["s0-star", "-a", "m_one.wta", "--symbol", "alpha"],
]


def run(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


def main_():
    os.chdir(CORPUS)
    cases = []
    for args in COMMANDS:
        code, stdout, stderr = run(args)
        cases.append({"args": args, "exit": code, "stdout": stdout, "stderr": stderr})
    (CORPUS / "golden.json").write_text(json.dumps(cases, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(cases)} cases")


if __name__ == "__main__":
    main_()
