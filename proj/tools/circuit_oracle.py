#!/usr/bin/env python3
"""Line-protocol oracle backed by a JSON circuit file.

Usage: circuit_oracle.py CIRCUIT.json [--hidden 0,3 --secret 10]

Reads one line of '0'/'1' per query on stdin and answers with the output
bits. With --hidden, the listed inputs are fixed to --secret and the query
only carries the visible ones.
"""

import argparse
import json
import sys

FUNCS = {
    "FALSE": 0b0000, "NOR": 0b0001, "NOT_A_AND_B": 0b0010, "NOT_A": 0b0011,
    "A_AND_NOT_B": 0b0100, "NOT_B": 0b0101, "XOR": 0b0110, "NAND": 0b0111,
    "AND": 0b1000, "XNOR": 0b1001, "B": 0b1010, "NOT_A_OR_B": 0b1011,
    "A": 0b1100, "A_OR_NOT_B": 0b1101, "OR": 0b1110, "TRUE": 0b1111,
}
UNICODE = {
    "¬A∧B": "NOT_A_AND_B", "¬A": "NOT_A", "A∧¬B": "A_AND_NOT_B", "¬B": "NOT_B",
    "¬A∨B": "NOT_A_OR_B", "A∨¬B": "A_OR_NOT_B",
}


def truth_table(name):
    name = UNICODE.get(name, name)
    return FUNCS[name.upper()]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("circuit")
    ap.add_argument("--hidden", default="")
    ap.add_argument("--secret", default="")
    args = ap.parse_args()

    with open(args.circuit) as f:
        doc = json.load(f)
    n = doc["n"]
    gates = doc["gates"]
    tables = [truth_table(g["type"]) for g in gates]
    hidden = [int(i) for i in args.hidden.split(",") if i]
    secret = [c == "1" for c in args.secret]
    if len(secret) != len(hidden):
        sys.exit("secret width does not match hidden list")
    visible = [i for i in range(n) if i not in hidden]

    def value(ref, x, vals):
        return x[ref["in"]] if "in" in ref else vals[ref["g"]]

    for line in sys.stdin:
        bits = line.strip()
        x = [False] * n
        for pos, c in zip(visible, bits):
            x[pos] = c == "1"
        for pos, b in zip(hidden, secret):
            x[pos] = b
        vals = []
        for g, tt in zip(gates, tables):
            a = value(g["l"], x, vals)
            b = value(g["r"], x, vals)
            vals.append(bool((tt >> (2 * a + b)) & 1))
        out = "".join("1" if value(o, x, vals) else "0" for o in doc["outputs"])
        sys.stdout.write(out + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
