#!/usr/bin/env python3
# Copyright 2026 The t2s Authors
# SPDX-License-Identifier: Apache-2.0
"""Rebuilds fixtures/<db>/<db>.sqlite from the .sql scripts next to them."""

import pathlib
import sqlite3
import sys


def build(sql_path: pathlib.Path) -> pathlib.Path:
    out = sql_path.with_suffix(".sqlite")
    if out.exists():
        out.unlink()
    con = sqlite3.connect(out)
    try:
        con.executescript(sql_path.read_text(encoding="utf-8"))
        con.commit()
    finally:
        con.close()
    return out


def main() -> int:
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
    scripts = sorted(root.glob("*/*.sql"))
    if not scripts:
        print(f"no fixture scripts under {root}", file=sys.stderr)
        return 1
    for s in scripts:
        print(build(s))
    return 0


if __name__ == "__main__":
    sys.exit(main())
