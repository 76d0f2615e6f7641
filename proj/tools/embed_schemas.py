#!/usr/bin/env python3
"""Regenerate include/fusionhar/schemas.hpp from schemas/*.schema.json."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
entries = [("kCompareReport", "compare_report.schema.json"), ("kMetricsReport", "metrics_report.schema.json")]
out = ["#pragma once", "", "// Generated by tools/embed_schemas.py from schemas/; do not edit.", "",
       "namespace fusionhar::schemas {", ""]
for name, file in entries:
    text = (root / "schemas" / file).read_text()
    out.append(f'inline constexpr const char* {name} = R"schema({text})schema";')
    out.append("")
out.append("}  // namespace fusionhar::schemas")
(root / "include" / "fusionhar" / "schemas.hpp").write_text("\n".join(out) + "\n")
