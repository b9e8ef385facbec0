"""Machine-readable reports: JSON schemas, delimited tables, and figures.

Every subcommand that produces a report writes JSON against one of the
schemas below; `scan` can also emit the same table as CSV, and `scan` and
`analyze` can render a summary figure next to the data file.
"""

from __future__ import annotations

import csv

TRANSFORM_REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "files"],
    "properties": {
        "tool": {"const": "adjunct-cc"},
        "files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "output", "rewritten_sites", "backed_off"],
                "properties": {
                    "path": {"type": "string"},
                    "output": {"type": "string"},
                    "rewritten_sites": {
                        "type": "object",
                        "additionalProperties": {"type": "integer", "minimum": 0},
                    },
                    "backed_off": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["function", "variable", "verdict", "site"],
                            "properties": {
                                "function": {"type": "string"},
                                "variable": {"type": "string"},
                                "verdict": {"type": "string"},
                                "site": {"type": "string"},
                            },
                        },
                    },
                    "adjuncts": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "additionalProperties": {"type": "string"},
                        },
                    },
                    "lil_matches": {
                        "type": "array",
                        "items": {"type": "string"},
                    },
                },
            },
        },
    },
}

ANALYZE_REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "files"],
    "properties": {
        "tool": {"const": "adjunct-cc"},
        "files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "loops"],
                "properties": {
                    "path": {"type": "string"},
                    "pre_transform": {"type": "boolean"},
                    "loops": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["function", "line", "column",
                                         "verdict", "evidence"],
                            "properties": {
                                "function": {"type": "string"},
                                "line": {"type": "integer"},
                                "column": {"type": "integer"},
                                "verdict": {
                                    "enum": ["parallel", "serial", "unknown"]},
                                "evidence": {
                                    "type": "array",
                                    "items": {"type": "string"},
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}

SCAN_REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "files", "total"],
    "properties": {
        "tool": {"const": "adjunct-cc"},
        "files": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["path", "loc", "applicable", "non_applicable",
                             "exemptions", "parse_failed"],
                "properties": {
                    "path": {"type": "string"},
                    "loc": {"type": "integer", "minimum": 0},
                    "applicable": {"type": "integer", "minimum": 0},
                    "non_applicable": {"type": "integer", "minimum": 0},
                    "exemptions": {
                        "type": "object",
                        "additionalProperties": {"type": "integer", "minimum": 0},
                    },
                    "parse_failed": {"type": "boolean"},
                    "error": {"type": "string"},
                },
            },
        },
        "total": {"type": "object"},
    },
}


def write_scan_csv(report_obj: dict, path: str) -> None:
    """The applicability table as delimited text, one row per file."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "loc", "applicable", "non_applicable",
                    "exempt_allocation_delegation", "exempt_argv",
                    "parse_failed"])
        for f in report_obj["files"]:
            w.writerow([f["path"], f["loc"], f["applicable"],
                        f["non_applicable"],
                        f["exemptions"].get("allocation-delegation", 0),
                        f["exemptions"].get("argv", 0),
                        int(f["parse_failed"])])
        t = report_obj["total"]
        w.writerow(["total", t["loc"], t["applicable"], t["non_applicable"],
                    t["exemptions"].get("allocation-delegation", 0),
                    t["exemptions"].get("argv", 0), ""])


def _mpl():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_scan_figure(report_obj: dict, path: str) -> None:
    """Grouped bars: applicable / non-applicable / exempt per file."""
    plt = _mpl()
    files = report_obj["files"]
    names = [f["path"].rsplit("/", 1)[-1] for f in files]
    applicable = [f["applicable"] for f in files]
    non_applicable = [f["non_applicable"] for f in files]
    exempt = [sum(f["exemptions"].values()) for f in files]
    x = range(len(files))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(files)), 4))
    ax.bar([i - width for i in x], applicable, width, label="applicable")
    ax.bar(list(x), non_applicable, width, label="non-applicable")
    ax.bar([i + width for i in x], exempt, width, label="exempt")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("pointer variables")
    ax.set_title("Applicability per file")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_analyze_figure(report_obj: dict, path: str) -> None:
    """Verdict counts per file."""
    plt = _mpl()
    files = report_obj["files"]
    names = [f["path"].rsplit("/", 1)[-1] for f in files]
    counts = {"parallel": [], "serial": [], "unknown": []}
    for f in files:
        for verdict in counts:
            counts[verdict].append(
                sum(1 for lp in f["loops"] if lp["verdict"] == verdict))
    x = range(len(files))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6, 1.4 * len(files)), 4))
    ax.bar([i - width for i in x], counts["parallel"], width, label="parallel")
    ax.bar(list(x), counts["serial"], width, label="serial")
    ax.bar([i + width for i in x], counts["unknown"], width, label="unknown")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("loops")
    ax.set_title("Loop verdicts per file")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
