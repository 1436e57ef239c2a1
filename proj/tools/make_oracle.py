#!/usr/bin/env python3
"""Writes fixtures/corpus/oracle.jsonl from text anchors, so the sources can
be edited without renumbering the oracle by hand."""
import json
import re
import sys
from pathlib import Path

# file, method, oracle name, first line prefix, last line prefix, nth match
ANCHORS = [
    ("com/shop/OrderService.java", "checkout", "computeSubtotal", "double subtotal = 0;", "}", 1),
    ("com/shop/OrderService.java", "restockReport", "countMissing", "int missing = 0;", "}", 1),
    ("com/shop/OrderService.java", "applyPromotion", "applyCredit", "double credit =", 'audit.record("promo-applied"', 1),
    ("com/shop/OrderService.java", "ship", "chooseCarrier", 'String carrier = "standard";', "}", 1),
    ("com/shop/CustomerRegistry.java", "register", "normalizeEmail", "String trimmed =", "String normalized =", 1),
    ("com/shop/CustomerRegistry.java", "purgeInactive", "notifyOperators", "String subject =", 'mailer.send("ops@example.com", body);', 1),
    ("com/shop/CustomerRegistry.java", "countryHistogram", "dropExcess", "int dropped =", 'histogram.remove("XX");', 1),
    ("com/shop/CustomerRegistry.java", "describe", "formatAge", "long age =", "String suffix =", 1),
    ("com/net/ConnectionPool.java", "acquire", "findIdle", "Connection found = null;", "}", 1),
    ("com/net/ConnectionPool.java", "release", "returnToPool", "if (idle.size() >= maxSize) {", "}", 1),
    ("com/net/ConnectionPool.java", "drain", "reportDrain", "int after =", 'metrics.gauge("drained", delta);', 1),
    ("com/net/ConnectionPool.java", "healthSummary", "countDead", "int dead = 0;", "}", 1),
    ("com/net/RequestRouter.java", "route", "cleanPath", "int q =", "}", 1),
    ("com/net/RequestRouter.java", "register", "reportReplaced", "String message =", 'metrics.increment("replaced");', 1),
    ("com/net/RequestRouter.java", "statusHistogram", "logErrorRatio", "double ratio =", 'metrics.log("error ratio "', 1),
    ("com/net/RequestRouter.java", "dump", "keyWidth", "int width = 0;", "}", 1),
    ("com/report/ReportBuilder.java", "render", "appendRule", "String rule =", "out.append('\\n');", 1),
    ("com/report/ReportBuilder.java", "addSection", "uniqueRows", "List<Row> unique =", "}", 1),
    ("com/report/ReportBuilder.java", "paginate", "countPages", "int pages = 0;", "}", 2),
    ("com/report/ReportBuilder.java", "outline", "truncate", "int hidden =", 'lines.add("... "', 1),
]


def indent(s):
    return len(s) - len(s.lstrip())


def host_range(lines, method):
    sig = re.compile(r"^\s+(public|private|protected)[^=;]*\b" + re.escape(method) + r"\(")
    for i, text in enumerate(lines):
        if sig.match(text) and text.rstrip().endswith("{"):
            depth = 0
            for j in range(i, len(lines)):
                depth += lines[j].count("{") - lines[j].count("}")
                if depth == 0:
                    return i + 1, j + 1
    raise SystemExit(f"method {method} not found")


def matches(text, prefix):
    t = text.strip()
    return t == prefix if prefix == "}" else t.startswith(prefix)


def main():
    corpus = Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures/corpus")
    out = []
    for file, method, name, first, last, nth in ANCHORS:
        lines = (corpus / "sources" / file).read_text().split("\n")
        hs, he = host_range(lines, method)
        body = range(hs, he - 1)  # 0-based indices of body lines
        start = next(i for i in body if matches(lines[i], first))
        hits = [i for i in body if i >= start and matches(lines[i], last) and indent(lines[i]) == indent(lines[start])]
        end = hits[nth - 1]
        out.append({"file": file, "host_start": hs, "host_end": he,
                    "oracle_start": start + 1, "oracle_end": end + 1, "oracle_name": name})
    with open(corpus / "oracle.jsonl", "w") as f:
        for e in out:
            f.write(json.dumps(e) + "\n")
    print(f"{len(out)} entries")


if __name__ == "__main__":
    main()
