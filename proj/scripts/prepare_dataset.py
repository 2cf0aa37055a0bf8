#!/usr/bin/env python3
"""Convert public dataset distributions into the canonical input grammar.

Supported source layouts:

  cora / citeseer (LINQS "content/cites" layout):
      <dir>/<name>.content   <paper_id> <w_0> ... <w_{m-1}> <class>
      <dir>/<name>.cites     <cited> <citing>

  pubmed (LINQS "Pubmed-Diabetes" layout):
      <dir>/data/Pubmed-Diabetes.NODE.paper.tab
      <dir>/data/Pubmed-Diabetes.DIRECTED.cites.tab

  blogcatalog (socialcomputing "BlogCatalog-dataset" layout):
      <dir>/data/edges.csv        <node>,<node>
      <dir>/data/group-edges.csv  <node>,<group>

Output (under --out/<name>/):
      <name>.edges    <src>\t<dst>
      <name>.words    <vertex>\t<word>...        (citation sets only)
      <name>.classes  <vertex>\t<class>[,<class>...]
      <name>.manifest

Usage:
  python3 scripts/prepare_dataset.py cora --source ~/Downloads/cora --out data
"""

import argparse
import collections
import pathlib
import sys


def write_manifest(out_dir, name, with_words):
    lines = [
        f"edge_file = {name}.edges",
        "directed = false",
        "node_id_labels = true",
    ]
    if with_words:
        lines.append(f"label_file = words:{name}.words")
    lines.append(f"class_file = {name}.classes")
    (out_dir / f"{name}.manifest").write_text("\n".join(lines) + "\n")


def prepare_linqs(name, source, out_dir):
    content = source / f"{name}.content"
    cites = source / f"{name}.cites"
    if not content.exists() or not cites.exists():
        sys.exit(f"expected {content} and {cites}")

    words = {}
    classes = {}
    for line in content.read_text().splitlines():
        parts = line.strip().split()
        if not parts:
            continue
        paper, features, cls = parts[0], parts[1:-1], parts[-1]
        words[paper] = [f"w{i}" for i, bit in enumerate(features) if bit not in ("0", "0.0")]
        classes[paper] = cls

    edges = []
    skipped = 0
    for line in cites.read_text().splitlines():
        parts = line.strip().split()
        if len(parts) != 2:
            continue
        # Some citeseer citations reference papers without content rows.
        if parts[0] not in classes or parts[1] not in classes:
            skipped += 1
            continue
        edges.append((parts[0], parts[1]))

    # Vertices are defined by the edge file, so papers that never appear in a
    # citation get a self-loop line: the loader interns the vertex and drops
    # the loop, leaving a retained degree-zero vertex.
    seen = set()
    for a, b in edges:
        seen.add(a)
        seen.add(b)
    isolated = [p for p in classes if p not in seen]

    with open(out_dir / f"{name}.edges", "w") as fh:
        for a, b in edges:
            fh.write(f"{a}\t{b}\n")
        for p in isolated:
            fh.write(f"{p}\t{p}\n")
    with open(out_dir / f"{name}.words", "w") as fh:
        for paper in classes:
            if words.get(paper):
                fh.write(paper + "\t" + "\t".join(words[paper]) + "\n")
    with open(out_dir / f"{name}.classes", "w") as fh:
        for paper, cls in classes.items():
            fh.write(f"{paper}\t{cls}\n")
    write_manifest(out_dir, name, with_words=True)
    print(f"{name}: {len(classes)} papers, {len(edges)} citation pairs,"
          f" {len(isolated)} isolated papers kept via self-loop lines"
          f" ({skipped} pairs skipped with missing endpoints)")


def prepare_pubmed(source, out_dir):
    node_file = source / "data" / "Pubmed-Diabetes.NODE.paper.tab"
    cite_file = source / "data" / "Pubmed-Diabetes.DIRECTED.cites.tab"
    if not node_file.exists() or not cite_file.exists():
        sys.exit(f"expected {node_file} and {cite_file}")

    words = {}
    classes = {}
    lines = node_file.read_text().splitlines()
    for line in lines[2:]:  # two header lines
        parts = line.strip().split("\t")
        if len(parts) < 2:
            continue
        paper = parts[0]
        cls = None
        ws = []
        for field in parts[1:]:
            if field.startswith("label="):
                cls = field.split("=", 1)[1]
            elif field.startswith("w-"):
                ws.append(field.split("=", 1)[0])
        classes[paper] = f"c{cls}"
        words[paper] = ws

    edges = []
    for line in cite_file.read_text().splitlines()[2:]:
        parts = line.strip().split("\t")
        if len(parts) != 4:
            continue
        src = parts[1].split(":")[-1]
        dst = parts[3].split(":")[-1]
        if src in classes and dst in classes:
            edges.append((src, dst))

    seen = set()
    for a, b in edges:
        seen.add(a)
        seen.add(b)
    isolated = [p for p in classes if p not in seen]

    with open(out_dir / "pubmed.edges", "w") as fh:
        for a, b in edges:
            fh.write(f"{a}\t{b}\n")
        for p in isolated:
            fh.write(f"{p}\t{p}\n")
    with open(out_dir / "pubmed.words", "w") as fh:
        for paper in classes:
            if words.get(paper):
                fh.write(paper + "\t" + "\t".join(words[paper]) + "\n")
    with open(out_dir / "pubmed.classes", "w") as fh:
        for paper, cls in classes.items():
            fh.write(f"{paper}\t{cls}\n")
    write_manifest(out_dir, "pubmed", with_words=True)
    print(f"pubmed: {len(classes)} papers, {len(edges)} citation pairs")


def prepare_blogcatalog(source, out_dir):
    edge_file = source / "data" / "edges.csv"
    group_file = source / "data" / "group-edges.csv"
    if not edge_file.exists() or not group_file.exists():
        sys.exit(f"expected {edge_file} and {group_file}")

    with open(out_dir / "blogcatalog.edges", "w") as fh:
        for line in edge_file.read_text().splitlines():
            parts = line.strip().split(",")
            if len(parts) == 2:
                fh.write(f"{parts[0]}\t{parts[1]}\n")

    groups = collections.defaultdict(list)
    for line in group_file.read_text().splitlines():
        parts = line.strip().split(",")
        if len(parts) == 2:
            groups[parts[0]].append(parts[1])
    with open(out_dir / "blogcatalog.classes", "w") as fh:
        for node, gs in groups.items():
            fh.write(node + "\t" + ",".join(f"g{g}" for g in gs) + "\n")
    write_manifest(out_dir, "blogcatalog", with_words=False)
    print(f"blogcatalog: {len(groups)} labeled nodes")


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("name", choices=["cora", "citeseer", "pubmed", "blogcatalog"])
    parser.add_argument("--source", required=True, help="extracted dataset directory")
    parser.add_argument("--out", default="data", help="output root (default: data)")
    args = parser.parse_args()

    source = pathlib.Path(args.source).expanduser()
    out_dir = pathlib.Path(args.out) / args.name
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.name in ("cora", "citeseer"):
        prepare_linqs(args.name, source, out_dir)
    elif args.name == "pubmed":
        prepare_pubmed(source, out_dir)
    else:
        prepare_blogcatalog(source, out_dir)


if __name__ == "__main__":
    main()
