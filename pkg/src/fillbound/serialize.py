"""JSON interchange for complexes, chains, charts, coverings, trees, and
whole corpus instances.

Writes are atomic (temp file + rename) and every emitted value re-parses
to an equal in-memory object.  Instance directories follow the layout
complex.json / tree.json / charts/ / coverings/ / params.json /
manifest.json, the manifest carrying provenance and sha256 checksums.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Dict, List, Optional

import numpy as np

from .bounds import BoundParams
from .charts import HarmonicChart
from .complexes import Chain, WeightedComplex, simplex_key
from .corpus import CorpusInstance
from .covering import Ball, Covering, SkeletonMetric
from .tree import BubbleTree, Region


class ParseError(ValueError):
    def __init__(self, path: str, detail: str):
        super().__init__(f"{path}: {detail}")
        self.path = path
        self.detail = detail


def write_json_atomic(path: str, payload) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(path, "file not found")
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON at line {exc.lineno}: {exc.msg}")


# -- complexes ---------------------------------------------------------------


def complex_to_dict(cx: WeightedComplex) -> dict:
    simplices = {}
    for k in range(1, cx.dim + 1):
        simplices[str(k)] = [list(s) for s in cx.simplices_of_dim(k)]
    volumes = {}
    for k in range(1, cx.dim + 1):
        for s in cx.simplices_of_dim(k):
            volumes[simplex_key(s)] = cx.volumes[s]
    return {"dim": cx.dim, "vertices": cx.vertices, "simplices": simplices,
            "volumes": volumes}


def complex_from_dict(d: dict, path: str = "<complex>") -> WeightedComplex:
    try:
        simplices = [[v] for v in d["vertices"]]
        for k, items in d.get("simplices", {}).items():
            simplices.extend(items)
        volumes = {}
        for key, vol in d.get("volumes", {}).items():
            verts = tuple(int(x) for x in key.split("-"))
            volumes[verts] = float(vol)
        return WeightedComplex(simplices, volumes)
    except KeyError as exc:
        raise ParseError(path, f"missing field {exc}")


def chain_to_dict(c: Chain) -> dict:
    return {"degree": c.degree,
            "terms": [{"simplex": list(s), "coeff": coeff}
                      for s, coeff in c.terms()]}


def chain_from_dict(d: dict, cx: WeightedComplex,
                    path: str = "<chain>") -> Chain:
    try:
        return Chain.from_terms(cx, int(d["degree"]),
                                [(t["simplex"], int(t["coeff"]))
                                 for t in d["terms"]])
    except KeyError as exc:
        raise ParseError(path, f"missing field {exc}")


# -- charts and coverings ----------------------------------------------------


def chart_to_dict(ch: HarmonicChart) -> dict:
    return {"anchor": ch.anchor, "radius": ch.radius,
            "coords": {str(v): [float(x) for x in p]
                       for v, p in sorted(ch.coords.items())},
            "metric_samples": [{"at": [float(x) for x in p],
                                "g": [[float(v) for v in row] for row in g]}
                               for p, g in zip(ch.sample_points,
                                               ch.sample_g)]}


def chart_from_dict(d: dict, path: str = "<chart>") -> HarmonicChart:
    try:
        coords = {int(v): np.array(p, dtype=float)
                  for v, p in d.get("coords", {}).items()}
        samples = [(np.array(s["at"], dtype=float),
                    np.array(s["g"], dtype=float))
                   for s in d.get("metric_samples", [])]
        return HarmonicChart(int(d["anchor"]), float(d["radius"]),
                             coords, samples)
    except KeyError as exc:
        raise ParseError(path, f"missing field {exc}")


def covering_to_dict(cov: Covering, ball_ids: Optional[List[int]] = None
                     ) -> dict:
    balls = cov.balls if ball_ids is None else \
        [cov.by_index[i] for i in ball_ids]
    return {"balls": [{"center": b.center, "radius": b.radius,
                       "region": b.region} for b in balls]}


# -- trees and instances -----------------------------------------------------


def tree_to_dict(tree: BubbleTree) -> dict:
    regions = []
    for rid in sorted(tree.regions):
        r = tree.regions[rid]
        if r.kind == "body":
            regions.append({
                "id": r.id, "kind": "body",
                "vertices": sorted(r.vertices), "r_h": r.r_h,
                "chart": f"charts/{r.id}.json",
                "covering": f"coverings/{r.id}.json"})
        else:
            regions.append({
                "id": r.id, "kind": "neck",
                "vertices": sorted(r.vertices),
                "group_order": r.group_order,
                "S1": sorted(r.s1), "S2": sorted(r.s2)})
    return {"regions": regions,
            "edges": [list(e) for e in tree.edges],
            "incidence": [list(i) for i in tree.incidence]}


def save_instance(inst: CorpusInstance, outdir: str) -> Dict[str, str]:
    """Write an instance directory; returns file name -> sha256."""
    os.makedirs(outdir, exist_ok=True)
    tree = inst.tree
    files = {
        "complex.json": complex_to_dict(inst.complex),
        "tree.json": tree_to_dict(tree),
        "params.json": inst.params.to_json_dict(),
    }
    for body in tree.bodies:
        files[f"charts/{body}.json"] = chart_to_dict(tree.charts[body])
        ids = [b.index for b in tree.covering.balls if b.region == body]
        files[f"coverings/{body}.json"] = covering_to_dict(tree.covering, ids)
    checksums = {}
    for name, payload in files.items():
        path = os.path.join(outdir, name)
        write_json_atomic(path, payload)
        with open(path, "rb") as fh:
            checksums[name] = hashlib.sha256(fh.read()).hexdigest()
    manifest = {"name": inst.name, "provenance": inst.provenance,
                "seed": inst.seed, "metadata": _jsonable(inst.metadata),
                "checksums": checksums}
    write_json_atomic(os.path.join(outdir, "manifest.json"), manifest)
    return checksums


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def load_instance(indir: str) -> CorpusInstance:
    cx = complex_from_dict(_load(os.path.join(indir, "complex.json")),
                           os.path.join(indir, "complex.json"))
    params = BoundParams.from_json_dict(
        _load(os.path.join(indir, "params.json")))
    tree_d = _load(os.path.join(indir, "tree.json"))
    tp = os.path.join(indir, "tree.json")
    regions = []
    charts = {}
    balls: List[Ball] = []
    metric = SkeletonMetric(cx)
    try:
        region_items = tree_d["regions"]
    except KeyError as exc:
        raise ParseError(tp, f"missing field {exc}")
    for rd in region_items:
        if rd["kind"] == "body":
            regions.append(Region(rd["id"], "body", set(rd["vertices"]),
                                  r_h=float(rd["r_h"])))
            chart_path = os.path.join(indir, rd["chart"])
            charts[rd["id"]] = chart_from_dict(_load(chart_path), chart_path)
            cov_path = os.path.join(indir, rd["covering"])
            cov_d = _load(cov_path)
            for bd in cov_d.get("balls", []):
                idx = len(balls)
                center = int(bd["center"])
                radius = float(bd["radius"])
                dist = metric._tree(center)[0]
                members = {v for v, dv in dist.items() if dv < radius}
                balls.append(Ball(idx, center, radius, bd["region"], members))
        else:
            regions.append(Region(rd["id"], "neck", set(rd["vertices"]),
                                  group_order=int(rd["group_order"]),
                                  s1=set(rd["S1"]), s2=set(rd["S2"])))
    covering = Covering(cx, balls, metric=metric)
    tree = BubbleTree(cx, regions, [tuple(e) for e in tree_d.get("edges", [])],
                      [tuple(i) for i in tree_d.get("incidence", [])],
                      charts, covering, params)
    manifest_path = os.path.join(indir, "manifest.json")
    if os.path.exists(manifest_path):
        manifest = _load(manifest_path)
    else:
        manifest = {"name": os.path.basename(indir), "provenance": {},
                    "seed": 0, "metadata": {}}
    metadata = manifest.get("metadata", {})
    for key in ("generator_cycle", "collar_cycle"):
        if key in metadata:
            metadata[key] = [tuple(e) for e in metadata[key]]
    return CorpusInstance(
        name=manifest.get("name", os.path.basename(indir)), complex=cx,
        tree=tree, params=params, seed=int(manifest.get("seed", 0)),
        provenance=manifest.get("provenance", {}), metadata=metadata)
