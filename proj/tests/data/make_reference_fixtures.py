"""Regenerates the reference shapefile fixtures with pyshp.

The .shp/.shx/.dbf outputs and the *.expected.json reports (what pyshp reads
back from the same bytes) are committed; rerun only to refresh them.
"""

import json
import pathlib

import shapefile

HERE = pathlib.Path(__file__).resolve().parent


def report(stem):
    with shapefile.Reader(str(stem)) as r:
        fields = [
            {"name": f[0], "type": f[1], "width": f[2], "decimals": f[3]}
            for f in r.fields[1:]
        ]
        shapes = []
        for s in r.shapes():
            parts = list(s.parts) + [len(s.points)]
            shapes.append(
                [[list(p) for p in s.points[parts[i]:parts[i + 1]]] for i in range(len(parts) - 1)]
            )
        records = [list(rec) for rec in r.records()]
        return {"shape_type": r.shapeType, "fields": fields, "shapes": shapes, "records": records}


def lines():
    stem = HERE / "ref_lines"
    with shapefile.Writer(str(stem), shapeType=shapefile.POLYLINE) as w:
        w.field("name", "C", 20)
        w.field("lanes", "N", 4, 0)
        w.field("length", "N", 12, 3)
        w.field("ratio", "F", 10, 4)
        w.line([[[0.0, 0.0], [1.5, 0.25], [3.0, 0.0]]])
        w.record("Rua A", 2, 3.041, 0.5)
        w.line([[[1.0, -1.0], [1.0, 2.0]], [[4.0, 4.0], [5.125, 6.5]]])
        w.record("Av. Brasil", 4, 4.321, 0.125)
        w.line([[[-2.5, 3.75], [0.1, 0.2], [0.3, 0.7], [10.0, -3.0]]])
        w.record("", None, None, None)
    (HERE / "ref_lines.expected.json").write_text(json.dumps(report(stem), indent=1) + "\n")


def polygon():
    with shapefile.Writer(str(HERE / "ref_polygon"), shapeType=shapefile.POLYGON) as w:
        w.field("id", "N", 5, 0)
        w.poly([[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.0, 0.0]]])
        w.record(1)


def lines_z():
    with shapefile.Writer(str(HERE / "ref_lines_z"), shapeType=shapefile.POLYLINEZ) as w:
        w.field("id", "N", 5, 0)
        w.linez([[[0.0, 0.0, 5.0], [2.0, 1.0, 6.0]]])
        w.record(1)


if __name__ == "__main__":
    lines()
    polygon()
    lines_z()
